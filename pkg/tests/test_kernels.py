import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from frobrane import _accel
from frobrane.kernels import assoc_residual_numba, assoc_residual_numpy, contract_left, contract_right


def test_contractions_match_einsum():
    rng = np.random.default_rng(0)
    f = rng.standard_normal((2, 3, 4))
    g = rng.standard_normal((3, 5, 6))
    assert np.allclose(contract_left(f, g), np.einsum("akr,kpq->apqr", f, g))
    f2 = rng.standard_normal((2, 5, 3))
    g2 = rng.standard_normal((3, 6, 4))
    assert np.allclose(contract_right(f2, g2), np.einsum("apk,kqr->apqr", f2, g2))


@pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")
@given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 2**31), st.floats(0, 1))
def test_backends_agree(n, m, seed, sparsity):
    rng = np.random.default_rng(seed)

    def t(*shape):
        x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return x * (rng.random(shape) > sparsity)

    c = t(n, n, n)
    a = t(m, n, m)
    ref = assoc_residual_numpy(a, c, a, a)
    got = assoc_residual_numba(a, c, a, a)
    assert np.isclose(ref[0], got[0], atol=1e-12)
    assert np.isclose(ref[2], got[2], atol=1e-12)
    # the witness must realise the maximum on both paths
    d = np.abs(contract_left(a, c) - contract_right(a, a))
    assert np.isclose(d[got[1]], d.max(), atol=1e-12)


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        assoc_residual_numpy(np.ones((2, 2, 2)), np.ones((2, 2, 2)), np.ones((2, 3, 2)), np.ones((2, 2, 2)))
    if _accel.HAVE_NUMBA:
        with pytest.raises(ValueError):
            assoc_residual_numba(np.ones((2, 2, 2)), np.ones((2, 2, 2)), np.ones((2, 3, 2)), np.ones((2, 2, 2)))


def test_env_flag_disables_numba():
    import subprocess
    import sys

    code = "from frobrane import _accel; print(_accel.USE_NUMBA)"
    out = subprocess.run([sys.executable, "-c", code], env={"FROBRANE_NUMBA": "0", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "False"
