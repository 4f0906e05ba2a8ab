import numpy as np
import pytest

from frobrane import check_lbg, make_branes, regress, roundtrip_RT, roundtrip_TR, transgress
from frobrane.algebra import matrix_algebra
from frobrane.correspondence import random_branes
from frobrane.lbg import change_basis, induced_frobenius


def test_scalar_transgression():
    o = transgress(make_branes({"1": 1}))
    assert o.R["1", "1"].dim == 1 and np.allclose(o.chi["1", "1", "1"].coeffs, 1)
    assert np.allclose(o.alpha["1", "1"]([2j]), [-2j])


def test_transgress_dims(obj23):
    dims = {k: sp.dim for k, sp in obj23.R.items()}
    assert dims == {("1", "1"): 4, ("1", "2"): 6, ("2", "1"): 6, ("2", "2"): 9}
    assert check_lbg(obj23).passed


def test_weighted_adjoint(obj_weighted):
    # alpha is the metric adjoint: <f v, w> = <v, f^* w>
    G = np.diag([1.0, 2.0])
    f = np.array([[1, 2j], [3, 4]])
    fstar = obj_weighted.alpha["1", "1"](f.reshape(-1)).reshape(2, 2)
    v, w = np.array([1, 1j]), np.array([2, -1])
    assert np.isclose((f @ v).conj() @ G @ w, v.conj() @ G @ (fstar @ w))


@pytest.mark.parametrize("i0", ["1", "2"])
def test_regress_dims(obj23, i0):
    reg = regress(obj23, i0, seed=0)
    assert reg.E.E["1"].dim == 2 and reg.E.E["2"].dim == 3


def test_regress_scalar(scalar_obj):
    assert regress(scalar_obj, "1").E.E["1"].dim == 1


def test_regress_bad_color(obj23):
    with pytest.raises(ValueError):
        regress(obj23, "7")


@pytest.mark.parametrize("i0", ["1", "2"])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_roundtrip_RT(obj23, i0, seed):
    rt = roundtrip_RT(obj23, i0, seed)
    assert rt.passed and rt.residual < 1e-8


def test_roundtrip_RT_scalar(scalar_obj):
    rt = roundtrip_RT(scalar_obj, "1")
    assert rt.passed
    assert np.allclose(np.abs(rt.maps["1", "1"].coeffs), [[1]])


def test_roundtrip_RT_after_unitary_change_of_basis():
    o = transgress(make_branes({"1": 2}))
    rng = np.random.default_rng(11)
    maps = {}
    for k, sp in o.R.items():
        Q, _ = np.linalg.qr(rng.standard_normal((sp.dim, sp.dim)) + 1j * rng.standard_normal((sp.dim, sp.dim)))
        maps[k] = Q
    rt = roundtrip_RT(change_basis(o, maps), "1", 0)
    assert rt.passed and rt.residual < 1e-8


@pytest.mark.parametrize("dims,i0", [({"1": 2}, "1"), ({"1": 1}, "1"), ({"1": 2, "2": 3, "3": 2}, "3")])
def test_roundtrip_TR(dims, i0):
    rt = roundtrip_TR(make_branes(dims), i0)
    assert rt.passed and rt.residual < 1e-9
    assert set(rt.maps) == set(dims)


def test_roundtrip_TR_weighted():
    rng = np.random.default_rng(4)
    b = random_branes(rng, 3, 3, identity_prob=0.0)
    for i0 in b.colors:
        assert roundtrip_TR(b, i0, 1).passed


def test_endomorphism_algebra_coincides():
    b = make_branes({"1": [[2.0, 0.5], [0.5, 1.0]], "2": 3})
    o = transgress(b)
    for c, n in (("1", 2), ("2", 3)):
        assert np.array_equal(induced_frobenius(o, c).algebra.c, matrix_algebra(n).c)


def test_base_point_and_seed_independence():
    b = make_branes({"a": 2, "b": 1, "c": 3})
    o = transgress(b)
    dims = None
    residuals = []
    for i0 in b.colors:
        for seed in (0, 7):
            reg = regress(o, i0, seed)
            d = [reg.E.E[c].dim for c in b.colors]
            assert dims is None or d == dims
            dims = d
            residuals.append(roundtrip_RT(o, i0, seed).residual)
    assert dims == [2, 1, 3]
    assert max(residuals) < 1e-10
