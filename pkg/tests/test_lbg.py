import numpy as np
import pytest

from frobrane import check_lbg, concat_isomorphism, induced_bimodule, induced_frobenius, make_branes, rank_identities, transgress
from frobrane.algebra import matrix_algebra
from frobrane.bimodule import is_faithfully_balanced, is_invertible, regular_bimodule
from frobrane.errors import NotIso
from frobrane.lbg import cardy_sum, change_basis, eps_kernel_dim, make_lbg
from frobrane.numcore import HermitianSpace


def rebuild(o, **changes):
    parts = {
        "lam": o.lam.coeffs,
        "R": dict(o.R),
        "phi": {k: f.coeffs for k, f in o.phi.items()},
        "chi": {k: f.coeffs for k, f in o.chi.items()},
        "eps": dict(o.eps),
        "alpha": {k: f.coeffs for k, f in o.alpha.items()},
    }
    parts.update(changes)
    return make_lbg(o.colors, o.L, parts["lam"], parts["R"], parts["phi"], parts["chi"], parts["eps"], parts["alpha"])


def test_transgressed_c2_passes():
    rep = check_lbg(transgress(make_branes({"1": 2})))
    assert rep.passed, rep.failures()
    for name in ("LBG1*", "LBG2*", "LBG3*", "LBG4*", "alpha.antimultiplicative", "eps.neutral"):
        assert name in rep


def test_scaled_chi_breaks_cardy_and_neutrality():
    o = transgress(make_branes({"1": 2}))
    chi = {k: f.coeffs for k, f in o.chi.items()}
    chi["1", "1", "1"] = chi["1", "1", "1"] * 1.001
    rep = check_lbg(rebuild(o, chi=chi))
    failed = {c.name for c in rep.failures()}
    assert {"LBG4*", "eps.neutral"} <= failed
    # chi enters the Cardy sum twice, so the gap is 1.001**2 - 1
    assert rep["LBG4*"].residual == pytest.approx(1.001**2 - 1, rel=1e-6)
    assert rep["eps.neutral"].residual == pytest.approx(1e-3, rel=0.5)


def test_hand_built_scalar_model():
    C = HermitianSpace(1)
    one = np.ones((1, 1, 1))
    key2, key3 = ("1", "1"), ("1", "1", "1")
    o = make_lbg(["1"], C, one, {key2: C}, {key2: one}, {key3: one}, {"1": [1.0]}, {key2: [[1.0]]})
    assert check_lbg(o).passed
    assert np.allclose(o.unit_L, [1])


def test_weighted_metric_passes(obj_weighted):
    assert check_lbg(obj_weighted).passed


def test_induced_frobenius_matrix(obj23):
    f = induced_frobenius(obj23, "1")
    assert f.simple
    assert np.allclose(f.algebra.c, matrix_algebra(2).c)
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal(4), rng.standard_normal(4)
    assert np.isclose(f.form(a, b), np.trace(a.reshape(2, 2) @ b.reshape(2, 2)))
    f2 = induced_frobenius(obj23, "2")
    assert f2.algebra.dim == 9 and f2.simple


def test_induced_frobenius_scalar(scalar_obj):
    f = induced_frobenius(scalar_obj, "1")
    assert f.algebra.dim == 1 and np.allclose(f.algebra.c, 1)


def test_induced_bimodule(obj23):
    M = induced_bimodule(obj23, "1", "2")
    assert M.dim == 6 and M.left_alg.dim == 9 and M.right_alg.dim == 4
    assert is_invertible(M) and is_faithfully_balanced(M)
    D = induced_bimodule(obj23, "1", "1")
    reg = regular_bimodule(D.left_alg)
    assert np.allclose(D.left_action.coeffs, reg.left_action.coeffs)
    assert np.allclose(D.right_action.coeffs, reg.right_action.coeffs)


def test_concat_isomorphism():
    o = transgress(make_branes({"1": 2, "2": 3, "3": 1}))
    iso = concat_isomorphism(o, "1", "2", "3")
    assert iso.quotient_dim == 2 == o.R["1", "3"].dim
    assert iso.residual < 1e-9
    s = transgress(make_branes({"1": 1}))
    iso = concat_isomorphism(s, "1", "1", "1")
    assert np.allclose(iso.forward.coeffs @ iso.inverse.coeffs, [[1]])


def test_concat_isomorphism_detects_perturbation(obj23):
    chi = {k: f.coeffs for k, f in obj23.chi.items()}
    chi["1", "2", "1"] = chi["1", "2", "1"] + 1e-3
    with pytest.raises(NotIso):
        concat_isomorphism(rebuild(obj23, chi=chi), "1", "2", "1")


def test_rank_identities(obj23):
    rep = rank_identities(obj23)
    assert rep.passed
    assert obj23.R["1", "1"].norm(obj23.eps["1"]) == pytest.approx(np.sqrt(2))
    assert obj23.R["2", "2"].norm(obj23.eps["2"]) == pytest.approx(np.sqrt(3))
    assert obj23.R["1", "2"].dim == 6


def pad_R12(o):
    """Append one orthogonal dimension to R_12 with every structure map zero on it."""
    R = dict(o.R)
    G = np.zeros((7, 7), dtype=complex)
    G[:6, :6] = o.R["1", "2"].gram
    G[6, 6] = 1
    R["1", "2"] = HermitianSpace(7, G)
    phi = {k: f.coeffs for k, f in o.phi.items()}
    phi["1", "2"] = np.pad(phi["1", "2"], ((0, 1), (0, 0), (0, 1)))
    chi = {}
    for (i, j, k), f in o.chi.items():
        pads = [(0, 0)] * 3
        if (i, k) == ("1", "2"):
            pads[0] = (0, 1)
        if (j, k) == ("1", "2"):
            pads[1] = (0, 1)
        if (i, j) == ("1", "2"):
            pads[2] = (0, 1)
        chi[i, j, k] = np.pad(f.coeffs, pads)
    alpha = {k: f.coeffs for k, f in o.alpha.items()}
    alpha["1", "2"] = np.pad(alpha["1", "2"], ((0, 0), (0, 1)))
    alpha["2", "1"] = np.pad(alpha["2", "1"], ((0, 1), (0, 0)))
    return rebuild(o, R=R, phi=phi, chi=chi, alpha=alpha)


def test_padded_object_fails_square_identity(obj23):
    bad = pad_R12(obj23)
    assert not rank_identities(bad)["rank.square"].passed
    assert not check_lbg(bad).passed


def test_eps_unique(obj23):
    for c in obj23.colors:
        assert eps_kernel_dim(obj23, c) == 0


def test_cardy_sum_is_rank_one(obj23):
    Z = cardy_sum(obj23, "1", "2")
    assert np.linalg.matrix_rank(Z) == 1


def test_change_of_basis_preserves_axioms(obj23):
    rng = np.random.default_rng(3)
    maps = {}
    for k, sp in obj23.R.items():
        maps[k] = rng.standard_normal((sp.dim, sp.dim)) + 1j * rng.standard_normal((sp.dim, sp.dim))
    rep = check_lbg(change_basis(obj23, maps))
    assert rep.passed, rep.failures()
