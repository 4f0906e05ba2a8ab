"""Colored knowledgable Frobenius algebras, reflection structures, and the
functor from point-reduced brane geometry together with its inverse.

Axioms are named CFa1..CFa9 after the standard open-closed list.  Only the
ones carrying content in this finite setting are evaluated: CFa1, CFa3, CFa5
to CFa9 (CFa2 and CFa4 are typing statements enforced at construction).
"""

import itertools
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .algebra import Algebra, is_simple
from .errors import NotHermitian, NotScalarBulk, PositivityRequired, ShapeMismatch
from .kernels import assoc_residual
from .lbg import LBGPointObject, lambda_tilde, make_lbg
from .numcore import (
    DEFAULT_TOL,
    Bilinear,
    ConjLinMap,
    HermitianSpace,
    LinMap,
    Tolerance,
    frozen,
    max_gap,
)
from .report import AxiomReport

__all__ = [
    "KFrob",
    "ReflectionStructure",
    "make_kfrob",
    "pairing_sigma",
    "check_kfrob",
    "check_reflection",
    "check_positivity",
    "positivity_pairing",
    "functor_F",
    "inverse_F",
    "check_simple_theorem",
]


@dataclass(frozen=True, eq=False)
class KFrob:
    """Open-closed data.  ``L`` is an :class:`Algebra` whose ``trace`` is the
    bulk trace; metrics on ``R`` are carried along but never used by CFa checks."""

    colors: tuple
    L: Algebra
    R: Dict
    chi: Dict
    eps: Dict
    theta: Dict
    iota: Dict
    iota_star: Dict

    def pairs(self):
        return list(itertools.product(self.colors, repeat=2))

    @property
    def vartheta(self) -> np.ndarray:
        return self.L.trace


@dataclass(frozen=True, eq=False)
class ReflectionStructure:
    lambda_tilde: ConjLinMap
    alpha: Dict


def make_kfrob(colors, L: Algebra, R, chi, eps, theta, iota, iota_star) -> KFrob:
    """Wrap raw arrays and check shapes; the axioms are left to :func:`check_kfrob`."""
    colors = tuple(str(c) for c in colors)
    if not colors:
        raise ValueError("at least one color is required")
    if L.trace is None:
        raise ValueError("the bulk algebra needs a trace")
    R = {tuple(k): v for k, v in R.items()}
    for key in itertools.product(colors, repeat=2):
        if key not in R:
            raise ValueError(f"missing space R[{key[0]},{key[1]}]")
    chi_w = {}
    for i, j, k in itertools.product(colors, repeat=3):
        f = chi[i, j, k]
        chi_w[i, j, k] = f if isinstance(f, Bilinear) else Bilinear(R[j, k], R[i, j], R[i, k], f)
    eps_w, theta_w, iota_w, istar_w = {}, {}, {}, {}
    for i in colors:
        Rii = R[i, i]
        eps_w[i] = frozen(eps[i])
        theta_w[i] = frozen(theta[i])
        if eps_w[i].shape != (Rii.dim,) or theta_w[i].shape != (Rii.dim,):
            raise ShapeMismatch(f"eps/theta of color {i} must have length {Rii.dim}")
        f = iota[i]
        iota_w[i] = f if isinstance(f, LinMap) else LinMap(L.space, Rii, f)
        f = iota_star[i]
        istar_w[i] = f if isinstance(f, LinMap) else LinMap(Rii, L.space, f)
    return KFrob(colors, L, R, chi_w, eps_w, theta_w, iota_w, istar_w)


def pairing_sigma(kf: KFrob, i, j) -> np.ndarray:
    """``sigma_ij[a, b] = theta_i(chi_iji(e_a, e_b))`` with ``e_a`` in ``R_ji``,
    ``e_b`` in ``R_ij``.  The transpose is the matrix of ``Phi_ij``."""
    return np.einsum("m,mab->ab", kf.theta[i], kf.chi[i, j, i].coeffs)


def dual_basis(kf: KFrob, i, j) -> np.ndarray:
    """Columns ``v^k`` in ``R_ji`` with ``sigma_ij(v^k, e_l) = delta_kl``."""
    return np.linalg.inv(pairing_sigma(kf, i, j)).T


def _smin(M):
    if M.size == 0:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False).min())


def check_kfrob(kf: KFrob, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    L = kf.L
    c = L.c
    vt = kf.vartheta
    one = tol.bound(1.0)
    C = kf.colors

    # CFa1: commutative Frobenius algebra with non-degenerate trace pairing
    r = max_gap(c, c.transpose(0, 2, 1))
    rep.record("CFa1.commutative", r[0], tol.bound(r[2]), r[1])
    res, idx, sc = assoc_residual(c, c, c, c)
    rep.record("CFa1.associative", res, tol.bound(sc), idx)
    r = max_gap(np.einsum("kap,a->kp", c, L.unit), np.eye(L.dim))
    rep.record("CFa1.unit", r[0], one, r[1])
    smin = _smin(np.einsum("k,kpq->pq", vt, c))
    rep.record("CFa1.nondegenerate", max(0.0, tol.psd_floor - smin), 0.0, detail=f"smallest singular value {smin:.6g}")

    # CFa3: associative composition with units
    for i, j, k, l in itertools.product(C, repeat=4):
        res, idx, sc = assoc_residual(
            kf.chi[i, j, l].coeffs, kf.chi[j, k, l].coeffs, kf.chi[i, k, l].coeffs, kf.chi[i, j, k].coeffs
        )
        rep.record("CFa3.associative", res, tol.bound(sc), {"colors": [i, j, k, l], "index": idx})
    for i, j in kf.pairs():
        eye = np.eye(kf.R[i, j].dim)
        r = max_gap(kf.chi[i, i, j].right_operator(kf.eps[i]), eye)
        r2 = max_gap(kf.chi[i, j, j].left_operator(kf.eps[j]), eye)
        w = r if r[0] >= r2[0] else r2
        rep.record("CFa3.unit", w[0], one, {"pair": [i, j], "index": w[1]})

    # CFa5: iota_i unital algebra maps, central
    for i in C:
        J = kf.iota[i].coeffs
        r = max_gap(J @ L.unit, kf.eps[i])
        rep.record("CFa5.unital", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
        lhs = np.einsum("am,mpq->apq", J, c)
        rhs = np.einsum("amn,mp,nq->apq", kf.chi[i, i, i].coeffs, J, J, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record("CFa5.multiplicative", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
    for i, j in kf.pairs():
        # iota_j(l) . v = v . iota_i(l) for v in R_ij
        lhs = np.einsum("amv,ml->alv", kf.chi[i, j, j].coeffs, kf.iota[j].coeffs)
        rhs = np.einsum("avm,ml->alv", kf.chi[i, i, j].coeffs, kf.iota[i].coeffs)
        r = max_gap(lhs, rhs)
        rep.record("CFa5.central", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})

    # CFa6: vartheta(l . iota*_i(v)) = theta_i(iota_i(l) . v)
    for i in C:
        lhs = np.einsum("k,klm,mv->lv", vt, c, kf.iota_star[i].coeffs, optimize=True)
        rhs = np.einsum("a,amv,ml->lv", kf.theta[i], kf.chi[i, i, i].coeffs, kf.iota[i].coeffs, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record("CFa6", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})

    for i, j in kf.pairs():
        s = pairing_sigma(kf, i, j)
        if s.shape[0] != s.shape[1]:
            rep.record("CFa7", float("inf"), 0.0, {"pair": [i, j]}, f"sigma has shape {s.shape}")
            continue
        smin = _smin(s)
        rep.record(
            "CFa7", max(0.0, tol.psd_floor - smin), 0.0, {"pair": [i, j]}, f"smallest singular value {smin:.6g}"
        )
        r = max_gap(s, pairing_sigma(kf, j, i).T)
        rep.record("CFa8", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})

    # CFa9 (Cardy): iota_j iota*_i = sum_k chi_jij(chi_iij(v_k, .), v^k)
    for i, j in kf.pairs():
        s = pairing_sigma(kf, i, j)
        if s.shape[0] != s.shape[1] or _smin(s) < tol.psd_floor:
            rep.record("CFa9", float("inf"), 0.0, {"pair": [i, j]}, "sigma is singular")
            continue
        D = np.linalg.inv(s).T
        lhs = kf.iota[j].coeffs @ kf.iota_star[i].coeffs
        rhs = np.einsum("amn,mkv,nk->av", kf.chi[j, i, j].coeffs, kf.chi[i, i, j].coeffs, D, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record(
            "CFa9", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]}, f"cond(sigma)={np.linalg.cond(s):.3g}"
        )
    return rep


def check_reflection(kf: KFrob, refl: ReflectionStructure, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    L = kf.L
    c = L.c
    Lt = refl.lambda_tilde.coeffs
    vt = kf.vartheta
    one = tol.bound(1.0)

    r = max_gap(Lt @ Lt.conj(), np.eye(L.dim))
    rep.record("lambda_tilde.involutive", r[0], one, r[1])
    r = max_gap(Lt @ L.unit.conj(), L.unit)
    rep.record("lambda_tilde.unital", r[0], tol.bound(r[2]), r[1])
    lhs = np.einsum("am,mpq->apq", Lt, c.conj())
    rhs = np.einsum("amn,mp,nq->apq", c, Lt, Lt, optimize=True)
    r = max_gap(lhs, rhs)
    rep.record("lambda_tilde.multiplicative", r[0], tol.bound(r[2]), r[1])
    r = max_gap(vt @ Lt, vt.conj())
    rep.record("vartheta.reflection", r[0], tol.bound(r[2]), r[1])

    for i, j in kf.pairs():
        A = refl.alpha[i, j].coeffs
        r = max_gap(refl.alpha[j, i].coeffs @ A.conj(), np.eye(A.shape[1]))
        rep.record("alpha.involutive", r[0], one, {"pair": [i, j], "index": r[1]})
    for i, j, k in itertools.product(kf.colors, repeat=3):
        lhs = np.einsum("apq,pv,qw->awv", kf.chi[k, j, i].coeffs, refl.alpha[i, j].coeffs, refl.alpha[j, k].coeffs, optimize=True)
        rhs = np.einsum("am,mwv->awv", refl.alpha[i, k].coeffs, kf.chi[i, j, k].coeffs.conj())
        r = max_gap(lhs, rhs)
        rep.record("alpha.antimultiplicative", r[0], tol.bound(r[2]), {"colors": [i, j, k], "index": r[1]})
    for i in kf.colors:
        A = refl.alpha[i, i].coeffs
        r = max_gap(A @ kf.eps[i].conj(), kf.eps[i])
        rep.record("alpha.unital", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
        r = max_gap(kf.theta[i] @ A, kf.theta[i].conj())
        rep.record("theta.reflection", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
        J = kf.iota[i].coeffs
        r = max_gap(A @ J.conj(), J @ Lt)
        rep.record("iota.reflection", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
        Js = kf.iota_star[i].coeffs
        r = max_gap(Lt @ Js.conj(), Js @ A)
        rep.record("iota_star.reflection (derived)", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
    return rep


def _conj_inverse(refl, i, j, tol):
    """Coefficients of ``alpha_ji^{-1}: R_ij -> R_ji``."""
    A_ij = refl.alpha[i, j].coeffs
    A_ji = refl.alpha[j, i].coeffs
    if A_ji.shape[0] == A_ji.shape[1] and max_gap(A_ji @ A_ij.conj(), np.eye(A_ij.shape[1]))[0] <= tol.bound(1.0):
        return A_ij
    return np.linalg.inv(A_ji).conj()


def positivity_pairing(kf: KFrob, refl: ReflectionStructure, i, j, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Matrix of ``(v, w) -> sigma_ij(alpha_ji^{-1}(v), w)`` on ``R_ij``."""
    return _conj_inverse(refl, i, j, tol).T @ pairing_sigma(kf, i, j)


def bulk_pairing(kf: KFrob, refl: ReflectionStructure) -> np.ndarray:
    """Matrix of ``(l, l') -> vartheta(lambda_tilde^{-1}(l) l')``."""
    Lt = refl.lambda_tilde.coeffs
    Ltinv = np.linalg.inv(Lt).conj()
    return np.einsum("k,kmq,mp->pq", kf.vartheta, kf.L.c, Ltinv, optimize=True)


def _hermitian_psd(rep, name, H, tol, witness):
    herm = float(np.abs(H - H.conj().T).max()) if H.size else 0.0
    scale = float(np.abs(H).max()) if H.size else 0.0
    if herm > tol.bound(scale):
        raise NotHermitian(f"{name} pairing is not hermitian (residual {herm:.3g})", residual=herm, witness=witness)
    low = float(np.linalg.eigvalsh((H + H.conj().T) / 2).min()) if H.size else 0.0
    rep.record(name, max(0.0, tol.psd_floor - low), 0.0, witness, f"min eigenvalue {low:.6g}")


def check_positivity(kf: KFrob, refl: ReflectionStructure, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    _hermitian_psd(rep, "positivity.bulk", bulk_pairing(kf, refl), tol, None)
    for i, j in kf.pairs():
        _hermitian_psd(rep, "positivity.boundary", positivity_pairing(kf, refl, i, j, tol), tol, {"pair": [i, j]})
    return rep


def functor_F(obj: LBGPointObject):
    """Send a point object to its open-closed data plus reflection structure."""
    u = obj.unit_L
    Lt = lambda_tilde(obj)
    vartheta = u.conj() @ obj.L.gram
    L = Algebra(obj.L, obj.lam, u, Lt, vartheta)
    theta, iota, istar = {}, {}, {}
    for i in obj.colors:
        Rii = obj.R[i, i]
        theta[i] = obj.eps[i].conj() @ Rii.gram
        iota[i] = LinMap(obj.L, Rii, np.einsum("alm,m->al", obj.phi[i, i].coeffs, obj.eps[i]))
        istar[i] = LinMap(Rii, obj.L, np.outer(u, theta[i]))
    kf = KFrob(obj.colors, L, dict(obj.R), dict(obj.chi), dict(obj.eps), theta, iota, istar)
    return kf, ReflectionStructure(Lt, dict(obj.alpha))


def inverse_F(kf: KFrob, refl: ReflectionStructure, tol: Tolerance = DEFAULT_TOL) -> LBGPointObject:
    """Rebuild a point object from reflection-positive data with a one-dimensional bulk.

    The bulk is identified with ``C`` through ``vartheta``; the boundary metrics
    are the positivity pairings and ``phi_ij = chi_ijj(iota_j(.), .)``.
    """
    if kf.L.dim != 1:
        raise NotScalarBulk(f"bulk algebra has dimension {kf.L.dim}, expected 1")
    t1 = complex(kf.vartheta @ kf.L.unit)
    if abs(t1 - 1.0) > tol.bound(1.0):
        raise NotScalarBulk(f"vartheta(1) = {t1:.6g}, expected 1", residual=abs(t1 - 1.0))
    pos = check_positivity(kf, refl, tol)
    if not pos.passed:
        worst = max(pos.failures(), key=lambda ch: ch.residual)
        raise PositivityRequired(f"{worst.name} fails: {worst.detail}", residual=worst.residual, witness=worst.witness)
    C = HermitianSpace(1)
    lam = np.ones((1, 1, 1), dtype=complex)
    R = {}
    for i, j in kf.pairs():
        H = positivity_pairing(kf, refl, i, j, tol)
        R[i, j] = HermitianSpace(H.shape[0], (H + H.conj().T) / 2)
    phi = {}
    for i, j in kf.pairs():
        # the element z of C corresponds to z * unit in L
        iota_one = kf.iota[j].coeffs @ kf.L.unit
        phi[i, j] = np.einsum("amv,m->av", kf.chi[i, j, j].coeffs, iota_one)[:, None, :]
    chi = {key: f.coeffs for key, f in kf.chi.items()}
    alpha = {key: f.coeffs for key, f in refl.alpha.items()}
    return make_lbg(kf.colors, C, lam, R, phi, chi, dict(kf.eps), alpha)


def check_simple_theorem(kf: KFrob, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    for i in kf.colors:
        Rii = kf.R[i, i]
        A = Algebra(Rii, kf.chi[i, i, i], kf.eps[i])
        ok = is_simple(A, tol)
        detail = "sandwich map has full rank" if ok else "sandwich map is rank deficient"
        rep.record(f"simple[{i}]", 0.0 if ok else 1.0, 0.0, {"color": i}, detail)
    return rep
