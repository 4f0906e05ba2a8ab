"""Loop-space brane geometry reduced to a point.

An object is the septuple ``(L, lambda, R, phi, chi, eps, alpha)``:

* ``L`` a metric space with product ``lam: L (x) L -> L``;
* ``R[i, j]`` metric spaces, one per ordered pair of colors;
* ``phi[i, j]: L (x) R_ij -> R_ij``;
* ``chi[i, j, k]: R_jk (x) R_ij -> R_ik`` (the second argument is applied first);
* ``eps[i]`` in ``R_ii``;
* ``alpha[i, j]: R_ij -> conj(R_ji)``, conjugate-linear.

``check_lbg`` evaluates every structure condition plus the four axioms on full
bases and keeps the worst residual per axiom.
"""

import itertools
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .algebra import Algebra, FrobeniusForm, check_frobenius, is_simple, make_algebra
from .bimodule import Bimodule, balanced_tensor, is_faithfully_balanced, make_bimodule
from .errors import NotIso
from .kernels import assoc_residual
from .numcore import (
    DEFAULT_TOL,
    Bilinear,
    ConjLinMap,
    HermitianSpace,
    LinMap,
    Tolerance,
    as_complex,
    frozen,
    max_gap,
    orthonormal_frame,
    tensor_space,
)
from .report import AxiomReport

__all__ = [
    "LBGPointObject",
    "make_lbg",
    "check_lbg",
    "lambda_tilde",
    "InducedFrobenius",
    "induced_frobenius",
    "induced_bimodule",
    "concat_isomorphism",
    "rank_identities",
    "change_basis",
    "eps_kernel_dim",
]

Pair = Tuple[str, str]
Triple = Tuple[str, str, str]


@dataclass(frozen=True, eq=False)
class LBGPointObject:
    colors: tuple
    L: HermitianSpace
    lam: Bilinear
    R: Dict[Pair, HermitianSpace]
    phi: Dict[Pair, Bilinear]
    chi: Dict[Triple, Bilinear]
    eps: Dict[str, np.ndarray]
    alpha: Dict[Pair, ConjLinMap]
    unit_L: np.ndarray = field(default=None)
    unit_residual: float = 0.0

    def pairs(self):
        return list(itertools.product(self.colors, repeat=2))

    def triples(self):
        return list(itertools.product(self.colors, repeat=3))

    def h(self, i, j, v, w) -> complex:
        return self.R[i, j].inner(v, w)


def _solve_unit_L(lam):
    c = lam.coeffs
    n = c.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex), 0.0
    system = c.transpose(0, 2, 1).reshape(n * n, n)
    rhs = np.eye(n, dtype=complex).reshape(-1)
    u, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return u, float(np.abs(system @ u - rhs).max())


def make_lbg(colors, L, lam, R, phi, chi, eps, alpha) -> LBGPointObject:
    """Assemble an object, checking shapes and solving for the unit of ``L``.

    Raw arrays are accepted for every map and wrapped with the right spaces.
    Semantic conditions are left to :func:`check_lbg`.
    """
    colors = tuple(str(c) for c in colors)
    if len(set(colors)) != len(colors):
        raise ValueError("duplicate color names")
    if not colors:
        raise ValueError("at least one color is required")
    if not isinstance(lam, Bilinear):
        lam = Bilinear(L, L, L, lam)
    R = {tuple(k): v for k, v in R.items()}
    for i, j in itertools.product(colors, repeat=2):
        if (i, j) not in R:
            raise ValueError(f"missing space R[{i},{j}]")
    for i in colors:
        if R[i, i].dim == 0:
            raise ValueError(f"R[{i},{i}] is zero-dimensional and cannot hold a unit")
    phi = {
        (i, j): f if isinstance(f, Bilinear) else Bilinear(L, R[i, j], R[i, j], f)
        for (i, j), f in ((tuple(k), v) for k, v in phi.items())
    }
    chi = {
        (i, j, k): f if isinstance(f, Bilinear) else Bilinear(R[j, k], R[i, j], R[i, k], f)
        for (i, j, k), f in ((tuple(k), v) for k, v in chi.items())
    }
    alpha = {
        (i, j): f if isinstance(f, ConjLinMap) else ConjLinMap(R[i, j], R[j, i], f)
        for (i, j), f in ((tuple(k), v) for k, v in alpha.items())
    }
    eps = {str(i): frozen(v) for i, v in eps.items()}
    for key in itertools.product(colors, repeat=2):
        if key not in phi or key not in alpha:
            raise ValueError(f"missing phi/alpha for pair {key}")
    for key in itertools.product(colors, repeat=3):
        if key not in chi:
            raise ValueError(f"missing chi for triple {key}")
    for i in colors:
        if i not in eps or eps[i].shape != (R[i, i].dim,):
            raise ValueError(f"eps[{i}] missing or of wrong length")
    unit, res = _solve_unit_L(lam)
    return LBGPointObject(colors, L, lam, R, phi, chi, eps, alpha, frozen(unit), res)


def lambda_tilde(obj: LBGPointObject) -> ConjLinMap:
    """``l -> h(l, 1) 1`` as a conjugate-linear map."""
    u = obj.unit_L
    return ConjLinMap(obj.L, obj.L, np.outer(u, obj.L.gram @ u))


def _is_unitary(f: LinMap):
    """Residual of ``f^* f = id`` and ``f f^* = id`` in metric terms."""
    G_s, G_d, M = f.src.gram, f.dst.gram, f.coeffs
    r1 = max_gap(M.conj().T @ G_d @ M, G_s)
    if M.shape[0] != M.shape[1]:
        return max(r1[0], 1.0), r1[1]
    Minv = np.linalg.pinv(M)
    r2 = max_gap(Minv.conj().T @ G_s @ Minv, G_d)
    return (r1[0], r1[1]) if r1[0] >= r2[0] else (r2[0], r2[1])


def check_lbg(obj: LBGPointObject, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    C = obj.colors
    u = obj.unit_L
    lamc = obj.lam.coeffs
    scale1 = tol.bound(1.0)

    # (1*) L is a commutative associative algebra, lambda unitary, unit of length one
    r = max_gap(lamc, lamc.transpose(0, 2, 1))
    rep.record("L.commutative", r[0], tol.bound(r[2]), r[1])
    res, idx, sc = assoc_residual(lamc, lamc, lamc, lamc)
    rep.record("L.associative", res, tol.bound(sc), idx)
    rep.record("L.unit", obj.unit_residual, scale1)
    rep.record("L.unit_length", abs(obj.L.norm(u) - 1.0), scale1)
    r = _is_unitary(obj.lam.as_linear())
    rep.record("L.lambda_unitary", r[0], scale1, r[1])

    for i, j in obj.pairs():
        ph = obj.phi[i, j]
        r = _is_unitary(ph.as_linear())
        rep.record("phi.unitary", r[0], scale1, {"pair": [i, j], "index": r[1]})
        res, idx, sc = assoc_residual(ph.coeffs, lamc, ph.coeffs, ph.coeffs)
        rep.record("phi.representation", res, tol.bound(sc), {"pair": [i, j], "index": idx})
        r = max_gap(ph.left_operator(u), np.eye(obj.R[i, j].dim))
        rep.record("phi.unital", r[0], scale1, {"pair": [i, j], "index": r[1]})

    # (5*) associativity for quadruples: chi_ijl(chi_jkl(x, y), z) = chi_ikl(x, chi_ijk(y, z))
    for i, j, k, l in itertools.product(C, repeat=4):
        res, idx, sc = assoc_residual(
            obj.chi[i, j, l].coeffs, obj.chi[j, k, l].coeffs, obj.chi[i, k, l].coeffs, obj.chi[i, j, k].coeffs
        )
        rep.record("chi.associative", res, tol.bound(sc), {"colors": [i, j, k, l], "index": idx})
    for i, j in obj.pairs():
        eye = np.eye(obj.R[i, j].dim)
        r = max_gap(obj.chi[i, i, j].right_operator(obj.eps[i]), eye)
        r2 = max_gap(obj.chi[i, j, j].left_operator(obj.eps[j]), eye)
        worst = r if r[0] >= r2[0] else r2
        rep.record("eps.neutral", worst[0], scale1, {"pair": [i, j], "index": worst[1]})

    # (7*) alpha
    for i, j in obj.pairs():
        A = obj.alpha[i, j].coeffs
        Gij, Gji = obj.R[i, j].gram, obj.R[j, i].gram
        # h_ji(alpha v, alpha w) = h_ij(w, v)  <=>  A^H G_ji A = G_ij^T
        r = max_gap(A.conj().T @ Gji @ A, Gij.T)
        rep.record("alpha.unitary", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
        r = max_gap(obj.alpha[j, i].coeffs @ A.conj(), np.eye(A.shape[1]))
        rep.record("alpha.involutive", r[0], scale1, {"pair": [i, j], "index": r[1]})
    for i in C:
        r = max_gap(obj.alpha[i, i](obj.eps[i]), obj.eps[i])
        rep.record("alpha.unital", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
    for i, j, k in obj.triples():
        # chi_kji(alpha_ij v, alpha_jk w) = alpha_ik(chi_ijk(w, v))
        lhs = np.einsum("apq,pv,qw->awv", obj.chi[k, j, i].coeffs, obj.alpha[i, j].coeffs, obj.alpha[j, k].coeffs, optimize=True)
        rhs = np.einsum("am,mwv->awv", obj.alpha[i, k].coeffs, obj.chi[i, j, k].coeffs.conj())
        r = max_gap(lhs, rhs)
        rep.record("alpha.antimultiplicative", r[0], tol.bound(r[2]), {"colors": [i, j, k], "index": r[1]})

    # LBG1*: phi_ik(lambda(l, l'), chi_ijk(w, v)) = chi_ijk(phi_jk(l, w), phi_ij(l', v))
    for i, j, k in obj.triples():
        ch = obj.chi[i, j, k].coeffs
        lhs = np.einsum("amn,mxy,nwv->axywv", obj.phi[i, k].coeffs, lamc, ch, optimize=True)
        rhs = np.einsum("amn,mxw,nyv->axywv", ch, obj.phi[j, k].coeffs, obj.phi[i, j].coeffs, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record("LBG1*", r[0], tol.bound(r[2]), {"colors": [i, j, k], "index": r[1]})

    # LBG2*: h_ii(chi_iji(alpha_ij w, v), eps_i) = h_ij(v, w) = h_jj(eps_j, chi_jij(w, alpha_ij v))
    for i, j in obj.pairs():
        A = obj.alpha[i, j].coeffs
        Gij = obj.R[i, j].gram
        # X[a, q, p] = chi_iji(alpha(e_q), e_p); h(X, eps) = X^H G eps
        X = np.einsum("amp,mq->aqp", obj.chi[i, j, i].coeffs, A)
        first = np.einsum("aqp,ab,b->pq", X.conj(), obj.R[i, i].gram, obj.eps[i], optimize=True)
        Y = np.einsum("aqm,mp->apq", obj.chi[j, i, j].coeffs, A)
        second = np.einsum("a,ab,bpq->pq", obj.eps[j].conj(), obj.R[j, j].gram, Y, optimize=True)
        r = max_gap(first, Gij)
        r2 = max_gap(second, Gij)
        worst = r if r[0] >= r2[0] else r2
        rep.record("LBG2*", worst[0], tol.bound(worst[2]), {"pair": [i, j], "index": worst[1]})

    # LBG3*: alpha_ij(phi_ij(l, v)) = phi_ji(lambda~(l), alpha_ij(v))
    Lt = lambda_tilde(obj).coeffs
    for i, j in obj.pairs():
        A = obj.alpha[i, j].coeffs
        lhs = np.einsum("am,mlv->alv", A, obj.phi[i, j].coeffs.conj())
        rhs = np.einsum("apq,pl,qv->alv", obj.phi[j, i].coeffs, Lt, A, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record("LBG3*", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})

    # LBG4*: sum_k chi_jij(chi_iij(v_k, v), alpha_ij(v_k)) = h_ii(eps_i, v) eps_j
    for i, j in obj.pairs():
        lhs = cardy_sum(obj, i, j)
        rhs = np.outer(obj.eps[j], obj.eps[i].conj() @ obj.R[i, i].gram)
        r = max_gap(lhs, rhs)
        rep.record("LBG4*", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
    return rep


def cardy_sum(obj: LBGPointObject, i, j):
    """Matrix of ``v -> sum_k chi_jij(chi_iij(v_k, v), alpha_ij(v_k))`` over an
    orthonormal basis ``(v_k)`` of ``R_ij``."""
    U = orthonormal_frame(obj.R[i, j]).coeffs
    W = obj.alpha[i, j].coeffs @ U.conj()
    Z = U @ W.T  # sum_k v_k (x) alpha(v_k)
    return np.einsum("amn,mpv,pn->av", obj.chi[j, i, j].coeffs, obj.chi[i, i, j].coeffs, Z, optimize=True)


@dataclass(frozen=True, eq=False)
class InducedFrobenius:
    algebra: Algebra
    form: FrobeniusForm
    simple: bool


def induced_frobenius(obj: LBGPointObject, i, tol: Tolerance = DEFAULT_TOL) -> InducedFrobenius:
    """``A_i = (R_ii, chi_iii, eps_i, alpha_ii, theta_i)`` with its certificates."""
    R = obj.R[i, i]
    theta = obj.eps[i].conj() @ R.gram
    A = make_algebra(R, obj.chi[i, i, i], obj.eps[i], obj.alpha[i, i], theta, tol)
    return InducedFrobenius(A, check_frobenius(A, tol), is_simple(A, tol))


def induced_bimodule(obj: LBGPointObject, i, j, tol: Tolerance = DEFAULT_TOL, algebras=None) -> Bimodule:
    """``R_ij`` as an ``A_j``-``A_i`` bimodule: left by ``chi_ijj``, right by ``chi_iij``."""
    if algebras is None:
        Ai = induced_frobenius(obj, i, tol).algebra
        Aj = Ai if i == j else induced_frobenius(obj, j, tol).algebra
    else:
        Ai, Aj = algebras[i], algebras[j]
    return make_bimodule(Aj, Ai, obj.R[i, j], obj.chi[i, j, j], obj.chi[i, i, j], tol)


def faithfully_balanced_certificate(obj, i, j, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_faithfully_balanced(induced_bimodule(obj, i, j, tol), tol)


@dataclass(frozen=True, eq=False)
class ConcatIso:
    forward: LinMap
    inverse: LinMap
    residual: float
    quotient_dim: int


def concat_isomorphism(obj: LBGPointObject, i, j, k, tol: Tolerance = DEFAULT_TOL, algebras=None) -> ConcatIso:
    """``R_jk (x)_{A_j} R_ij -> R_ik`` induced by ``chi_ijk``, with the explicit inverse

        psi(x) = rk(R_jj)^{-1/2} sum_l chi_jik(x, alpha_ij(v_l)) (x) v_l

    over an orthonormal basis ``(v_l)`` of ``R_ij``.
    """
    if algebras is None:
        algebras = {c: induced_frobenius(obj, c, tol).algebra for c in {i, j, k}}
    M = induced_bimodule(obj, j, k, tol, algebras)
    N = induced_bimodule(obj, i, j, tol, algebras)
    bt = balanced_tensor(M, N, tol)
    Q = bt.bimodule.space
    P = bt.projection.coeffs
    K = bt.inclusion.coeffs
    Rik = obj.R[i, k]
    X = obj.chi[i, j, k].coeffs.reshape(Rik.dim, -1)
    fwd = X @ K
    U = orthonormal_frame(obj.R[i, j]).coeffs
    W = obj.alpha[i, j].coeffs @ U.conj()
    nj = obj.R[j, j].dim
    # Psi[(w, v), x] = sum_l chi_jik[w, x, m] W[m, l] U[v, l]
    Psi = np.einsum("wxm,ml,vl->wvx", obj.chi[j, i, k].coeffs, W, U, optimize=True).reshape(-1, Rik.dim) / np.sqrt(nj)
    inv = P @ Psi
    res = 0.0
    if fwd.shape[0] == fwd.shape[1]:
        res = max(
            float(np.abs(fwd @ inv - np.eye(Rik.dim)).max()) if Rik.dim else 0.0,
            float(np.abs(inv @ fwd - np.eye(Q.dim)).max()) if Q.dim else 0.0,
        )
        # intertwining: left A_k via chi_ikk, right A_i via chi_iik
        T = bt.bimodule
        Ak, Ai = algebras[k], algebras[i]
        for p in range(Ak.dim):
            e = np.eye(Ak.dim)[p]
            lhs = fwd @ T.left_operator(e)
            rhs = obj.chi[i, k, k].left_operator(e) @ fwd
            res = max(res, float(np.abs(lhs - rhs).max()) if lhs.size else 0.0)
        for p in range(Ai.dim):
            e = np.eye(Ai.dim)[p]
            lhs = fwd @ T.right_operator(e)
            rhs = obj.chi[i, i, k].right_operator(e) @ fwd
            res = max(res, float(np.abs(lhs - rhs).max()) if lhs.size else 0.0)
    else:
        res = float("inf")
    bound = tol.bound(1.0) * 10
    if not res <= bound:
        raise NotIso(
            f"chi_{i}{j}{k} does not induce an isomorphism (residual {res:.3g}, quotient dim {Q.dim}, rk R_ik {Rik.dim})",
            residual=res,
        )
    return ConcatIso(LinMap(Q, Rik, fwd), LinMap(Rik, Q, inv), res, Q.dim)


def rank_identities(obj: LBGPointObject, tol: Tolerance = DEFAULT_TOL) -> AxiomReport:
    rep = AxiomReport()
    for i in obj.colors:
        n = obj.R[i, i].dim
        norm = obj.R[i, i].norm(obj.eps[i])
        rep.record("rank.eps_norm", abs(norm - n ** 0.25), tol.bound(1.0), {"color": i}, f"|eps|={norm:.12g}")
    for i, j in obj.pairs():
        lhs = obj.R[i, j].dim ** 2
        rhs = obj.R[i, i].dim * obj.R[j, j].dim
        rep.record("rank.square", float(abs(lhs - rhs)), 0.0, {"pair": [i, j]}, f"{lhs} vs {rhs}")
    for i, j in obj.pairs():
        U = orthonormal_frame(obj.R[i, j]).coeffs
        W = obj.alpha[i, j].coeffs @ U.conj()
        s = np.einsum("apq,pk,qk->a", obj.chi[j, i, j].coeffs, U, W, optimize=True)
        r = max_gap(s, np.sqrt(obj.R[i, i].dim) * obj.eps[j])
        rep.record("rank.unit_sum", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
    return rep


def eps_kernel_dim(obj: LBGPointObject, i, tol: Tolerance = DEFAULT_TOL) -> int:
    """Dimension of the solution space of the homogeneous neutrality equations
    for a unit of ``R_ii``; zero means the unit is unique."""
    c = obj.chi[i, i, i].coeffs
    n = c.shape[0]
    # e x = 0 and x e = 0 for all basis x, as linear conditions on e
    sys = np.vstack([c.transpose(0, 2, 1).reshape(n * n, n), c.reshape(n * n, n)])
    s = np.linalg.svd(sys, compute_uv=False)
    return n - int(np.sum(s > tol.abs_tol * max(1.0, s[0])))


def change_basis(obj: LBGPointObject, maps) -> LBGPointObject:
    """Re-express ``obj`` in new bases of each ``R_ij``.

    ``maps[i, j]`` is an invertible matrix whose columns are the new basis
    vectors in old coordinates.  All tensors are transported, so the result is
    isomorphic to ``obj``.
    """
    B = {k: as_complex(v) for k, v in maps.items()}
    Binv = {k: np.linalg.inv(v) for k, v in B.items()}
    R = {k: HermitianSpace(sp.dim, B[k].conj().T @ sp.gram @ B[k]) for k, sp in obj.R.items()}
    phi = {k: np.einsum("am,mln,np->alp", Binv[k], f.coeffs, B[k], optimize=True) for k, f in obj.phi.items()}
    chi = {
        (i, j, k): np.einsum("am,mpq,pw,qv->awv", Binv[i, k], f.coeffs, B[j, k], B[i, j], optimize=True)
        for (i, j, k), f in obj.chi.items()
    }
    eps = {i: Binv[i, i] @ v for i, v in obj.eps.items()}
    alpha = {(i, j): Binv[j, i] @ f.coeffs @ B[i, j].conj() for (i, j), f in obj.alpha.items()}
    return make_lbg(obj.colors, obj.L, obj.lam, R, phi, chi, eps, alpha)
