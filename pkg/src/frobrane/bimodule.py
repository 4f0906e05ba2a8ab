"""Bimodules, balanced tensor products and Morita invertibility."""

from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, is_simple, scalar_algebra
from .errors import ActionsDontCommute, MiddleMismatch, NotRepresentation, NotSimpleAlgebras, NotUnital
from .kernels import assoc_residual
from .numcore import (
    DEFAULT_TOL,
    Bilinear,
    HermitianSpace,
    LinMap,
    Tolerance,
    adjoint,
    max_gap,
    quotient_by,
    rank_and_kernel,
    tensor_space,
)
from .report import AxiomReport

__all__ = [
    "Bimodule",
    "BalancedTensor",
    "make_bimodule",
    "bimodule_checks",
    "tensor_over",
    "balanced_tensor",
    "is_faithfully_balanced",
    "is_invertible",
    "conjugate_dual",
    "regular_bimodule",
    "hom_bimodule",
    "bimodule_direct_sum",
]


@dataclass(frozen=True, eq=False)
class Bimodule:
    """``A``-``B`` bimodule ``M`` with ``left_action: A (x) M -> M`` and
    ``right_action: M (x) B -> M``."""

    left_alg: Algebra
    right_alg: Algebra
    space: HermitianSpace
    left_action: Bilinear
    right_action: Bilinear

    @property
    def dim(self) -> int:
        return self.space.dim

    def left_operator(self, a):
        return self.left_action.left_operator(a)

    def right_operator(self, b):
        return self.right_action.right_operator(b)


def bimodule_checks(M: Bimodule, tol: Tolerance = DEFAULT_TOL, prefix="") -> AxiomReport:
    rep = AxiomReport()
    L = M.left_action.coeffs
    R = M.right_action.coeffs
    cA = M.left_alg.c
    cB = M.right_alg.c
    eye = np.eye(M.dim)
    # (a a') m = a (a' m)
    res, idx, scale = assoc_residual(L, cA, L, L)
    rep.record(prefix + "left.representation", res, tol.bound(scale), idx)
    # (m b) b' = m (b b')
    res, idx, scale = assoc_residual(R, R, R, cB)
    rep.record(prefix + "right.representation", res, tol.bound(scale), idx)
    r = max_gap(M.left_operator(M.left_alg.unit), eye)
    rep.record(prefix + "left.unital", r[0], tol.bound(1.0), r[1])
    r = max_gap(M.right_operator(M.right_alg.unit), eye)
    rep.record(prefix + "right.unital", r[0], tol.bound(1.0), r[1])
    # (a m) b = a (m b)
    res, idx, scale = assoc_residual(R, L, L, R)
    rep.record(prefix + "commute", res, tol.bound(scale), idx)
    return rep


_ERRORS = {
    "left.representation": NotRepresentation,
    "right.representation": NotRepresentation,
    "left.unital": NotUnital,
    "right.unital": NotUnital,
    "commute": ActionsDontCommute,
}


def make_bimodule(A: Algebra, B: Algebra, space: HermitianSpace, left_action, right_action, tol: Tolerance = DEFAULT_TOL) -> Bimodule:
    if not isinstance(left_action, Bilinear):
        left_action = Bilinear(A.space, space, space, left_action)
    if not isinstance(right_action, Bilinear):
        right_action = Bilinear(space, B.space, space, right_action)
    M = Bimodule(A, B, space, left_action, right_action)
    for check in bimodule_checks(M, tol).checks:
        if not check.passed:
            raise _ERRORS[check.name](
                f"{check.name} fails with residual {check.residual:.3g}",
                residual=check.residual,
                witness=check.witness,
            )
    return M


def regular_bimodule(A: Algebra) -> Bimodule:
    return Bimodule(A, A, A.space, A.mult, A.mult)


def hom_bimodule(n: int, m: int) -> Bimodule:
    """``Hom(C^m, C^n)`` as an ``End(C^n)``-``End(C^m)`` bimodule by composition.

    Coordinates: ``X[a, b]`` at index ``a * m + b``; Hilbert-Schmidt metric.
    """
    from .algebra import matrix_algebra

    A = matrix_algebra(n)
    B = matrix_algebra(m)
    space = HermitianSpace(n * m)
    L = np.zeros((n * m, n * n, n * m), dtype=complex)
    for a in range(n):
        for b in range(n):
            for d in range(m):
                L[a * m + d, a * n + b, b * m + d] = 1.0
    R = np.zeros((n * m, n * m, m * m), dtype=complex)
    for a in range(n):
        for b in range(m):
            for d in range(m):
                R[a * m + d, a * m + b, b * m + d] = 1.0
    return Bimodule(A, B, space, Bilinear(A.space, space, space, L), Bilinear(space, B.space, space, R))


def bimodule_direct_sum(M: Bimodule, N: Bimodule) -> Bimodule:
    """``M (+) N`` over the algebras of ``M`` (the algebras must agree)."""
    n, m = M.dim, N.dim
    gram = np.zeros((n + m, n + m), dtype=complex)
    gram[:n, :n] = M.space.gram
    gram[n:, n:] = N.space.gram
    space = HermitianSpace(n + m, gram)
    A, B = M.left_alg, M.right_alg
    L = np.zeros((n + m, A.dim, n + m), dtype=complex)
    L[:n, :, :n] = M.left_action.coeffs
    L[n:, :, n:] = N.left_action.coeffs
    R = np.zeros((n + m, n + m, B.dim), dtype=complex)
    R[:n, :n, :] = M.right_action.coeffs
    R[n:, n:, :] = N.right_action.coeffs
    return Bimodule(A, B, space, Bilinear(A.space, space, space, L), Bilinear(space, B.space, space, R))


@dataclass(frozen=True, eq=False)
class BalancedTensor:
    """``M (x)_B N`` with the projection from ``M (x) N`` onto the quotient."""

    bimodule: Bimodule
    projection: LinMap
    relation_rank: int

    @property
    def inclusion(self) -> LinMap:
        return adjoint(self.projection)


def balanced_tensor(M: Bimodule, N: Bimodule, tol: Tolerance = DEFAULT_TOL) -> BalancedTensor:
    if not M.right_alg.same_structure(N.left_alg, tol):
        raise MiddleMismatch("right algebra of the first factor differs from left algebra of the second")
    B = M.right_alg
    m, b, n = M.dim, B.dim, N.dim
    V = tensor_space(M.space, N.space)
    RM = M.right_action.coeffs  # [m', m, b]
    LN = N.left_action.coeffs  # [n', b, n]
    # relation (m_p b_r) (x) n_q - m_p (x) (b_r n_q), one column per (p, r, q)
    first = np.einsum("xpr,yq->xyprq", RM, np.eye(n))
    second = np.einsum("xp,yrq->xyprq", np.eye(m), LN)
    rel = (first - second).reshape(m * n, m * b * n)
    Q, P = quotient_by(V, rel, tol)
    rank = V.dim - Q.dim
    K = adjoint(P).coeffs  # Q -> V
    Pc = P.coeffs.reshape(Q.dim, m, n)
    Kc = K.reshape(m, n, Q.dim)
    A, C = M.left_alg, N.right_alg
    # a . [x (x) y] = [(a x) (x) y]
    left = np.einsum("qxy,xap,pys->qas", Pc, M.left_action.coeffs, Kc, optimize=True)
    right = np.einsum("qxy,ysc,xsr->qrc", Pc, N.right_action.coeffs, Kc, optimize=True)
    T = Bimodule(A, C, Q, Bilinear(A.space, Q, Q, left), Bilinear(Q, C.space, Q, right))
    return BalancedTensor(T, P, rank)


def tensor_over(M: Bimodule, N: Bimodule, tol: Tolerance = DEFAULT_TOL) -> Bimodule:
    return balanced_tensor(M, N, tol).bimodule


def _commutant_dim(ops, dim, tol):
    """Dimension of ``{T in End(C^dim): T X = X T for all X in ops}``."""
    if dim == 0:
        return 0
    eye = np.eye(dim)
    # row-major vec: vec(T X) = (I (x) X^T) vec T, vec(X T) = (X (x) I) vec T
    rows = [np.kron(eye, X.T) - np.kron(X, eye) for X in ops]
    if not rows:
        return dim * dim
    cons = np.vstack(rows)
    sp = HermitianSpace(dim * dim)
    rank, _ = rank_and_kernel(LinMap(sp, HermitianSpace(cons.shape[0]), cons), tol)
    return dim * dim - rank


def _rank(mat, tol):
    if mat.size == 0:
        return 0
    s = np.linalg.svd(mat, compute_uv=False)
    return int(np.sum(s > tol.abs_tol * max(1.0, float(s[0]))))


def is_faithfully_balanced(M: Bimodule, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Both ``A -> End_B(M)`` and ``B -> End_A(M)^op`` are bijective."""
    A, B = M.left_alg, M.right_alg
    d = M.dim
    lops = [M.left_operator(np.eye(A.dim)[p]) for p in range(A.dim)]
    rops = [M.right_operator(np.eye(B.dim)[p]) for p in range(B.dim)]
    end_B = _commutant_dim(rops, d, tol)
    end_A = _commutant_dim(lops, d, tol)
    rank_A = _rank(np.column_stack([X.reshape(-1) for X in lops]), tol) if lops else 0
    rank_B = _rank(np.column_stack([X.reshape(-1) for X in rops]), tol) if rops else 0
    return rank_A == A.dim == end_B and rank_B == B.dim == end_A


def joint_action_matrix(M: Bimodule) -> np.ndarray:
    """Matrix of ``a (x) b -> (m -> a m b)``; rows ``(out, m)``, columns ``(a, b)``."""
    L = M.left_action.coeffs
    R = M.right_action.coeffs
    t = np.einsum("kjb,jam->kmab", R, L)
    return t.reshape(M.dim * M.dim, M.left_alg.dim * M.right_alg.dim)


def is_invertible(M: Bimodule, tol: Tolerance = DEFAULT_TOL) -> bool:
    A, B = M.left_alg, M.right_alg
    if not (is_simple(A, tol) and is_simple(B, tol)):
        raise NotSimpleAlgebras("invertibility test needs simple algebras on both sides")
    if M.dim * M.dim != A.dim * B.dim:
        return False
    return _rank(joint_action_matrix(M), tol) == M.dim * M.dim


def conjugate_dual(M: Bimodule) -> Bimodule:
    """The ``B``-``A`` bimodule on the conjugate space: ``b . m = conj(m b^*)``,
    ``m . a = conj(a^* m)``.  Needs involutions on both algebras."""
    A, B = M.left_alg, M.right_alg
    if A.involution is None or B.involution is None:
        raise ValueError("conjugate dual needs involutions on both algebras")
    SA = A.involution.coeffs
    SB = B.involution.coeffs
    space = M.space.conjugate()
    left = np.einsum("kpr,rb->kbp", M.right_action.coeffs.conj(), SB.conj())
    right = np.einsum("krp,ra->kpa", M.left_action.coeffs.conj(), SA.conj())
    return Bimodule(B, A, space, Bilinear(B.space, space, space, left), Bilinear(space, A.space, space, right))


def scalar_bimodule(dim: int = 1) -> Bimodule:
    C = scalar_algebra()
    space = HermitianSpace(dim)
    act = np.zeros((dim, 1, dim), dtype=complex)
    act[:, 0, :] = np.eye(dim)
    ract = np.zeros((dim, dim, 1), dtype=complex)
    ract[:, :, 0] = np.eye(dim)
    return Bimodule(C, C, space, Bilinear(C.space, space, space, act), Bilinear(space, C.space, space, ract))
