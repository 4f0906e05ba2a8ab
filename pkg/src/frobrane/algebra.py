"""Finite-dimensional unital associative algebras over C.

An algebra is a metric space plus structure constants ``c[k, p, q]`` with
``e_p e_q = sum_k c[k, p, q] e_k``.  Involution and trace are optional.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    BadInvolution,
    BadTrace,
    Degenerate,
    ExtractionFailed,
    NoUnit,
    NotAssociative,
    NotInvariant,
    NotSimple,
    NotSymmetric,
)
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
    rank_and_kernel,
)
from .report import AxiomReport

__all__ = [
    "Algebra",
    "FrobeniusForm",
    "IrreducibleModule",
    "make_algebra",
    "algebra_checks",
    "matrix_algebra",
    "scalar_algebra",
    "direct_sum",
    "group_algebra_z2",
    "is_simple",
    "irreducible_module",
    "check_frobenius",
    "solve_unit",
    "left_mult",
    "right_mult",
]


@dataclass(frozen=True, eq=False)
class Algebra:
    space: HermitianSpace
    mult: Bilinear
    unit: np.ndarray
    involution: Optional[ConjLinMap] = None
    trace: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "unit", frozen(self.unit))
        if self.trace is not None:
            object.__setattr__(self, "trace", frozen(self.trace))

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def c(self) -> np.ndarray:
        return self.mult.coeffs

    def mul(self, a, b):
        return self.mult(a, b)

    def star(self, a):
        return self.involution(a)

    def theta(self, a) -> complex:
        return complex(self.trace @ as_complex(a))

    def same_structure(self, other: "Algebra", tol: Tolerance = DEFAULT_TOL) -> bool:
        if self.dim != other.dim:
            return False
        return max_gap(self.c, other.c)[0] <= tol.bound(1.0) and max_gap(self.unit, other.unit)[0] <= tol.bound(1.0)


def left_mult(A: Algebra, a):
    """Matrix of ``x -> a x``."""
    return A.mult.left_operator(a)


def right_mult(A: Algebra, a):
    """Matrix of ``x -> x a``."""
    return A.mult.right_operator(a)


def solve_unit(c: np.ndarray):
    """Least-squares left unit for structure constants ``c``: ``u e_p = e_p``.

    Returns ``(u, residual)`` where the residual covers both unit laws.
    """
    n = c.shape[0]
    if n == 0:
        return np.zeros(0, dtype=complex), 0.0
    # rows indexed (k, p), unknowns a: sum_a u_a c[k, a, p] = delta_kp
    system = c.transpose(0, 2, 1).reshape(n * n, n)
    rhs = np.eye(n, dtype=complex).reshape(n * n)
    u, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    left = np.einsum("kap,a->kp", c, u)
    right = np.einsum("kpa,a->kp", c, u)
    eye = np.eye(n)
    res = max(float(np.abs(left - eye).max()), float(np.abs(right - eye).max()))
    return u, res


def algebra_checks(A: Algebra, tol: Tolerance = DEFAULT_TOL, prefix="") -> AxiomReport:
    """Evaluate every algebra invariant on the basis and report residuals."""
    rep = AxiomReport()
    n = A.dim
    c = A.c
    eye = np.eye(n)
    left = np.einsum("kap,a->kp", c, A.unit)
    right = np.einsum("kpa,a->kp", c, A.unit)
    r1 = max_gap(left, eye)
    r2 = max_gap(right, eye)
    worst = r1 if r1[0] >= r2[0] else r2
    rep.record(prefix + "unit", worst[0], tol.bound(1.0), worst[1])
    res, idx, scale = assoc_residual(c, c, c, c)
    rep.record(prefix + "associative", res, tol.bound(scale), idx)
    if A.involution is not None:
        S = A.involution.coeffs
        r = max_gap(S @ S.conj(), eye)
        rep.record(prefix + "involution.involutive", r[0], tol.bound(1.0), r[1])
        r = max_gap(S @ A.unit.conj(), A.unit)
        rep.record(prefix + "involution.unital", r[0], tol.bound(r[2]), r[1])
        # (e_p e_q)^* = e_q^* e_p^*
        lhs = np.einsum("am,mpq->apq", S, c.conj())
        rhs = np.einsum("amn,mq,np->apq", c, S, S)
        r = max_gap(lhs, rhs)
        rep.record(prefix + "involution.antimultiplicative", r[0], tol.bound(r[2]), r[1])
    if A.trace is not None and A.involution is not None:
        r = max_gap(A.trace @ A.involution.coeffs, A.trace.conj())
        rep.record(prefix + "trace.star", r[0], tol.bound(r[2]), r[1])
    return rep


_ERRORS = {
    "unit": NoUnit,
    "associative": NotAssociative,
    "involution.involutive": BadInvolution,
    "involution.unital": BadInvolution,
    "involution.antimultiplicative": BadInvolution,
    "trace.star": BadTrace,
}


def make_algebra(space, mult, unit=None, involution=None, trace=None, tol: Tolerance = DEFAULT_TOL) -> Algebra:
    """Build an algebra, verifying every invariant; raises on the first failure.

    ``mult`` may be a :class:`Bilinear` or a raw ``c[k, p, q]`` array;
    ``involution`` a :class:`ConjLinMap` or its coefficient matrix.
    """
    if not isinstance(mult, Bilinear):
        mult = Bilinear(space, space, space, mult)
    if involution is not None and not isinstance(involution, ConjLinMap):
        involution = ConjLinMap(space, space, involution)
    if unit is None:
        unit, res = solve_unit(mult.coeffs)
        if res > tol.bound(1.0):
            raise NoUnit(f"no two-sided unit (residual {res:.3g})", residual=res)
    A = Algebra(space, mult, unit, involution, None if trace is None else as_complex(trace))
    for check in algebra_checks(A, tol).checks:
        if not check.passed:
            raise _ERRORS[check.name](
                f"{check.name} fails with residual {check.residual:.3g}",
                residual=check.residual,
                witness=check.witness,
            )
    return A


def matrix_algebra(n: int) -> Algebra:
    """Full matrix algebra; ``E_ab`` at index ``a * n + b``, Hilbert-Schmidt metric."""
    if n < 1:
        raise ValueError("matrix size must be positive")
    N = n * n
    c = np.zeros((N, N, N), dtype=complex)
    for a in range(n):
        for b in range(n):
            for d in range(n):
                c[a * n + d, a * n + b, b * n + d] = 1.0
    space = HermitianSpace(N)
    swap = np.zeros((N, N))
    for a in range(n):
        for b in range(n):
            swap[b * n + a, a * n + b] = 1.0
    unit = np.eye(n).reshape(N)
    return Algebra(
        space,
        Bilinear(space, space, space, c),
        unit,
        ConjLinMap(space, space, swap),
        np.eye(n).reshape(N).astype(complex),
    )


def scalar_algebra() -> Algebra:
    return matrix_algebra(1)


def direct_sum(A: Algebra, B: Algebra) -> Algebra:
    """Block direct sum; involution and trace kept when both summands carry them."""
    n, m = A.dim, B.dim
    c = np.zeros((n + m,) * 3, dtype=complex)
    c[:n, :n, :n] = A.c
    c[n:, n:, n:] = B.c
    gram = np.zeros((n + m, n + m), dtype=complex)
    gram[:n, :n] = A.space.gram
    gram[n:, n:] = B.space.gram
    space = HermitianSpace(n + m, gram)
    inv = None
    if A.involution is not None and B.involution is not None:
        S = np.zeros((n + m, n + m), dtype=complex)
        S[:n, :n] = A.involution.coeffs
        S[n:, n:] = B.involution.coeffs
        inv = ConjLinMap(space, space, S)
    trace = None
    if A.trace is not None and B.trace is not None:
        trace = np.concatenate([A.trace, B.trace])
    return Algebra(space, Bilinear(space, space, space, c), np.concatenate([A.unit, B.unit]), inv, trace)


def group_algebra_z2() -> Algebra:
    """C[Z/2] on the basis (1, g)."""
    c = np.zeros((2, 2, 2), dtype=complex)
    c[0, 0, 0] = c[1, 0, 1] = c[1, 1, 0] = c[0, 1, 1] = 1.0
    space = HermitianSpace(2)
    return Algebra(space, Bilinear(space, space, space, c), np.array([1.0, 0.0]), ConjLinMap(space, space, np.eye(2)))


def sandwich_matrix(A: Algebra) -> np.ndarray:
    """Matrix of ``a (x) b -> (x -> a x b)`` from ``A (x) A`` into ``End(A)``.

    Rows are indexed ``(out, x)``, columns ``(a, b)``.
    """
    c = A.c
    n = A.dim
    # (e_a e_x) e_b = sum_m c[m, a, x] c[:, m, b]
    t = np.einsum("max,kmb->kxab", c, c)
    return t.reshape(n * n, n * n)


def is_simple(A: Algebra, tol: Tolerance = DEFAULT_TOL) -> bool:
    n = A.dim
    if n == 0:
        return False
    s = np.linalg.svd(sandwich_matrix(A), compute_uv=False)
    cutoff = tol.abs_tol * max(1.0, float(s[0]))
    return int(np.sum(s > cutoff)) == n * n


@dataclass(frozen=True, eq=False)
class IrreducibleModule:
    """Left ideal ``F`` of ``A`` with the induced action ``A (x) F -> F``.

    ``basis`` holds the ideal's basis as columns in ``A``-coordinates.
    """

    algebra: Algebra
    space: HermitianSpace
    action: Bilinear
    basis: np.ndarray
    seed: int
    residual: float

    @property
    def dim(self) -> int:
        return self.space.dim


def representation_matrix(action: Bilinear) -> np.ndarray:
    """Matrix of ``A -> End(F)``; column ``p`` is the flattened operator of ``e_p``."""
    c = action.coeffs
    return c.transpose(0, 2, 1).reshape(c.shape[0] * c.shape[2], c.shape[1])


def _eigen_clusters(vals, size):
    """Group eigenvalues into clusters of nearest neighbours of the given size."""
    order = list(range(len(vals)))
    clusters = []
    while order:
        i = order[0]
        dist = sorted(order, key=lambda j: abs(vals[j] - vals[i]))
        take = dist[:size]
        clusters.append(take)
        order = [j for j in order if j not in take]
    return clusters


def irreducible_module(A: Algebra, seed: int = 0, tol: Tolerance = DEFAULT_TOL, retries: int = 8) -> IrreducibleModule:
    """Extract an irreducible left module of a simple algebra.

    An eigenspace of right multiplication by a generic element is a left ideal;
    for ``A = C^{n x n}`` each eigenspace has dimension ``n``.
    """
    if not is_simple(A, tol):
        raise NotSimple("algebra is not simple")
    N = A.dim
    n = int(round(np.sqrt(N)))
    if n * n != N:
        raise NotSimple(f"simple algebra of non-square dimension {N}")
    eye_n = np.eye(n)
    for attempt in range(retries):
        rng = np.random.default_rng(seed + attempt)
        a = rng.standard_normal(N) + 1j * rng.standard_normal(N)
        Ra = right_mult(A, a)
        vals = np.linalg.eigvals(Ra)
        # the spectrum of a generic right multiplication consists of n clusters of size n
        cluster = _eigen_clusters(vals, n)[0]
        lam = complex(np.mean(vals[cluster]))
        spread = max(abs(vals[j] - lam) for j in cluster)
        gaps = [abs(v - lam) for j, v in enumerate(vals) if j not in cluster]
        if gaps and min(gaps) < 1e3 * (spread + 1e-12):
            continue
        _, s, vh = np.linalg.svd(Ra - lam * np.eye(N))
        basis = vh[N - n:].conj().T
        # Rayleigh refinement: re-centre the eigenvalue on the found subspace and recompute
        proj = np.linalg.lstsq(basis, Ra @ basis, rcond=None)[0]
        lam = complex(np.trace(proj) / n)
        _, s, vh = np.linalg.svd(Ra - lam * np.eye(N))
        if n < N and s[N - n - 1] < 1e-6 * max(1.0, s[0]):
            continue
        basis = vh[N - n:].conj().T
        sub = HermitianSpace(n, basis.conj().T @ A.space.gram @ basis, A.space.tol)
        basis = basis @ orthonormal_frame(sub).coeffs
        F = HermitianSpace(n)
        # action[k, p, q]: coordinates of e_p * f_q in the orthonormal basis of F
        images = np.einsum("kpm,mq->kpq", A.c, basis)
        coords = np.einsum("mk,mn,npq->kpq", basis.conj(), A.space.gram, images)
        leak = float(np.abs(np.einsum("mk,kpq->mpq", basis, coords) - images).max())
        action = Bilinear(A.space, F, F, coords)
        unit_res = float(np.abs(np.einsum("kpq,p->kq", coords, A.unit) - eye_n).max())
        rank = np.linalg.matrix_rank(representation_matrix(action), tol=1e-8)
        residual = max(leak, unit_res)
        if rank == N and residual <= tol.bound(1.0) * 1e3:
            return IrreducibleModule(A, F, action, basis, seed + attempt, residual)
    raise ExtractionFailed(f"no irreducible module found after {retries} draws")


@dataclass(frozen=True, eq=False)
class FrobeniusForm:
    algebra: Algebra
    sigma: np.ndarray
    report: AxiomReport

    @property
    def min_singular_value(self) -> float:
        return float(np.linalg.svd(self.sigma, compute_uv=False).min())

    def __call__(self, v, w):
        return complex(as_complex(v) @ self.sigma @ as_complex(w))


def frobenius_checks(A: Algebra, tol: Tolerance = DEFAULT_TOL, prefix=""):
    S = A.involution.coeffs
    # sigma(v, w) = <v^*, w> = v^T S^H G w
    sigma = S.conj().T @ A.space.gram
    rep = AxiomReport()
    r = max_gap(sigma, sigma.T)
    rep.record(prefix + "frobenius.symmetric", r[0], tol.bound(r[2]), r[1])
    lhs = np.einsum("kpq,kr->pqr", A.c, sigma)
    rhs = np.einsum("pk,kqr->pqr", sigma, A.c)
    r = max_gap(lhs, rhs)
    rep.record(prefix + "frobenius.invariant", r[0], tol.bound(r[2]), r[1])
    smin = float(np.linalg.svd(sigma, compute_uv=False).min()) if A.dim else 0.0
    rep.record(
        prefix + "frobenius.nondegenerate",
        max(0.0, tol.psd_floor - smin),
        0.0,
        detail=f"smallest singular value {smin:.6g}",
    )
    if A.trace is not None:
        r = max_gap(A.trace, sigma @ A.unit)
        r2 = max_gap(A.trace, A.unit.conj() @ A.space.gram)
        worst = r if r[0] >= r2[0] else r2
        rep.record(prefix + "frobenius.trace", worst[0], tol.bound(worst[2]), worst[1])
    return sigma, rep


def check_frobenius(A: Algebra, tol: Tolerance = DEFAULT_TOL) -> FrobeniusForm:
    """Certify ``sigma(v, w) = <v^*, w>`` as a symmetric invariant nondegenerate form."""
    if A.involution is None:
        raise BadInvolution("Frobenius certification needs an involution")
    sigma, rep = frobenius_checks(A, tol)
    errs = {
        "frobenius.symmetric": NotSymmetric,
        "frobenius.invariant": NotInvariant,
        "frobenius.nondegenerate": Degenerate,
        "frobenius.trace": BadTrace,
    }
    for check in rep.checks:
        if not check.passed:
            raise errs[check.name](
                f"{check.name} fails (residual {check.residual:.3g}) {check.detail}".strip(),
                residual=check.residual,
                witness=check.witness,
            )
    return FrobeniusForm(A, sigma, rep)
