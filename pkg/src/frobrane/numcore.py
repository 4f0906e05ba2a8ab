"""Metric-carrying vector spaces and the maps between them.

Coordinates are complex numpy vectors.  A space never assumes an orthonormal
basis: the inner product is ``<v, w> = v^H G w`` with ``G`` the Gram matrix,
conjugate-linear in the first slot.
"""

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import FactorizationFailure, InvalidMetric, ShapeMismatch

__all__ = [
    "Tolerance",
    "HermitianSpace",
    "LinMap",
    "ConjLinMap",
    "Bilinear",
    "tensor_space",
    "adjoint",
    "orthonormal_frame",
    "quotient_by",
    "rank_and_kernel",
    "approx_eq",
    "as_complex",
    "frozen",
]


def as_complex(x):
    return np.asarray(x, dtype=np.complex128)


def frozen(x):
    a = np.array(x, dtype=np.complex128, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    psd_floor: float = 1e-8

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "psd_floor"):
            val = getattr(self, name)
            if not np.isfinite(val) or val < 0:
                raise ValueError(f"{name} must be finite and nonnegative, got {val!r}")
        if self.psd_floor <= 0:
            raise ValueError("psd_floor must be positive")

    @classmethod
    def from_env(cls, **overrides):
        """Defaults, with ``FROBRANE_TOL`` replacing both abs_tol and rel_tol."""
        raw = os.environ.get("FROBRANE_TOL")
        kwargs = {}
        if raw:
            val = float(raw)
            kwargs.update(abs_tol=val, rel_tol=val)
        kwargs.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**kwargs)

    def bound(self, scale=0.0) -> float:
        return self.abs_tol + self.rel_tol * float(scale)


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True, eq=False)
class HermitianSpace:
    dim: int
    gram: np.ndarray = None
    tol: Tolerance = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        dim = int(self.dim)
        if dim < 0:
            raise InvalidMetric(f"dimension must be nonnegative, got {dim}")
        object.__setattr__(self, "dim", dim)
        gram = np.eye(dim) if self.gram is None else self.gram
        gram = frozen(gram)
        if gram.shape != (dim, dim):
            raise ShapeMismatch(f"gram has shape {gram.shape}, expected {(dim, dim)}")
        if dim and self.gram is not None:
            herm = float(np.abs(gram - gram.conj().T).max())
            if herm > self.tol.bound(np.abs(gram).max()):
                raise InvalidMetric("gram matrix is not hermitian", residual=herm)
            low = float(np.linalg.eigvalsh(gram).min())
            if low < self.tol.psd_floor:
                raise InvalidMetric(
                    f"gram matrix is not positive-definite (min eigenvalue {low:.3g})",
                    residual=low,
                )
        object.__setattr__(self, "gram", gram)

    def inner(self, v, w):
        return complex(as_complex(v).conj() @ self.gram @ as_complex(w))

    def norm(self, v) -> float:
        return float(np.sqrt(max(self.inner(v, v).real, 0.0)))

    def conjugate(self) -> "HermitianSpace":
        """The complex-conjugate space, in conjugated coordinates."""
        return HermitianSpace(self.dim, self.gram.conj(), self.tol)

    def same_as(self, other: "HermitianSpace", tol: Tolerance = DEFAULT_TOL) -> bool:
        return self.dim == other.dim and approx_eq(self.gram, other.gram, tol)

    def __repr__(self):
        return f"HermitianSpace(dim={self.dim})"


def _check_shape(coeffs, shape, what):
    if coeffs.shape != shape:
        raise ShapeMismatch(f"{what} has shape {coeffs.shape}, expected {shape}")


@dataclass(frozen=True, eq=False)
class LinMap:
    src: HermitianSpace
    dst: HermitianSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = frozen(self.coeffs)
        _check_shape(c, (self.dst.dim, self.src.dim), "linear map")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, v):
        return self.coeffs @ as_complex(v)

    def __matmul__(self, other):
        if isinstance(other, ConjLinMap):
            return ConjLinMap(other.src, self.dst, self.coeffs @ other.coeffs)
        return LinMap(other.src, self.dst, self.coeffs @ other.coeffs)

    @classmethod
    def identity(cls, space):
        return cls(space, space, np.eye(space.dim))


@dataclass(frozen=True, eq=False)
class ConjLinMap:
    """Antilinear map ``v -> coeffs @ conj(v)``."""

    src: HermitianSpace
    dst: HermitianSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = frozen(self.coeffs)
        _check_shape(c, (self.dst.dim, self.src.dim), "conjugate-linear map")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, v):
        return self.coeffs @ as_complex(v).conj()

    def __matmul__(self, other):
        # antilinear after antilinear is linear, antilinear after linear is antilinear
        if isinstance(other, ConjLinMap):
            return LinMap(other.src, self.dst, self.coeffs @ other.coeffs.conj())
        return ConjLinMap(other.src, self.dst, self.coeffs @ other.coeffs.conj())


@dataclass(frozen=True, eq=False)
class Bilinear:
    """Bilinear map ``left x right -> out`` with ``coeffs[k, p, q]``."""

    left: HermitianSpace
    right: HermitianSpace
    out: HermitianSpace
    coeffs: np.ndarray

    def __post_init__(self):
        c = frozen(self.coeffs)
        _check_shape(c, (self.out.dim, self.left.dim, self.right.dim), "bilinear map")
        object.__setattr__(self, "coeffs", c)

    def __call__(self, x, y):
        return np.einsum("kpq,p,q->k", self.coeffs, as_complex(x), as_complex(y))

    def left_operator(self, x):
        """Matrix of ``y -> self(x, y)``."""
        return np.einsum("kpq,p->kq", self.coeffs, as_complex(x))

    def right_operator(self, y):
        """Matrix of ``x -> self(x, y)``."""
        return np.einsum("kpq,q->kp", self.coeffs, as_complex(y))

    def as_linear(self) -> LinMap:
        """The induced linear map on ``left (x) right`` (row-major basis)."""
        src = tensor_space(self.left, self.right)
        return LinMap(src, self.out, self.coeffs.reshape(self.out.dim, -1))


def tensor_space(V: HermitianSpace, W: HermitianSpace) -> HermitianSpace:
    """Tensor product; basis vector ``e_p (x) f_q`` sits at index ``p * W.dim + q``."""
    return HermitianSpace(V.dim * W.dim, np.kron(V.gram, W.gram), V.tol)


def adjoint(f: LinMap) -> LinMap:
    g_src = f.src.gram
    coeffs = np.linalg.solve(g_src, f.coeffs.conj().T @ f.dst.gram) if f.src.dim else np.zeros((0, f.dst.dim))
    return LinMap(f.dst, f.src, coeffs)


def orthonormal_frame(V: HermitianSpace) -> LinMap:
    """Map ``u`` from the standard space onto an orthonormal basis of ``V``.

    With ``gram = L L^H`` (``L`` lower triangular), ``u = L^{-H}``.
    """
    std = HermitianSpace(V.dim)
    if V.dim == 0:
        return LinMap(std, V, np.zeros((0, 0)))
    try:
        low = np.linalg.cholesky(V.gram)
    except np.linalg.LinAlgError as exc:
        raise FactorizationFailure(f"gram is not positive-definite: {exc}") from exc
    if float(np.abs(np.diag(low)).min()) ** 2 < V.tol.psd_floor * 1e-4:
        raise FactorizationFailure("gram is numerically singular")
    u = np.linalg.inv(low).conj().T
    return LinMap(std, V, u)


def _numerical_rank(s, tol):
    if s.size == 0:
        return 0
    cutoff = tol.abs_tol * max(1.0, float(s[0]))
    return int(np.sum(s > cutoff))


def rank_and_kernel(f: LinMap, tol: Tolerance = DEFAULT_TOL):
    """Numerical rank and an orthonormal (w.r.t. ``f.src``) kernel basis."""
    n = f.src.dim
    if f.dst.dim == 0 or n == 0:
        rank = 0
        kern = np.eye(n, dtype=complex)
    else:
        # vh is already square when dst is at least as large as src
        _, s, vh = np.linalg.svd(f.coeffs, full_matrices=f.dst.dim < n)
        rank = _numerical_rank(s, tol)
        kern = vh[rank:].conj().T
    if kern.shape[1]:
        sub = HermitianSpace(kern.shape[1], kern.conj().T @ f.src.gram @ kern, f.src.tol)
        kern = kern @ orthonormal_frame(sub).coeffs
    return rank, [kern[:, j].copy() for j in range(kern.shape[1])]


def quotient_by(V: HermitianSpace, spanners, tol: Tolerance = DEFAULT_TOL):
    """Realise ``V / span(spanners)`` as the orthogonal complement of the span.

    Returns ``(Q, P)`` with ``P: V -> Q`` the orthogonal projection.  The basis
    of ``Q`` is orthonormal for the restricted metric, so ``adjoint(P)`` is the
    isometric inclusion ``Q -> V``.
    """
    S = as_complex(spanners)
    if S.size == 0:
        return V, LinMap.identity(V)
    if S.ndim == 1:
        S = S[:, None]
    if S.shape[0] != V.dim:
        # accept a list of vectors as rows
        if S.shape[1] == V.dim:
            S = S.T
        else:
            raise ShapeMismatch(f"spanners of length {S.shape[0]} do not live in dim {V.dim}")
    # x is orthogonal to span(S) iff S^H G x = 0
    constraint = LinMap(V, HermitianSpace(S.shape[1]), S.conj().T @ V.gram)
    _, kern = rank_and_kernel(constraint, tol)
    K = np.column_stack(kern) if kern else np.zeros((V.dim, 0), dtype=complex)
    Q = HermitianSpace(K.shape[1], K.conj().T @ V.gram @ K, V.tol)
    # K is G-orthonormal, so the projection coordinates are K^H G v
    P = LinMap(V, Q, K.conj().T @ V.gram)
    return Q, P


def approx_eq(a, b, tol: Tolerance = DEFAULT_TOL) -> bool:
    a = as_complex(a)
    b = as_complex(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return True
    scale = max(float(np.abs(a).max()), float(np.abs(b).max()))
    return float(np.abs(a - b).max()) <= tol.bound(scale)


def max_gap(a, b):
    """``(max |a - b|, argmax index, max(|a|, |b|))``, for report residuals."""
    a = as_complex(a)
    b = as_complex(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return 0.0, (), 0.0
    d = np.abs(a - b)
    flat = int(np.argmax(d))
    scale = max(float(np.abs(a).max()), float(np.abs(b).max()))
    return float(d.flat[flat]), tuple(int(i) for i in np.unravel_index(flat, d.shape)), scale
