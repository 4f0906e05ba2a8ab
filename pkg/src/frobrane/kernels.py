"""Hot contraction kernels shared by every axiom check.

Almost all structure checks in this package reduce to comparing two ways of
composing a pair of bilinear maps. With coefficient tensors laid out as
``c[out, left, right]`` we need

    contract_left(f, g)[a, p, q, r]  = sum_k f[a, k, r] * g[k, p, q]   # f(g(p, q), r)
    contract_right(f, g)[a, p, q, r] = sum_k f[a, p, k] * g[k, q, r]   # f(p, g(q, r))

and the largest entrywise gap between a left and a right composite.  Each has a
numba implementation (fused, never materialising the 4-index tensors) and a
numpy implementation; ``assoc_residual`` dispatches on ``_accel.USE_NUMBA``.
"""

import numpy as np

from . import _accel
from ._accel import njit

__all__ = [
    "contract_left",
    "contract_right",
    "assoc_residual",
    "assoc_residual_numpy",
    "assoc_residual_numba",
]


def contract_left(f, g):
    return np.tensordot(g, f, axes=([0], [1])).transpose(2, 0, 1, 3)


def contract_right(f, g):
    return np.tensordot(f, g, axes=([2], [0]))


def assoc_residual_numpy(f1, g1, f2, g2):
    """Return ``(residual, index, scale)`` comparing f1(g1(p,q),r) with f2(p,g2(q,r))."""
    lhs = contract_left(f1, g1)
    rhs = contract_right(f2, g2)
    if lhs.shape != rhs.shape:
        raise ValueError(f"composite shapes differ: {lhs.shape} vs {rhs.shape}")
    if lhs.size == 0:
        return 0.0, (), 0.0
    diff = np.abs(lhs - rhs)
    flat = int(np.argmax(diff))
    scale = max(float(np.abs(lhs).max()), float(np.abs(rhs).max()))
    index = tuple(int(i) for i in np.unravel_index(flat, diff.shape))
    return float(diff.flat[flat]), index, scale


@njit
def _assoc_loops(f1, g1, f2, g2):
    # one (p, q) slice at a time; zero coefficients are skipped, which makes the
    # sparse composition tensors met in practice roughly one power cheaper
    na = f1.shape[0]
    npp = g1.shape[1]
    nq = g1.shape[2]
    nr = f1.shape[2]
    nk1 = g1.shape[0]
    nk2 = g2.shape[0]
    lhs = np.zeros((na, nr), dtype=np.complex128)
    rhs = np.zeros((na, nr), dtype=np.complex128)
    worst = 0.0
    scale = 0.0
    wa = 0
    wp = 0
    wq = 0
    wr = 0
    for p in range(npp):
        for q in range(nq):
            lhs[:, :] = 0.0
            rhs[:, :] = 0.0
            for k in range(nk1):
                g = g1[k, p, q]
                if g != 0:
                    for a in range(na):
                        for r in range(nr):
                            lhs[a, r] += f1[a, k, r] * g
            for a in range(na):
                for k in range(nk2):
                    f = f2[a, p, k]
                    if f != 0:
                        for r in range(nr):
                            rhs[a, r] += f * g2[k, q, r]
            # squared magnitudes; square roots are taken once at the end
            for a in range(na):
                for r in range(nr):
                    x = lhs[a, r]
                    y = rhs[a, r]
                    dr = x.real - y.real
                    di = x.imag - y.imag
                    d = dr * dr + di * di
                    if d > worst:
                        worst = d
                        wa = a
                        wp = p
                        wq = q
                        wr = r
                    m = max(x.real * x.real + x.imag * x.imag, y.real * y.real + y.imag * y.imag)
                    if m > scale:
                        scale = m
    return np.sqrt(worst), wa, wp, wq, wr, np.sqrt(scale)


def assoc_residual_numba(f1, g1, f2, g2):
    f1, g1, f2, g2 = (np.ascontiguousarray(x, dtype=np.complex128) for x in (f1, g1, f2, g2))
    shape = (f1.shape[0], g1.shape[1], g1.shape[2], f1.shape[2])
    other = (f2.shape[0], f2.shape[1], g2.shape[1], g2.shape[2])
    if shape != other or g1.shape[0] != f1.shape[1] or g2.shape[0] != f2.shape[2]:
        raise ValueError(f"composite shapes differ: {shape} vs {other}")
    if 0 in shape:
        return 0.0, (), 0.0
    worst, a, p, q, r, scale = _assoc_loops(f1, g1, f2, g2)
    return float(worst), (a, p, q, r), float(scale)


def assoc_residual(f1, g1, f2, g2):
    if _accel.USE_NUMBA:
        return assoc_residual_numba(f1, g1, f2, g2)
    return assoc_residual_numpy(f1, g1, f2, g2)
