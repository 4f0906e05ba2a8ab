"""Transgression and regression at a point, and the two round trips."""

from dataclasses import dataclass
from typing import Dict

import numpy as np

from .algebra import Algebra, IrreducibleModule, irreducible_module, scalar_algebra
from .bimodule import Bimodule, balanced_tensor
from .errors import InternalInconsistency, NoIntertwiner, NotIso, NotSimple
from .lbg import LBGPointObject, induced_bimodule, induced_frobenius, make_lbg
from .numcore import DEFAULT_TOL, Bilinear, HermitianSpace, LinMap, Tolerance, max_gap
from .report import AxiomReport

__all__ = [
    "BraneFamily",
    "RegressionData",
    "RoundTrip",
    "make_branes",
    "random_branes",
    "transgress",
    "regress",
    "roundtrip_RT",
    "roundtrip_TR",
]


@dataclass(frozen=True, eq=False)
class BraneFamily:
    colors: tuple
    E: Dict[str, HermitianSpace]

    def __post_init__(self):
        colors = tuple(str(c) for c in self.colors)
        if not colors:
            raise ValueError("a brane family needs at least one color")
        if len(set(colors)) != len(colors):
            raise ValueError("duplicate color names")
        for c in colors:
            if c not in self.E:
                raise ValueError(f"missing space for color {c}")
            if self.E[c].dim < 1:
                raise ValueError(f"E[{c}] must have positive dimension")
        object.__setattr__(self, "colors", colors)


def make_branes(dims) -> BraneFamily:
    """From ``{color: dim}`` or ``{color: gram}``, in insertion order."""
    E = {}
    for c, v in dims.items():
        E[str(c)] = HermitianSpace(v) if np.isscalar(v) else HermitianSpace(len(v), v)
    return BraneFamily(tuple(E), E)


def random_branes(rng, n_colors: int, max_dim: int, identity_prob: float = 0.25) -> BraneFamily:
    """Seeded dims in ``1..max_dim``; grams are random positive-definite,
    occasionally the identity."""
    E = {}
    for c in range(n_colors):
        d = int(rng.integers(1, max_dim + 1))
        if rng.random() < identity_prob:
            gram = np.eye(d)
        else:
            B = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
            gram = B.conj().T @ B / d + 0.5 * np.eye(d)
        E[str(c + 1)] = HermitianSpace(d, gram)
    return BraneFamily(tuple(E), E)


def transgress(branes: BraneFamily) -> LBGPointObject:
    """``L = C``, ``R_ij = Hom(E_i, E_j)`` with ``<f, g> = tr(f^* g)``, composition,
    identities and metric adjoints.  ``f`` in ``R_ij`` is stored row-major as a
    ``dim E_j x dim E_i`` matrix."""
    C = branes.colors
    E = branes.E
    dims = {c: E[c].dim for c in C}
    ginv = {c: np.linalg.inv(E[c].gram) for c in C}
    R = {(i, j): HermitianSpace(dims[i] * dims[j], np.kron(E[j].gram, ginv[i].T)) for i in C for j in C}
    chi = {}
    for i in C:
        for j in C:
            for k in C:
                ni, nj, nk = dims[i], dims[j], dims[k]
                t = np.zeros((nk * ni, nk * nj, nj * ni), dtype=complex)
                for a in range(nk):
                    for b in range(nj):
                        for d in range(ni):
                            t[a * ni + d, a * nj + b, b * ni + d] = 1.0
                chi[i, j, k] = t
    eps = {c: np.eye(dims[c]).reshape(-1) for c in C}
    alpha = {}
    phi = {}
    for i in C:
        for j in C:
            # f^* = G_i^{-1} f^H G_j, so A[(c, e), (a, b)] = ginv_i[c, b] G_j[a, e]
            A = np.einsum("cb,ae->ceab", ginv[i], E[j].gram).reshape(dims[i] * dims[j], dims[j] * dims[i])
            alpha[i, j] = A
            n = dims[i] * dims[j]
            phi[i, j] = np.eye(n)[:, None, :]
    L = HermitianSpace(1)
    return make_lbg(C, L, np.ones((1, 1, 1)), R, phi, chi, eps, alpha)


@dataclass(frozen=True, eq=False)
class RegressionData:
    base_color: str
    A0: Algebra
    F0: IrreducibleModule
    E: BraneFamily
    tensors: Dict  # color -> BalancedTensor realising E_i
    intertwiner_residual: float


def _module_as_bimodule(F: IrreducibleModule) -> Bimodule:
    C = scalar_algebra()
    n = F.dim
    right = np.eye(n)[:, :, None].astype(complex)
    return Bimodule(F.algebra, C, F.space, F.action, Bilinear(F.space, C.space, F.space, right))


def regress(obj: LBGPointObject, i0, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> RegressionData:
    """``E_i = R_{i0,i} (x)_{A0} F0`` with ``F0`` an irreducible module of ``A0 = A_{i0}``."""
    i0 = str(i0)
    if i0 not in obj.colors:
        raise ValueError(f"base color {i0!r} is not one of {list(obj.colors)}")
    algs = {c: induced_frobenius(obj, c, tol).algebra for c in obj.colors}
    A0 = algs[i0]
    try:
        F0 = irreducible_module(A0, seed, tol)
    except NotSimple as exc:
        raise InternalInconsistency(f"base algebra of a passing object is not simple: {exc}") from exc
    N = _module_as_bimodule(F0)
    E, tensors = {}, {}
    for c in obj.colors:
        M = induced_bimodule(obj, i0, c, tol, algs)
        bt = balanced_tensor(M, N, tol)
        tensors[c] = bt
        E[c] = bt.bimodule.space
        expected = int(round(np.sqrt(obj.R[c, c].dim)))
        if E[c].dim != expected:
            raise InternalInconsistency(f"dim E[{c}] = {E[c].dim}, expected {expected}")
    return RegressionData(i0, A0, F0, BraneFamily(obj.colors, E), tensors, F0.residual)


@dataclass(frozen=True, eq=False)
class RoundTrip:
    maps: Dict
    report: AxiomReport

    @property
    def residual(self) -> float:
        return self.report.max_residual()

    @property
    def passed(self) -> bool:
        return self.report.passed


def _xi_forward(obj, reg, i, j):
    """Matrix of ``v -> (w (x) f -> chi_{i0 i j}(v, w) (x) f)`` from ``R_ij`` into
    ``Hom(E_i, E_j)`` (row-major coordinates)."""
    i0 = reg.base_color
    ti, tj = reg.tensors[i], reg.tensors[j]
    K = ti.inclusion.coeffs
    P = tj.projection.coeffs
    nF = reg.F0.dim
    ch = obj.chi[i0, i, j].coeffs
    cols = []
    for p in range(obj.R[i, j].dim):
        X = ch[:, p, :]
        cols.append((P @ np.kron(X, np.eye(nF)) @ K).reshape(-1))
    return np.column_stack(cols) if cols else np.zeros((0, 0), dtype=complex)


def _scalar_map(obj):
    """The isomorphism ``L -> C``, ``l -> <1, l>``; needs ``dim L = 1``."""
    return obj.unit_L.conj() @ obj.L.gram


def morphism_report(src: LBGPointObject, dst: LBGPointObject, maps, Lmap, tol: Tolerance = DEFAULT_TOL, prefix=""):
    """Check that ``maps[i, j]: src.R_ij -> dst.R_ij`` together with ``Lmap``
    intertwines every structure map and is unitary."""
    rep = AxiomReport()
    r = max_gap(Lmap @ src.lam.coeffs.reshape(src.L.dim, -1), dst.lam.coeffs.reshape(dst.L.dim, -1) @ np.kron(Lmap, Lmap))
    rep.record(prefix + "lambda", r[0], tol.bound(r[2]), r[1])
    r = max_gap(Lmap.conj().T @ dst.L.gram @ Lmap, src.L.gram)
    rep.record(prefix + "unitary", r[0], tol.bound(r[2]), {"space": "L", "index": r[1]})
    for (i, j), X in maps.items():
        if X.shape[0] != X.shape[1]:
            rep.record(prefix + "invertible", float("inf"), 0.0, {"pair": [i, j]}, f"shape {X.shape}")
            continue
        s = np.linalg.svd(X, compute_uv=False)
        rep.record(prefix + "invertible", max(0.0, tol.psd_floor - float(s.min())), 0.0, {"pair": [i, j]})
        r = max_gap(X.conj().T @ dst.R[i, j].gram @ X, src.R[i, j].gram)
        rep.record(prefix + "unitary", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
        lhs = np.einsum("am,mlv->alv", X, src.phi[i, j].coeffs)
        rhs = np.einsum("apq,pl,qv->alv", dst.phi[i, j].coeffs, Lmap, X, optimize=True)
        r = max_gap(lhs, rhs)
        rep.record(prefix + "phi", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
        r = max_gap(maps[j, i] @ src.alpha[i, j].coeffs, dst.alpha[i, j].coeffs @ X.conj())
        rep.record(prefix + "alpha", r[0], tol.bound(r[2]), {"pair": [i, j], "index": r[1]})
    for i in src.colors:
        r = max_gap(maps[i, i] @ src.eps[i], dst.eps[i])
        rep.record(prefix + "eps", r[0], tol.bound(r[2]), {"color": i, "index": r[1]})
    for i, j, k in src.triples():
        lhs = np.einsum("am,mwv->awv", maps[i, k], src.chi[i, j, k].coeffs)
        rhs = np.einsum("apq,pw,qv->awv", dst.chi[i, j, k].coeffs, maps[j, k], maps[i, j], optimize=True)
        r = max_gap(lhs, rhs)
        rep.record(prefix + "chi", r[0], tol.bound(r[2]), {"colors": [i, j, k], "index": r[1]})
    return rep


def roundtrip_RT(obj: LBGPointObject, i0, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> RoundTrip:
    """Build ``xi: transgress(regress(obj)) -> obj`` and certify it as a unitary
    isomorphism of point objects."""
    if obj.L.dim != 1:
        raise NotIso(f"bulk space has dimension {obj.L.dim}; a passing object has dimension 1")
    reg = regress(obj, i0, seed, tol)
    obj2 = transgress(reg.E)
    Xi = {(i, j): _xi_forward(obj, reg, i, j) for i, j in obj.pairs()}
    rep = morphism_report(obj, obj2, Xi, _scalar_map(obj)[None, :], tol, "RT.")
    xi = {}
    for key, X in Xi.items():
        try:
            xi[key] = LinMap(obj2.R[key], obj.R[key], np.linalg.inv(X))
        except np.linalg.LinAlgError as exc:
            raise NotIso(f"Xi{key} is singular") from exc
    return RoundTrip(xi, rep)


def _intertwiner(A0: Algebra, F0: IrreducibleModule, n0: int, tol: Tolerance):
    """``f0: F0 -> C^{n0}`` with ``f0 rho_F(a) = a f0`` for ``a`` in ``End(C^{n0})``,
    normalized to operator norm one and made real positive on its largest entry."""
    nF = F0.dim
    eye_F = np.eye(nF)
    eye_E = np.eye(n0)
    rows = []
    for p in range(A0.dim):
        M = np.zeros((n0, n0))
        M[p // n0, p % n0] = 1.0
        rho = F0.action.left_operator(np.eye(A0.dim)[p])
        # vec_row(f rho) = (I (x) rho^T) vec f, vec_row(M f) = (M (x) I) vec f
        rows.append(np.kron(eye_E, rho.T) - np.kron(M, eye_F))
    sysm = np.vstack(rows)
    _, s, vh = np.linalg.svd(sysm)
    cutoff = tol.abs_tol * max(1.0, float(s[0]))
    null = int(np.sum(s <= cutoff)) + max(0, vh.shape[0] - len(s))
    if null != 1:
        raise NoIntertwiner(f"intertwiner space has dimension {null}, expected 1")
    f0 = vh[-1].conj().reshape(n0, nF)
    f0 = f0 / np.linalg.norm(f0, 2)
    big = np.unravel_index(int(np.argmax(np.abs(f0))), f0.shape)
    f0 = f0 * (abs(f0[big]) / f0[big])
    return f0, float(s[-1])


def roundtrip_TR(branes: BraneFamily, i0, seed: int = 0, tol: Tolerance = DEFAULT_TOL) -> RoundTrip:
    """Maps ``T_i: E'_i -> E_i`` from the regression of the transgression back to
    the branes, ``[X (x) f] -> X f0(f)``.

    The quotient metric on ``E'_i`` is the pulled-back metric of ``E_i`` times a
    constant common to all colors; the maps are rescaled by that constant and
    then checked for unitarity, agreement of the constant, and compatibility
    ``T_j Xi(v) T_i^{-1} = v``.
    """
    i0 = str(i0)
    obj = transgress(branes)
    reg = regress(obj, i0, seed, tol)
    E = branes.E
    n0 = E[i0].dim
    # A0 acts on E_i0 by matrices; intertwiner in plain coordinates of E_i0
    f0, ires = _intertwiner(reg.A0, reg.F0, n0, tol)
    rep = AxiomReport()
    rep.record("TR.intertwiner", ires, tol.bound(1.0))
    T = {}
    nF = reg.F0.dim
    for c in branes.colors:
        K = reg.tensors[c].inclusion.coeffs.reshape(E[c].dim, n0, nF, -1)
        T[c] = np.einsum("abfq,bf->aq", K, f0)
    scales = {}
    for c, M in T.items():
        S = M.conj().T @ E[c].gram @ M
        scales[c] = float(np.real(np.trace(S))) / S.shape[0]
    s0 = scales[i0]
    for c in branes.colors:
        rep.record("TR.scale", abs(scales[c] / s0 - 1.0), tol.bound(1.0), {"color": c}, f"scale {scales[c]:.12g}")
        T[c] = T[c] / np.sqrt(s0)
        r = max_gap(T[c].conj().T @ E[c].gram @ T[c], np.eye(T[c].shape[1]))
        rep.record("TR.unitary", r[0], tol.bound(1.0), {"color": c, "index": r[1]})
    Tinv = {c: np.linalg.inv(M) for c, M in T.items()}
    for i, j in obj.pairs():
        Xi = _xi_forward(obj, reg, i, j)
        ni, nj = E[i].dim, E[j].dim
        npr_i, npr_j = reg.E.E[i].dim, reg.E.E[j].dim
        worst = (0.0, (), 0.0)
        for p in range(obj.R[i, j].dim):
            V = T[j] @ Xi[:, p].reshape(npr_j, npr_i) @ Tinv[i]
            r = max_gap(V.reshape(-1), np.eye(nj * ni)[p])
            if r[0] > worst[0]:
                worst = r
        rep.record("TR.compatible", worst[0], tol.bound(1.0), {"pair": [i, j], "index": worst[1]})
    maps = {c: LinMap(reg.E.E[c], E[c], M) for c, M in T.items()}
    return RoundTrip(maps, rep)
