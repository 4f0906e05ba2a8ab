"""JSON documents: ``{"kind", "version", "payload"[, "meta"]}``.

Complex tensors are dense row-major nested lists whose leaves are ``[re, im]``
pairs.  Color pairs are keyed ``"i,j"``, triples ``"i,j,k"``.  Every parse
error names the JSON path at fault.
"""

import json

import numpy as np

from .algebra import Algebra
from .bimodule import Bimodule
from .correspondence import BraneFamily
from .kfrob import KFrob, ReflectionStructure, make_kfrob
from .lbg import LBGPointObject, make_lbg
from .numcore import Bilinear, ConjLinMap, HermitianSpace
from .errors import FrobraneError

__all__ = ["ParseError", "KINDS", "MAX_DIM", "encode", "decode", "load_document", "dump_document"]

KINDS = ("brane_family", "algebra", "bimodule", "lbg", "kfrob", "reflection")
VERSION = "1"
MAX_DIM = 64


class ParseError(ValueError):
    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def tensor_to_json(a):
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def tensor_from_json(x, shape, path):
    try:
        arr = np.asarray(x, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(path, "not a rectangular numeric array") from None
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ParseError(path, "complex entries must be [re, im] pairs")
    if not np.all(np.isfinite(arr)):
        raise ParseError(path, "non-finite entry")
    out = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and tuple(out.shape) != tuple(shape):
        raise ParseError(path, f"shape {tuple(out.shape)}, expected {tuple(shape)}")
    return out


def _get(obj, key, path):
    if not isinstance(obj, dict):
        raise ParseError(path, "expected an object")
    if key not in obj:
        raise ParseError(path, f"missing field {key!r}")
    return obj[key]


def _colors(payload, path):
    colors = _get(payload, "colors", path)
    if not isinstance(colors, list) or not colors or not all(isinstance(c, (str, int)) for c in colors):
        raise ParseError(f"{path}.colors", "expected a non-empty list of names")
    colors = [str(c) for c in colors]
    if len(set(colors)) != len(colors):
        raise ParseError(f"{path}.colors", "duplicate color names")
    for c in colors:
        if "," in c:
            raise ParseError(f"{path}.colors", f"color name {c!r} contains a comma")
    return tuple(colors)


def _key(*names):
    return ",".join(names)


def _space_to_json(V: HermitianSpace):
    return {"dim": V.dim, "gram": tensor_to_json(V.gram)}


def _space_from_json(x, path):
    dim = _get(x, "dim", path)
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise ParseError(f"{path}.dim", "expected a nonnegative integer")
    if dim > MAX_DIM:
        raise ParseError(f"{path}.dim", f"dimension {dim} exceeds the cap of {MAX_DIM}")
    gram = None
    if "gram" in x:
        gram = tensor_from_json(x["gram"], (dim, dim), f"{path}.gram")
    try:
        return HermitianSpace(dim, gram)
    except FrobraneError as exc:
        raise ParseError(f"{path}.gram", str(exc)) from None


def _keyed(payload, field, keys, path):
    d = _get(payload, field, path)
    if not isinstance(d, dict):
        raise ParseError(f"{path}.{field}", "expected an object keyed by colors")
    for k in keys:
        if k not in d:
            raise ParseError(f"{path}.{field}", f"missing entry {k!r}")
    return d


# brane_family

def branes_to_json(b: BraneFamily):
    return {"colors": list(b.colors), "E": {c: _space_to_json(b.E[c]) for c in b.colors}}


def branes_from_json(p, path="payload"):
    colors = _colors(p, path)
    Ed = _keyed(p, "E", colors, path)
    E = {}
    for c in colors:
        E[c] = _space_from_json(Ed[c], f"{path}.E.{c}")
        if E[c].dim < 1:
            raise ParseError(f"{path}.E.{c}.dim", "brane spaces must have positive dimension")
    return BraneFamily(colors, E)


# algebra

def algebra_to_json(A: Algebra):
    out = {"space": _space_to_json(A.space), "mult": tensor_to_json(A.c), "unit": tensor_to_json(A.unit)}
    if A.involution is not None:
        out["involution"] = tensor_to_json(A.involution.coeffs)
    if A.trace is not None:
        out["trace"] = tensor_to_json(A.trace)
    return out


def algebra_from_json(p, path="payload"):
    """Build an unchecked :class:`Algebra`; a missing unit is solved by least squares."""
    from .algebra import solve_unit

    V = _space_from_json(_get(p, "space", path), f"{path}.space")
    n = V.dim
    if n < 1:
        raise ParseError(f"{path}.space.dim", "an algebra needs positive dimension")
    c = tensor_from_json(_get(p, "mult", path), (n, n, n), f"{path}.mult")
    if "unit" in p:
        unit = tensor_from_json(p["unit"], (n,), f"{path}.unit")
    else:
        unit, _ = solve_unit(c)
    inv = None
    if "involution" in p:
        inv = ConjLinMap(V, V, tensor_from_json(p["involution"], (n, n), f"{path}.involution"))
    trace = tensor_from_json(p["trace"], (n,), f"{path}.trace") if "trace" in p else None
    return Algebra(V, Bilinear(V, V, V, c), unit, inv, trace)


def bimodule_to_json(M: Bimodule):
    return {
        "left_algebra": algebra_to_json(M.left_alg),
        "right_algebra": algebra_to_json(M.right_alg),
        "space": _space_to_json(M.space),
        "left_action": tensor_to_json(M.left_action.coeffs),
        "right_action": tensor_to_json(M.right_action.coeffs),
    }


def bimodule_from_json(p, path="payload"):
    A = algebra_from_json(_get(p, "left_algebra", path), f"{path}.left_algebra")
    B = algebra_from_json(_get(p, "right_algebra", path), f"{path}.right_algebra")
    V = _space_from_json(_get(p, "space", path), f"{path}.space")
    L = tensor_from_json(_get(p, "left_action", path), (V.dim, A.dim, V.dim), f"{path}.left_action")
    R = tensor_from_json(_get(p, "right_action", path), (V.dim, V.dim, B.dim), f"{path}.right_action")
    return Bimodule(A, B, V, Bilinear(A.space, V, V, L), Bilinear(V, B.space, V, R))


# lbg

def lbg_to_json(o: LBGPointObject):
    return {
        "colors": list(o.colors),
        "L": _space_to_json(o.L),
        "lambda": tensor_to_json(o.lam.coeffs),
        "R": {_key(i, j): _space_to_json(o.R[i, j]) for i, j in o.pairs()},
        "phi": {_key(i, j): tensor_to_json(o.phi[i, j].coeffs) for i, j in o.pairs()},
        "chi": {_key(*t): tensor_to_json(o.chi[t].coeffs) for t in o.triples()},
        "eps": {i: tensor_to_json(o.eps[i]) for i in o.colors},
        "alpha": {_key(i, j): tensor_to_json(o.alpha[i, j].coeffs) for i, j in o.pairs()},
    }


def _pairs(colors):
    return [(i, j) for i in colors for j in colors]


def _triples(colors):
    return [(i, j, k) for i in colors for j in colors for k in colors]


def _R_from_json(p, colors, path):
    Rd = _keyed(p, "R", [_key(i, j) for i, j in _pairs(colors)], path)
    R = {}
    for i, j in _pairs(colors):
        R[i, j] = _space_from_json(Rd[_key(i, j)], f"{path}.R.{_key(i, j)}")
    for i in colors:
        if R[i, i].dim < 1:
            raise ParseError(f"{path}.R.{_key(i, i)}.dim", "diagonal spaces must have positive dimension")
    return R


def _chi_from_json(p, colors, R, path):
    chd = _keyed(p, "chi", [_key(*t) for t in _triples(colors)], path)
    chi = {}
    for i, j, k in _triples(colors):
        shape = (R[i, k].dim, R[j, k].dim, R[i, j].dim)
        chi[i, j, k] = tensor_from_json(chd[_key(i, j, k)], shape, f"{path}.chi.{_key(i, j, k)}")
    return chi


def _eps_from_json(p, colors, R, path, field="eps"):
    ed = _keyed(p, field, colors, path)
    return {i: tensor_from_json(ed[i], (R[i, i].dim,), f"{path}.{field}.{i}") for i in colors}


def _alpha_from_json(p, colors, R, path):
    ad = _keyed(p, "alpha", [_key(i, j) for i, j in _pairs(colors)], path)
    return {
        (i, j): tensor_from_json(ad[_key(i, j)], (R[j, i].dim, R[i, j].dim), f"{path}.alpha.{_key(i, j)}")
        for i, j in _pairs(colors)
    }


def lbg_from_json(p, path="payload"):
    colors = _colors(p, path)
    L = _space_from_json(_get(p, "L", path), f"{path}.L")
    lam = tensor_from_json(_get(p, "lambda", path), (L.dim,) * 3, f"{path}.lambda")
    R = _R_from_json(p, colors, path)
    phd = _keyed(p, "phi", [_key(i, j) for i, j in _pairs(colors)], path)
    phi = {
        (i, j): tensor_from_json(phd[_key(i, j)], (R[i, j].dim, L.dim, R[i, j].dim), f"{path}.phi.{_key(i, j)}")
        for i, j in _pairs(colors)
    }
    chi = _chi_from_json(p, colors, R, path)
    eps = _eps_from_json(p, colors, R, path)
    alpha = _alpha_from_json(p, colors, R, path)
    return make_lbg(colors, L, lam, R, phi, chi, eps, alpha)


# kfrob / reflection

def kfrob_to_json(kf: KFrob):
    return {
        "colors": list(kf.colors),
        "L": algebra_to_json(kf.L),
        "R": {_key(i, j): _space_to_json(kf.R[i, j]) for i, j in kf.pairs()},
        "chi": {_key(*t): tensor_to_json(f.coeffs) for t, f in kf.chi.items()},
        "eps": {i: tensor_to_json(kf.eps[i]) for i in kf.colors},
        "theta": {i: tensor_to_json(kf.theta[i]) for i in kf.colors},
        "iota": {i: tensor_to_json(kf.iota[i].coeffs) for i in kf.colors},
        "iota_star": {i: tensor_to_json(kf.iota_star[i].coeffs) for i in kf.colors},
    }


def kfrob_from_json(p, path="payload"):
    colors = _colors(p, path)
    L = algebra_from_json(_get(p, "L", path), f"{path}.L")
    if L.trace is None:
        raise ParseError(f"{path}.L", "missing field 'trace'")
    R = _R_from_json(p, colors, path)
    chi = _chi_from_json(p, colors, R, path)
    eps = _eps_from_json(p, colors, R, path)
    theta = _eps_from_json(p, colors, R, path, "theta")
    iod = _keyed(p, "iota", colors, path)
    isd = _keyed(p, "iota_star", colors, path)
    iota = {i: tensor_from_json(iod[i], (R[i, i].dim, L.dim), f"{path}.iota.{i}") for i in colors}
    istar = {i: tensor_from_json(isd[i], (L.dim, R[i, i].dim), f"{path}.iota_star.{i}") for i in colors}
    return make_kfrob(colors, L, R, chi, eps, theta, iota, istar)


def reflection_to_json(kf: KFrob, refl: ReflectionStructure):
    return {
        "kfrob": kfrob_to_json(kf),
        "lambda_tilde": tensor_to_json(refl.lambda_tilde.coeffs),
        "alpha": {_key(i, j): tensor_to_json(refl.alpha[i, j].coeffs) for i, j in kf.pairs()},
    }


def reflection_from_json(p, path="payload"):
    kf = kfrob_from_json(_get(p, "kfrob", path), f"{path}.kfrob")
    n = kf.L.dim
    Lt = tensor_from_json(_get(p, "lambda_tilde", path), (n, n), f"{path}.lambda_tilde")
    alpha = _alpha_from_json(p, kf.colors, kf.R, path)
    refl = ReflectionStructure(
        ConjLinMap(kf.L.space, kf.L.space, Lt),
        {(i, j): ConjLinMap(kf.R[i, j], kf.R[j, i], a) for (i, j), a in alpha.items()},
    )
    return kf, refl


_ENCODERS = {
    "brane_family": branes_to_json,
    "algebra": algebra_to_json,
    "bimodule": bimodule_to_json,
    "lbg": lbg_to_json,
    "kfrob": kfrob_to_json,
    "reflection": lambda pair: reflection_to_json(*pair),
}

_DECODERS = {
    "brane_family": branes_from_json,
    "algebra": algebra_from_json,
    "bimodule": bimodule_from_json,
    "lbg": lbg_from_json,
    "kfrob": kfrob_from_json,
    "reflection": reflection_from_json,
}


def encode(kind, obj, meta=None):
    doc = {"kind": kind, "version": VERSION, "payload": _ENCODERS[kind](obj)}
    if meta:
        doc["meta"] = meta
    return doc


def decode(doc):
    """Return ``(kind, object)``; raises :class:`ParseError` naming the bad path."""
    if not isinstance(doc, dict):
        raise ParseError("$", "document must be a JSON object")
    kind = _get(doc, "kind", "$")
    if kind not in KINDS:
        raise ParseError("$.kind", f"unknown kind {kind!r}")
    version = _get(doc, "version", "$")
    if version != VERSION:
        raise ParseError("$.version", f"unsupported version {version!r}")
    payload = _get(doc, "payload", "$")
    try:
        return kind, _DECODERS[kind](payload, "$.payload")
    except ParseError:
        raise
    except (FrobraneError, ValueError) as exc:
        raise ParseError("$.payload", str(exc)) from None


def load_document(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError("$", f"malformed JSON: {exc}") from None
    return doc, decode(doc)


def dump_document(doc) -> str:
    return json.dumps(doc, separators=(",", ":"))
