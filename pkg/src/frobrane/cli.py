"""``frobrane verify|transgress|regress|roundtrip|random``.

Exit codes: 0 pass, 1 a verified failure, 2 usage or parse error.
"""

import argparse
import hashlib
import json
import math
import sys
import time

import numpy as np

from .algebra import algebra_checks, frobenius_checks
from .bimodule import bimodule_checks
from .correspondence import random_branes, regress, roundtrip_RT, roundtrip_TR, transgress
from .errors import FrobraneError, NotHermitian
from .kfrob import check_kfrob, check_positivity, check_reflection, check_simple_theorem, functor_F
from .lbg import check_lbg, make_lbg, rank_identities
from .numcore import Tolerance
from .report import AxiomCheck, AxiomReport
from .serialize import ParseError, dump_document, encode, load_document

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

MUTATION_TARGETS = ("lambda", "phi", "chi", "eps", "alpha", "theta")


class UsageError(Exception):
    pass


def _tolerance(args):
    try:
        return Tolerance.from_env(abs_tol=args.tol, rel_tol=args.tol)
    except ValueError as exc:
        raise UsageError(f"bad tolerance: {exc}") from None


def _read(path):
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return x


def _entry(check: AxiomCheck):
    d = check.to_dict()
    d["residual"] = _finite(d["residual"])
    d["tolerance"] = _finite(d["tolerance"])
    return d


def _write_report(args, report, kind, digest, tol, started, extra=None):
    out = {
        "input_digest": digest,
        "kind": kind,
        "tolerance": {"abs_tol": tol.abs_tol, "rel_tol": tol.rel_tol, "psd_floor": tol.psd_floor},
        "checks": [_entry(c) for c in report.checks],
        "status": "pass" if report.passed else "fail",
    }
    if extra:
        out.update(extra)
    out["duration_s"] = round(time.perf_counter() - started, 6)
    if args.format == "json":
        print(json.dumps(out, indent=1))
    else:
        print(f"{kind}  digest {digest[:12]}  tol {tol.abs_tol:g}/{tol.rel_tol:g}")
        for c in report.checks:
            where = f"  at {json.dumps(_entry(c)['witness'])}" if c.witness is not None and not c.passed else ""
            print(f"  {c.status.upper():4}  {c.name:34} residual {c.residual:.3e}  tol {c.tolerance:.1e}{where}")
        print(f"overall: {out['status']}  ({out['duration_s']:.3f}s)")


def _load(args):
    text = _read(args.path)
    digest = hashlib.sha256(text.encode()).hexdigest()
    doc, (kind, obj) = load_document(text)
    return kind, obj, digest


def reflection_report(kf, refl, tol):
    rep = check_kfrob(kf, tol)
    rrep = check_reflection(kf, refl, tol)
    rep.extend(rrep)
    if not rrep.passed:
        rep.add(AxiomCheck("positivity", float("inf"), 0.0, None, "skipped: reflection structure fails"))
        return rep
    try:
        rep.extend(check_positivity(kf, refl, tol))
    except NotHermitian as exc:
        rep.add(AxiomCheck("positivity.hermitian", float(exc.residual or float("inf")), tol.bound(1.0), exc.witness, str(exc)))
    return rep


def verify_object(kind, obj, tol) -> AxiomReport:
    if kind == "brane_family":
        o = transgress(obj)
        return check_lbg(o, tol).extend(rank_identities(o, tol))
    if kind == "algebra":
        rep = algebra_checks(obj, tol)
        if obj.involution is not None:
            rep.extend(frobenius_checks(obj, tol)[1])
        return rep
    if kind == "bimodule":
        rep = algebra_checks(obj.left_alg, tol, "left_algebra.")
        rep.extend(algebra_checks(obj.right_alg, tol, "right_algebra."))
        return rep.extend(bimodule_checks(obj, tol))
    if kind == "lbg":
        rep = check_lbg(obj, tol)
        if rep.passed:
            rep.extend(rank_identities(obj, tol))
        return rep
    if kind == "kfrob":
        rep = check_kfrob(obj, tol)
        if rep.passed and obj.L.dim == 1:
            rep.extend(check_simple_theorem(obj, tol))
        return rep
    kf, refl = obj
    return reflection_report(kf, refl, tol)


def cmd_verify(args):
    started = time.perf_counter()
    tol = _tolerance(args)
    kind, obj, digest = _load(args)
    rep = verify_object(kind, obj, tol)
    _write_report(args, rep, kind, digest, tol, started)
    return EXIT_PASS if rep.passed else EXIT_FAIL


def _emit(args, doc):
    text = dump_document(doc)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc}") from None
    else:
        print(text)


def _expect(kind, wanted):
    if kind != wanted:
        raise UsageError(f"expected a {wanted} document, got {kind}")


def cmd_transgress(args):
    tol = _tolerance(args)
    kind, branes, _ = _load(args)
    _expect(kind, "brane_family")
    obj = transgress(branes)
    rep = check_lbg(obj, tol)
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        print(f"transgressed object fails: {names}", file=sys.stderr)
        return EXIT_FAIL
    _emit(args, encode("lbg", obj))
    return EXIT_PASS


def _base_color(args, colors):
    base = colors[0] if args.base_color is None else args.base_color
    if base not in colors:
        raise UsageError(f"base color {base!r} is not one of {list(colors)}")
    return base


def cmd_regress(args):
    tol = _tolerance(args)
    kind, obj, _ = _load(args)
    _expect(kind, "lbg")
    base = _base_color(args, obj.colors)
    rep = check_lbg(obj, tol)
    if not rep.passed:
        names = ", ".join(c.name for c in rep.failures())
        print(f"input object fails: {names}", file=sys.stderr)
        return EXIT_FAIL
    reg = regress(obj, base, args.seed, tol)
    _emit(args, encode("brane_family", reg.E, {"base_color": base, "seed": args.seed}))
    return EXIT_PASS


def cmd_roundtrip(args):
    started = time.perf_counter()
    tol = _tolerance(args)
    kind, obj, digest = _load(args)
    if args.mode == "RT":
        _expect(kind, "lbg")
        base = _base_color(args, obj.colors)
        pre = check_lbg(obj, tol)
        if not pre.passed:
            _write_report(args, pre, kind, digest, tol, started, {"mode": "RT"})
            return EXIT_FAIL
        rt = roundtrip_RT(obj, base, args.seed, tol)
    else:
        _expect(kind, "brane_family")
        base = _base_color(args, obj.colors)
        rt = roundtrip_TR(obj, base, args.seed, tol)
    extra = {"mode": args.mode, "base_color": base, "seed": args.seed, "max_residual": rt.residual}
    _write_report(args, rt.report, kind, digest, tol, started, extra)
    return EXIT_PASS if rt.passed else EXIT_FAIL


def mutate(kind, obj, rng, size, target=None):
    """Add ``size`` to one randomly chosen entry of one structure tensor.

    Returns the mutated object and a record of what was touched.
    """
    if kind == "lbg":
        tensors = {
            "lambda": {"": obj.lam.coeffs},
            "phi": {",".join(k): f.coeffs for k, f in obj.phi.items()},
            "chi": {",".join(k): f.coeffs for k, f in obj.chi.items()},
            "eps": dict(obj.eps),
            "alpha": {",".join(k): f.coeffs for k, f in obj.alpha.items()},
        }
    else:
        kf, refl = obj
        tensors = {
            "lambda": {"": kf.L.c},
            "chi": {",".join(k): f.coeffs for k, f in kf.chi.items()},
            "eps": dict(kf.eps),
            "theta": dict(kf.theta),
            "alpha": {",".join(k): f.coeffs for k, f in refl.alpha.items()},
        }
    names = sorted(tensors) if target is None else [target]
    if target is not None and target not in tensors:
        raise UsageError(f"tensor {target!r} cannot be mutated in a {kind} document")
    name = names[int(rng.integers(len(names)))]
    keys = sorted(tensors[name])
    key = keys[int(rng.integers(len(keys)))]
    arr = np.array(tensors[name][key])
    index = tuple(int(rng.integers(s)) for s in arr.shape)
    arr[index] += size
    tensors[name][key] = arr
    record = {"tensor": name, "key": key, "index": list(index), "size": size}

    def unpack(d):
        return {tuple(k.split(",")) if k else k: v for k, v in d.items()}

    if kind == "lbg":
        new = make_lbg(
            obj.colors, obj.L, tensors["lambda"][""], obj.R, unpack(tensors["phi"]), unpack(tensors["chi"]),
            tensors["eps"], unpack(tensors["alpha"]),
        )
        return new, record
    from .algebra import Algebra
    from .kfrob import KFrob, ReflectionStructure
    from .numcore import Bilinear, ConjLinMap

    L = kf.L
    newL = Algebra(L.space, Bilinear(L.space, L.space, L.space, tensors["lambda"][""]), L.unit, L.involution, L.trace)
    chi = {k: Bilinear(f.left, f.right, f.out, tensors["chi"][",".join(k)]) for k, f in kf.chi.items()}
    alpha = {k: ConjLinMap(f.src, f.dst, tensors["alpha"][",".join(k)]) for k, f in refl.alpha.items()}
    new_kf = KFrob(kf.colors, newL, kf.R, chi, tensors["eps"], tensors["theta"], kf.iota, kf.iota_star)
    return (new_kf, ReflectionStructure(refl.lambda_tilde, alpha)), record


def cmd_random(args):
    if not 1 <= args.colors <= 8:
        raise UsageError("--colors must be between 1 and 8")
    if not 1 <= args.max_dim <= 8:
        raise UsageError("--max-dim must be between 1 and 8")
    if args.mutate is not None and not (math.isfinite(args.mutate) and args.mutate != 0):
        raise UsageError("--mutate needs a finite nonzero size")
    rng = np.random.default_rng(args.seed)
    branes = random_branes(rng, args.colors, args.max_dim)
    emit = args.emit
    if args.mutate is not None and emit == "brane_family":
        emit = "reflection" if args.mutate_target == "theta" else "lbg"
    if args.mutate_target == "theta" and emit == "lbg":
        raise UsageError("theta lives in kfrob/reflection documents; use --emit reflection")
    meta = {"generator": {"colors": args.colors, "max_dim": args.max_dim, "seed": args.seed}}
    if emit == "brane_family":
        _emit(args, encode("brane_family", branes, meta))
        return EXIT_PASS
    obj = transgress(branes)
    if emit == "lbg":
        kind, out = "lbg", obj
    else:
        kf, refl = functor_F(obj)
        kind, out = ("kfrob", kf) if emit == "kfrob" else ("reflection", (kf, refl))
    if args.mutate is not None:
        if kind == "kfrob":
            raise UsageError("mutations are supported for lbg and reflection documents")
        out, meta["mutation"] = mutate(kind, out, rng, args.mutate, args.mutate_target)
    _emit(args, encode(kind, out, meta))
    return EXIT_PASS


def build_parser():
    p = argparse.ArgumentParser(prog="frobrane", description="Verify and transform point-reduced brane data.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, path=True):
        if path:
            sp.add_argument("path", help="input document ('-' for stdin)")
        sp.add_argument("--tol", type=float, default=None, help="absolute and relative tolerance")
        fmt = sp.add_mutually_exclusive_group()
        fmt.add_argument("--json", dest="format", action="store_const", const="json")
        fmt.add_argument("--text", dest="format", action="store_const", const="text")
        sp.set_defaults(format="text")

    sp = sub.add_parser("verify", help="run every axiom check for the document's kind")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("transgress", help="brane family -> lbg document")
    common(sp)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_transgress)

    sp = sub.add_parser("regress", help="lbg document -> brane family")
    common(sp)
    sp.add_argument("--base-color", default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_regress)

    sp = sub.add_parser("roundtrip", help="RT on an lbg document, TR on a brane family")
    common(sp)
    sp.add_argument("--mode", choices=("RT", "TR"), default="RT")
    sp.add_argument("--base-color", default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_roundtrip)

    sp = sub.add_parser("random", help="emit a seeded random document")
    common(sp, path=False)
    sp.add_argument("--colors", type=int, default=2)
    sp.add_argument("--max-dim", type=int, default=3)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--emit", choices=("brane_family", "lbg", "kfrob", "reflection"), default="brane_family")
    sp.add_argument("--mutate", type=float, default=None, metavar="SIZE")
    sp.add_argument("--mutate-target", choices=MUTATION_TARGETS, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_random)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FrobraneError as exc:
        print(f"failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
