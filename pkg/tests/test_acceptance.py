"""Acceptance checks 1-10.  Each test prints one PASS/FAIL line.

The expensive checks (concatenation, Morita, round trips) run on the first
SUBSET families of the seeded stream.  Everything else runs on all of them.
"""

import json
import time

import numpy as np
import pytest

from frobrane import (
    check_kfrob,
    check_lbg,
    check_positivity,
    check_reflection,
    concat_isomorphism,
    functor_F,
    induced_bimodule,
    induced_frobenius,
    inverse_F,
    is_invertible,
    is_simple,
    make_branes,
    rank_identities,
    roundtrip_RT,
    roundtrip_TR,
    tensor_over,
)
from frobrane.algebra import direct_sum, group_algebra_z2, scalar_algebra
from frobrane.bimodule import conjugate_dual
from frobrane.cli import main
from frobrane.correspondence import random_branes, transgress
from frobrane.kfrob import positivity_pairing
from frobrane.lbg import cardy_sum

N_FAMILIES = 200
SUBSET = 24
SEEDS = (0, 1, 2)


def emit(capsys, n, ok, msg):
    with capsys.disabled():
        print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}  {msg}")
    assert ok, msg


def family(seed):
    rng = np.random.default_rng(seed)
    n_colors = int(rng.integers(1, 4))
    return random_branes(rng, n_colors, 4)


@pytest.fixture(scope="module")
def corpus():
    t0 = time.perf_counter()
    fams = [family(s) for s in range(N_FAMILIES)]
    objs = [transgress(b) for b in fams]
    reports = [check_lbg(o) for o in objs]
    elapsed = time.perf_counter() - t0
    return fams, objs, reports, elapsed


@pytest.fixture(scope="module")
def induced(corpus):
    _, objs, _, _ = corpus
    return [{c: induced_frobenius(o, c) for c in o.colors} for o in objs]


def test_01_transgression_sound(capsys, corpus):
    _, objs, reports, elapsed = corpus
    worst = max(r.max_residual() for r in reports)
    passed = sum(r.passed for r in reports)
    names = set(reports[0].names())
    full = all(n in names for n in ("LBG1*", "LBG2*", "LBG3*", "LBG4*", "chi.associative"))
    ok = passed == len(objs) and worst <= 1e-8 and elapsed <= 60 and full
    emit(capsys, 1, ok, f"{passed}/{len(objs)} families pass, max residual {worst:.2e}, {elapsed:.1f}s")


def test_02_rank_identities(capsys, corpus):
    _, objs, reports, _ = corpus
    worst_norm, bad_square = 0.0, 0
    for o, r in zip(objs, reports):
        if not r.passed:
            continue
        rep = rank_identities(o)
        worst_norm = max(worst_norm, rep["rank.eps_norm"].residual)
        for i, j in o.pairs():
            if o.R[i, j].dim ** 2 != o.R[i, i].dim * o.R[j, j].dim:
                bad_square += 1
    ok = worst_norm <= 1e-9 and bad_square == 0
    emit(capsys, 2, ok, f"max | |eps| - rk^(1/4) | = {worst_norm:.2e}, rank-square violations {bad_square}")


def test_03_cardy_elementary(capsys):
    rng = np.random.default_rng(7)
    worst_lib, worst_direct = 0.0, 0.0
    for n in range(1, 5):
        obj = transgress(make_branes({"1": n, "2": n}))
        C = cardy_sum(obj, "1", "2")
        units = [np.outer(np.eye(n)[a], np.eye(n)[b]) for a in range(n) for b in range(n)]
        for _ in range(50):
            V = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            target = np.trace(V) * np.eye(n)
            direct = sum(E @ V @ E.conj().T for E in units)
            lib = (C @ V.reshape(-1)).reshape(n, n)
            worst_direct = max(worst_direct, float(np.abs(direct - target).max()))
            worst_lib = max(worst_lib, float(np.abs(lib - target).max()))
    ok = max(worst_lib, worst_direct) <= 1e-10
    emit(capsys, 3, ok, f"n=1..4 x 50: library {worst_lib:.2e}, elementary-matrix sum {worst_direct:.2e}")


def test_04_simplicity(capsys, corpus, induced):
    _, _, reports, _ = corpus
    total = bad = 0
    for r, fr in zip(reports, induced):
        if r.passed:
            for f in fr.values():
                total += 1
                bad += not f.simple
    controls = {
        "C+C": direct_sum(scalar_algebra(), scalar_algebra()),
        "C[Z/2]": group_algebra_z2(),
    }
    wrong = [k for k, A in controls.items() if is_simple(A)]
    ok = bad == 0 and not wrong
    emit(capsys, 4, ok, f"{total - bad}/{total} induced algebras simple; controls non-simple: {not wrong}")


def test_05_frobenius(capsys, induced):
    worst, smin = 0.0, np.inf
    for fr in induced:
        for f in fr.values():
            rep = f.form.report
            worst = max(worst, rep["frobenius.symmetric"].residual, rep["frobenius.invariant"].residual)
            smin = min(smin, f.form.min_singular_value)
    ok = worst <= 1e-9 and smin >= 1e-6
    emit(capsys, 5, ok, f"symmetry/invariance residual {worst:.2e}, smallest singular value {smin:.3f}")


@pytest.mark.slow
def test_06_concatenation(capsys, corpus, induced):
    _, objs, _, _ = corpus
    worst, mismatched, count = 0.0, 0, 0
    for o, fr in zip(objs[:SUBSET], induced[:SUBSET]):
        algs = {c: f.algebra for c, f in fr.items()}
        for i in o.colors:
            for j in o.colors:
                for k in o.colors:
                    iso = concat_isomorphism(o, i, j, k, algebras=algs)
                    worst = max(worst, iso.residual)
                    mismatched += iso.quotient_dim != o.R[i, k].dim
                    count += 1
    ok = worst <= 1e-8 and mismatched == 0
    emit(capsys, 6, ok, f"{count} triples over {SUBSET} families: residual {worst:.2e}, dim mismatches {mismatched}")


@pytest.mark.slow
def test_07_morita(capsys, corpus, induced):
    _, objs, _, _ = corpus
    bad_inv, bad_dim, count = 0, 0, 0
    for o, fr in zip(objs[:SUBSET], induced[:SUBSET]):
        algs = {c: f.algebra for c, f in fr.items()}
        for i, j in o.pairs():
            M = induced_bimodule(o, i, j, algebras=algs)
            bad_inv += not is_invertible(M)
            bad_dim += tensor_over(conjugate_dual(M), M).dim != o.R[i, i].dim
            count += 1
    ok = bad_inv == 0 and bad_dim == 0
    emit(capsys, 7, ok, f"{count} bimodules over {SUBSET} families: non-invertible {bad_inv}, dim mismatches {bad_dim}")


def _object_gap(a, b):
    gaps = [np.abs(a.lam.coeffs - b.lam.coeffs).max()]
    for key in a.R:
        gaps.append(np.abs(a.R[key].gram - b.R[key].gram).max())
        gaps.append(np.abs(a.phi[key].coeffs - b.phi[key].coeffs).max())
        gaps.append(np.abs(a.alpha[key].coeffs - b.alpha[key].coeffs).max())
    for key in a.chi:
        gaps.append(np.abs(a.chi[key].coeffs - b.chi[key].coeffs).max())
    for c in a.colors:
        gaps.append(np.abs(a.eps[c] - b.eps[c]).max())
    return float(max(gaps))


def test_08_open_closed(capsys, corpus):
    _, objs, _, _ = corpus
    failing, worst_inv, worst_hs = 0, 0.0, 0.0
    for o in objs:
        kf, refl = functor_F(o)
        reps = (check_kfrob(kf), check_reflection(kf, refl), check_positivity(kf, refl))
        failing += not all(r.passed for r in reps)
        worst_inv = max(worst_inv, _object_gap(o, inverse_F(kf, refl)))
        for i, j in o.pairs():
            H = positivity_pairing(kf, refl, i, j)
            worst_hs = max(worst_hs, float(np.abs(H - o.R[i, j].gram).max()))
    ok = failing == 0 and worst_inv <= 1e-8 and worst_hs <= 1e-9
    emit(
        capsys, 8, ok,
        f"{len(objs) - failing}/{len(objs)} pass CFa1-9+reflection+positivity; "
        f"inverse gap {worst_inv:.2e}, metric gap {worst_hs:.2e}",
    )


@pytest.mark.slow
def test_09_roundtrips(capsys, corpus):
    fams, objs, _, _ = corpus
    worst_rt, worst_tr, failing, bases = 0.0, 0.0, 0, set()
    for b, o in zip(fams[:SUBSET], objs[:SUBSET]):
        for c in o.colors:
            bases.add(c)
            for seed in SEEDS:
                rt, tr = roundtrip_RT(o, c, seed), roundtrip_TR(b, c, seed)
                failing += not (rt.passed and tr.passed)
                worst_rt = max(worst_rt, rt.residual)
                worst_tr = max(worst_tr, tr.residual)
    ok = failing == 0 and worst_rt <= 1e-8 and worst_tr <= 1e-9 and len(bases) >= 2
    emit(
        capsys, 9, ok,
        f"{SUBSET} families, base colors {sorted(bases)} x seeds {list(SEEDS)}: "
        f"RT {worst_rt:.2e}, TR {worst_tr:.2e}, failing {failing}",
    )


# which checks a perturbation of each tensor can legitimately break
ALLOWED = {
    "lambda": ("L.", "phi.", "LBG1*", "LBG3*"),
    "phi": ("phi.", "LBG1*", "LBG3*"),
    "chi": ("chi.", "eps.neutral", "alpha.antimultiplicative", "LBG1*", "LBG2*", "LBG4*"),
    "eps": ("eps.", "alpha.unital", "LBG2*", "LBG4*"),
    "alpha": ("alpha.", "LBG2*", "LBG3*", "LBG4*"),
    "theta": ("CFa6", "CFa7", "CFa8", "CFa9", "theta.", "positivity"),
}


def _cli(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


@pytest.mark.slow
def test_10_mutations_detected(capsys, tmp_path):
    targets = sorted(ALLOWED)
    cases = []
    for n in range(100):
        target = targets[n % len(targets)]
        emit_kind = "reflection" if target == "theta" else "lbg"
        size = 1e-3 if n % 2 == 0 else -1e-3
        code, doc = _cli(
            capsys, "random", "--seed", n, "--colors", 1 + n % 3, "--emit", emit_kind,
            "--mutate", size, "--mutate-target", target,
        )
        assert code == 0
        path = tmp_path / f"m{n}.json"
        path.write_text(doc)
        code, out = _cli(capsys, "verify", path, "--json")
        rep = json.loads(out)
        failed = [c["name"] for c in rep["checks"] if c["status"] == "fail"]
        consistent = bool(failed) and all(f.startswith(ALLOWED[target]) for f in failed)
        cases.append((n, json.loads(doc)["meta"]["mutation"], code, failed, consistent))
    detected = sum(c[2] == 1 for c in cases)
    consistent = sum(c[4] for c in cases)
    with capsys.disabled():
        for n, mut, code, failed, _ in cases[::7][:10]:
            print(f"\n    case {n:3d}: {mut['tensor']}[{mut['key']}]{mut['index']} {mut['size']:+g} -> exit {code}, failing {failed}", end="")
    ok = detected == len(cases) and consistent == len(cases)
    emit(capsys, 10, ok, f"{detected}/{len(cases)} mutations exit 1, {consistent}/{len(cases)} name a consistent axiom")
