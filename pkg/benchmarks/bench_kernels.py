"""Compare the numba and numpy associativity kernels.

    python benchmarks/bench_kernels.py [--repeat 5]

Times ``assoc_residual`` on composition tensors of growing size and a full
``check_lbg`` sweep, once per backend.  The first numba call (compilation) is
excluded.
"""

import argparse
import timeit

import numpy as np

from frobrane import _accel, check_lbg, make_branes, transgress
from frobrane.kernels import assoc_residual_numba, assoc_residual_numpy


def composition_tensor(n):
    obj = transgress(make_branes({"a": n}))
    return obj.chi["a", "a", "a"].coeffs


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; only the numpy path is available")
    rows = []
    for n in (2, 3, 4, 5, 6):
        c = np.ascontiguousarray(composition_tensor(n))
        t_np = best(lambda: assoc_residual_numpy(c, c, c, c), args.repeat)
        t_nb = float("nan")
        if _accel.HAVE_NUMBA:
            r_nb = assoc_residual_numba(c, c, c, c)
            r_np = assoc_residual_numpy(c, c, c, c)
            assert abs(r_nb[0] - r_np[0]) < 1e-12
            t_nb = best(lambda: assoc_residual_numba(c, c, c, c), args.repeat)
        rows.append((f"assoc M_{n}(C) (dim {n * n})", t_np, t_nb))

    obj = transgress(make_branes({"1": 2, "2": 3, "3": 4}))
    saved = _accel.USE_NUMBA
    try:
        _accel.USE_NUMBA = False
        t_np = best(lambda: check_lbg(obj), args.repeat)
        t_nb = float("nan")
        if _accel.HAVE_NUMBA:
            _accel.USE_NUMBA = True
            check_lbg(obj)
            t_nb = best(lambda: check_lbg(obj), args.repeat)
    finally:
        _accel.USE_NUMBA = saved
    rows.append(("check_lbg {C^2, C^3, C^4}", t_np, t_nb))

    print(f"{'case':34} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for name, a, b in rows:
        print(f"{name:34} {a * 1e3:11.3f} {b * 1e3:11.3f} {a / b:8.2f}")


if __name__ == "__main__":
    main()
