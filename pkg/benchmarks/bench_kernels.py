"""Compare the compiled core with the NumPy fallback on the hot loops.

Usage: python3 benchmarks/bench_kernels.py [--repeat 5] [--json out.json]
"""

import argparse
import json
import sys
import timeit

import numpy as np

from nonstat import _kernels_py
from nonstat.dgp import farima_acf_vector

try:
    from nonstat import _kernels as _ext
except ImportError:
    _ext = None


def cases():
    rng = np.random.default_rng(0)
    n_dl = 2000
    acf, e = farima_acf_vector(0.3, n_dl), rng.standard_normal(n_dl)
    x = rng.standard_normal(2000).cumsum()
    coef = np.where(rng.random(20_000) < 0.5, 1.0, 0.5)
    z = rng.standard_normal(20_000)
    phi = np.sqrt(rng.beta(1.0, 1.5, 1000))
    x0 = rng.standard_normal(1000)
    eps = rng.standard_normal((500, 1000))
    return {
        "durbin_levinson_sample n=2000": ("durbin_levinson_sample", (acf, e)),
        "trig_sums n=2000 s=25": ("trig_sums", (x, 25)),
        "frac_diff_filter n=2000": ("frac_diff_filter", (x, 0.5)),
        "tvar_filter n=20000 (switching)": ("tvar_filter", (coef, z, 0.0)),
        "ar1_panel_sum n=500 M=1000": ("ar1_panel_sum", (phi, x0, eps)),
    }


def best_time(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    loops, _ = timer.autorange()
    return min(timer.repeat(repeat, loops)) / loops


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", help="also write results to this file")
    args = ap.parse_args(argv)
    if _ext is None:
        print("compiled extension not available; only the fallback is timed", file=sys.stderr)
    rows = []
    print(f"{'kernel':36s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speed-up':>9s}")
    for label, (name, fargs) in cases().items():
        t_py = best_time(getattr(_kernels_py, name), fargs, args.repeat)
        t_cy = best_time(getattr(_ext, name), fargs, args.repeat) if _ext else float("nan")
        rows.append({"kernel": label, "python_s": t_py, "cython_s": t_cy})
        print(f"{label:36s} {1e3 * t_py:12.3f} {1e3 * t_cy:12.3f} {t_py / t_cy:8.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
