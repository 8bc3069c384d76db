"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call includes JIT compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from postselect import kernels
from postselect.postrp import counting_formula


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--vars", type=int, default=20, help="variables in the counting benchmark")
    args = ap.parse_args(argv)

    tables = np.arange(1 << 16, dtype=np.int64)
    lits = counting_formula(args.vars, 12345).literal_matrix
    jobs = {
        "sweep_bipartite (65536 tables)": lambda nb: kernels.sweep_bipartite(tables, use_numba=nb),
        f"count_assignments (n={args.vars})": lambda nb: kernels.count_assignments(lits, args.vars, use_numba=nb),
    }

    print(f"{'kernel':<34} {'numpy s':>9} {'numba s':>9} {'jit s':>8} {'speedup':>8}")
    for name, job in jobs.items():
        t_np = best_of(lambda: job(False), args.repeat)
        if kernels.HAVE_NUMBA:
            t0 = time.perf_counter()
            job(True)
            jit = time.perf_counter() - t0
            t_nb = best_of(lambda: job(True), args.repeat)
            print(f"{name:<34} {t_np:9.4f} {t_nb:9.4f} {jit:8.3f} {t_np / t_nb:7.1f}x")
        else:
            print(f"{name:<34} {t_np:9.4f} {'-':>9} {'-':>8} {'-':>8}")


if __name__ == "__main__":
    main()
