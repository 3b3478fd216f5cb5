"""Benchmark the numba partial-trace kernel against the numpy fallback.

Times ``ptrace_outer`` on random pure states for a grid of (L, L_A)
shapes, checks that both implementations agree, and prints the median
per-call time and speedup.  Run from the repository root:

    python benchmarks/bench_kernels.py [--sizes 8 10 12] [--repeats 20]
"""

import argparse
import time

import numpy as np

from relaxometer import _kernels


def run_numpy(psi, phi, L, first, length):
    return _kernels._ptrace_outer_numpy(psi, phi, L, first, length)


def run_numba(psi, phi, L, first, length):
    # bit maps are cached in the library; build them outside the hot path
    maps = _kernels._MAP_CACHE.get((L, first, length))
    if maps is None:
        maps = _kernels._bit_maps(L, first, length)
        _kernels._MAP_CACHE[(L, first, length)] = maps
    return _kernels._ptrace_outer_numba(psi, phi, *maps)


def median_time(fn, args, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 10, 12, 14])
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not _kernels.USE_NUMBA:
        raise SystemExit(
            "numba path disabled (RELAXOMETER_NO_NUMBA set); nothing to compare"
        )

    rng = np.random.default_rng(args.seed)
    print(f"{'L':>3} {'L_A':>4} {'numpy [ms]':>11} {'numba [ms]':>11} {'speedup':>8}")
    for L in args.sizes:
        psi = rng.standard_normal(2**L) + 1j * rng.standard_normal(2**L)
        psi /= np.linalg.norm(psi)
        phi = rng.standard_normal(2**L) + 1j * rng.standard_normal(2**L)
        phi /= np.linalg.norm(phi)
        for length in (L // 4, L // 2):
            call = (psi, phi, L, 1, length)
            ref = run_numpy(*call)
            jit = run_numba(*call)  # first call includes compilation
            if np.max(np.abs(ref - jit)) > 1e-12:
                raise SystemExit(f"kernel mismatch at L={L}, L_A={length}")
            t_np = median_time(run_numpy, call, args.repeats)
            t_nb = median_time(run_numba, call, args.repeats)
            print(
                f"{L:>3} {length:>4} {1e3 * t_np:>11.3f} {1e3 * t_nb:>11.3f}"
                f" {t_np / t_nb:>7.1f}x"
            )


if __name__ == "__main__":
    main()
