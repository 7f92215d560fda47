"""Time the numba kernels against their numpy fallbacks and check they agree.

    python3 benchmarks/bench_kernels.py [--size 200000] [--repeat 5]
"""
import argparse
import time

import numpy as np

from fockse import kernels, sums


def best_of(fn, repeat):
    fn()  # warm-up, includes compilation for numba
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(size):
    rng = np.random.default_rng(0)
    t = rng.exponential(3.0, size)
    u = rng.random(size // 4)
    table = sums.mean_table(5, 3)
    cross = sums.cross_table(4)
    Gammas = np.geomspace(0.01, 100, 2001)
    Gammas = Gammas[np.abs(Gammas - 1) > 1e-3]
    t1 = rng.exponential(1.0, size // 20)
    tN = t1 + rng.exponential(2.0, size // 20)
    # The signed term sums cancel heavily, so agreement is measured against
    # the sum of absolute terms (the same kernel with |coef|), not the result.
    def power(coef):
        return lambda f: f(coef, table.eg, table.eG, table.eP, table.ra, 2, 1.0, Gammas)

    def grid(coef):
        return lambda f: f(coef, cross.eg, cross.eG, cross.eP, cross.ra, cross.rb, 1.0, 3.0, t1, tN)

    return [
        ("density_tail", lambda f: f(t, 1.0, 2.0)[0], None, kernels.density_tail_numba, kernels.density_tail_numpy),
        ("inverse_cdf", lambda f: f(u, 1.0, 1.0), None, kernels.inverse_cdf_numba, kernels.inverse_cdf_numpy),
        ("term_sum_power", power(table.coef), power(np.abs(table.coef)),
         kernels.term_sum_power_numba, kernels.term_sum_power_numpy),
        ("term_grid_exp", grid(cross.coef), grid(np.abs(cross.coef)),
         kernels.term_grid_exp_numba, kernels.term_grid_exp_numpy),
    ]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':16s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, call, scale_call, fast, slow in cases(args.size):
        a = np.asarray(call(fast))
        b = np.asarray(call(slow))
        scale = np.abs(b) if scale_call is None else np.asarray(scale_call(slow))
        diff = np.max(np.abs(a - b) / np.maximum(scale, 1e-300))
        tf = best_of(lambda: call(fast), args.repeat)
        ts = best_of(lambda: call(slow), args.repeat)
        print(f"{name:16s} {1e3 * tf:11.2f} {1e3 * ts:11.2f} {ts / tf:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
