"""Compare the numpy and numba variants of the three hot kernels.

Usage:
    python3 benchmarks/kernel_benchmark.py [--samples N] [--grid N] [--repeat N]

For each kernel the script first checks both variants produce the same
answer on the benchmark inputs, then reports best-of-N wall times.  Without
numba installed it still times the numpy path and says so.
"""

import argparse
import time

import numpy as np

from polsim import kernels


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def mc_inputs(samples, rng):
    u = rng.random((3, samples))
    return (u[0], u[1], u[2], 0.84, 0.31, 0.47)


def nll_inputs(rng):
    params = np.array([150.0, 120.0, 40.0, -25.0])
    pxx = rng.random(4)
    pyy = rng.random(4)
    rexy = rng.random(4) - 0.5
    imxy = rng.random(4) - 0.5
    counts = rng.integers(100, 50_000, size=4).astype(np.float64)
    return (params, pxx, pyy, rexy, imxy, counts, 1e-12 * (counts.sum() + 1.0))


def batch_inputs(grid, rng):
    single = nll_inputs(rng)
    params = single[0][None, :] + rng.normal(scale=5.0, size=(grid, 4))
    return (params,) + single[1:]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=2_000_000,
                        help="Monte-Carlo samples (default 2e6)")
    parser.add_argument("--grid", type=int, default=200_000,
                        help="batch likelihood grid rows (default 2e5)")
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repeats, best is reported (default 5)")
    args = parser.parse_args()

    rng = np.random.default_rng(2026)
    cases = [
        ("mc_detection_count", kernels.mc_detection_count_numpy,
         kernels.mc_detection_count_numba, mc_inputs(args.samples, rng)),
        ("nll_poisson_grad", kernels.nll_poisson_grad_numpy,
         kernels.nll_poisson_grad_numba, nll_inputs(rng)),
        ("nll_poisson_batch", kernels.nll_poisson_batch_numpy,
         kernels.nll_poisson_batch_numba, batch_inputs(args.grid, rng)),
    ]

    print(f"active backend: {kernels.active_backend()}"
          f" (numba {'available' if kernels.HAS_NUMBA else 'NOT available'})")
    print(f"samples={args.samples}  grid={args.grid}  repeat={args.repeat}")
    print()
    print(f"{'kernel':<22}{'numpy':>12}{'numba':>12}{'speedup':>10}")

    for name, fn_numpy, fn_numba, inputs in cases:
        t_numpy = best_time(lambda: fn_numpy(*inputs), args.repeat)
        if kernels.HAS_NUMBA:
            got_np = fn_numpy(*inputs)
            got_nb = fn_numba(*inputs)  # first call also compiles
            if name == "nll_poisson_grad":
                same = (np.isclose(got_np[0], got_nb[0], rtol=1e-12)
                        and np.allclose(got_np[1], got_nb[1], rtol=1e-12))
            else:
                same = np.allclose(got_np, got_nb, rtol=1e-12)
            if not same:
                raise SystemExit(f"{name}: numpy and numba answers disagree")
            t_numba = best_time(lambda: fn_numba(*inputs), args.repeat)
            print(f"{name:<22}{t_numpy * 1e3:>10.2f}ms{t_numba * 1e3:>10.2f}ms"
                  f"{t_numpy / t_numba:>9.1f}x")
        else:
            print(f"{name:<22}{t_numpy * 1e3:>10.2f}ms{'-':>12}{'-':>10}")

    if not kernels.HAS_NUMBA:
        print("\nnumba missing: only the fallback path was timed")


if __name__ == "__main__":
    main()
