#!/usr/bin/env python3
"""Time the compiled sampling kernel against the pure-numpy fallback.

Both kernels must return bit-identical arrays for the same seed; this
script asserts that before reporting throughput, serially and (for the
compiled kernel, which releases the GIL) across worker threads.

Usage: python benchmarks/bench_mc_kernel.py [--trials N] [--monitors M]
       [--channels C] [--seed S]
"""

import argparse
import importlib
import time

import numpy as np

from d2d_underlay import montecarlo
from d2d_underlay import _mc_fallback


def load_compiled():
    try:
        return importlib.import_module("d2d_underlay._mc_kernel")
    except ImportError:
        return None


def sample_with(backend, seed, trials, monitors, channels, workers):
    previous = montecarlo._backend
    montecarlo._backend = backend
    try:
        return montecarlo.sample_effective_gains(
            seed, trials, monitors, channels, workers=workers, cache=False
        )
    finally:
        montecarlo._backend = previous


def timed(fn, repeat=1):
    best = None
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return result, best


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--trials", type=int, default=200_000)
    parser.add_argument("--monitors", type=int, default=20)
    parser.add_argument("--channels", type=int, default=20)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--repeat", type=int, default=2)
    args = parser.parse_args()

    draws = args.trials * (args.monitors * args.channels + 1)
    print(f"{args.trials} trials of {args.monitors}x{args.channels} "
          f"({draws / 1e6:.1f}M draws), seed {args.seed}")

    (eff_py, ann_py), t_py = timed(
        lambda: sample_with(_mc_fallback, args.seed, args.trials,
                            args.monitors, args.channels, workers=1),
        args.repeat,
    )
    print(f"python fallback          : {t_py:8.3f}s  ({draws / t_py / 1e6:6.1f} Mdraw/s)")

    compiled = load_compiled()
    if compiled is None:
        print("compiled kernel          : not built (pip install without "
              "D2D_UNDERLAY_SKIP_KERNEL to enable)")
        return

    (eff_c1, ann_c1), t_c1 = timed(
        lambda: sample_with(compiled, args.seed, args.trials,
                            args.monitors, args.channels, workers=1),
        args.repeat,
    )
    print(f"compiled, 1 worker       : {t_c1:8.3f}s  ({draws / t_c1 / 1e6:6.1f} Mdraw/s, "
          f"{t_py / t_c1:4.2f}x fallback)")

    workers = montecarlo._default_workers()
    (eff_cn, ann_cn), t_cn = timed(
        lambda: sample_with(compiled, args.seed, args.trials,
                            args.monitors, args.channels, workers=workers),
        args.repeat,
    )
    print(f"compiled, {workers} workers      : {t_cn:8.3f}s  ({draws / t_cn / 1e6:6.1f} Mdraw/s, "
          f"{t_py / t_cn:4.2f}x fallback)")

    assert np.array_equal(eff_py, eff_c1) and np.array_equal(ann_py, ann_c1), \
        "compiled kernel diverged from the fallback"
    assert np.array_equal(eff_c1, eff_cn) and np.array_equal(ann_c1, ann_cn), \
        "threaded run diverged from the serial run"
    print("bit-identity             : OK (fallback == compiled == threaded)")


if __name__ == "__main__":
    main()
