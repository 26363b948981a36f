"""Benchmark the compiled kernels against the pure-Python fallback.

Both implementations consume identical random streams, so besides timing
the script asserts that the outputs agree exactly. Run from the repo root:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import math
import time

import numpy as np

from restartbandits import kernels
from restartbandits.arms import (
    ArmSpec,
    BernoulliReward,
    ConstantReward,
    Empirical,
    Exponential,
    Pareto,
    ZeroReset,
)
from restartbandits.satlab import generate_random_3sat
from restartbandits.sim import episode_rngs


def bench(label, fn, repeats):
    # warm once so the first-call overhead is not measured
    out = fn()
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_walksat(impls, repeats):
    formula = generate_random_3sat(100, 420, seed=3)
    lits, offsets = formula.flatten()
    rows = []
    for name, impl in impls.items():
        out, secs = bench(
            name,
            lambda impl=impl: impl.walksat_run(
                formula.n_vars, lits, offsets, 0.5, 200_000,
                np.random.default_rng(0),
            ),
            repeats,
        )
        rows.append((name, secs, (out[0], out[1])))
    return "walksat_run (100 vars, 200k flips)", rows


def bench_fixed(impls, repeats):
    arm = ArmSpec(Pareto(1.0, 1.5), BernoulliReward(0.8), ZeroReset())
    rows = []
    for name, impl in impls.items():
        out, secs = bench(
            name,
            lambda impl=impl: kernels.run_fixed_episode(
                arm, 2.0, 50_000.0, np.random.default_rng(1), impl=impl
            ),
            repeats,
        )
        rows.append((name, secs, out))
    return "run_fixed_episode (Pareto arm, tau=5e4)", rows


def bench_ucb_rb(impls, repeats):
    emp = tuple(np.sort(np.random.default_rng(2).pareto(1.5, 100) + 1.0))
    arms = [
        ArmSpec(Empirical(emp), ConstantReward(1.0), ZeroReset()),
        ArmSpec(Exponential(1.0), ConstantReward(0.5), ZeroReset()),
    ]
    grid = (1.0, 3.0, 9.0)
    rows = []
    for name, impl in impls.items():
        out, secs = bench(
            name,
            lambda impl=impl: kernels.run_ucb_rb_episode(
                arms, grid, 20_000.0, 2.01, 1.01, 1,
                episode_rngs(7, len(arms)), impl=impl,
            ),
            repeats,
        )
        rows.append((name, secs, out[:3]))
    return "run_ucb_rb_episode (2 arms x 3 cutoffs, tau=2e4)", rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per case (best is reported)")
    args = parser.parse_args()

    impls = kernels.implementations()
    print(f"available implementations: {', '.join(impls)}")
    if "cython" not in impls:
        print("compiled extension not built; timing the fallback only")

    for title, rows in (
        bench_walksat(impls, args.repeats),
        bench_fixed(impls, args.repeats),
        bench_ucb_rb(impls, args.repeats),
    ):
        print(f"\n{title}")
        base = None
        for name, secs, out in rows:
            if base is None:
                base = secs
            print(f"  {name:<8} {secs * 1e3:10.2f} ms   x{base / secs:.1f}")
        # element-wise equality: identical values regardless of scalar wrapper
        first = rows[0][2]
        if any(not all(a == b for a, b in zip(first, out)) for _, _, out in rows[1:]):
            raise SystemExit(f"implementations disagree on {title}")
        print("  outputs identical across implementations")


if __name__ == "__main__":
    main()
