"""Time the numba and numpy paths of both hot kernels.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import time

import numpy as np

from netcfg import _kernels, classical, experiments


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def enumeration_case():
    t, sources, responses = classical.random_classical_network(7, 5, 6, 3, 9)
    return lambda use: classical.classical_joint(t, sources, responses, use_numba=use)


def margin_case():
    exp = experiments._expansion("noisy_star", 0.6, 5, None)
    vs = experiments.cell_centres(200, 0, 1)
    weights = experiments._weights_for("fin3", 5, 1000)
    joint = exp.joint(vs)
    margs = experiments._batch_marginals(joint, exp.alphabets)
    return lambda use: _kernels.max_margin(joint, margs, exp.alphabets, weights, support_only=False, use_numba=use)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        print("numba not importable; only the numpy path is available")
    print(f"{'kernel':<14}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, make in (("enumeration", enumeration_case), ("margins", margin_case)):
        run = make()
        run(True)  # compile outside the timed region
        fast = best_of(lambda: run(True), args.repeat) if _kernels.HAVE_NUMBA else math.nan
        slow = best_of(lambda: run(False), args.repeat)
        print(f"{name:<14}{fast:>12.4f}{slow:>12.4f}{slow / fast:>10.2f}")


if __name__ == "__main__":
    main()
