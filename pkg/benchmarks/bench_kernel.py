"""Benchmark: compiled sampling kernel vs the pure-Python fallback.

Times the five-cell multinomial draw (the hot inner loop of every simulation)
on both backends and verifies they produce identical counts while doing so.

    python benchmarks/bench_kernel.py [--arms 2000] [--n 100000]
"""

import argparse
import time

from surrmeta.kernel import available_backends
from surrmeta.model import scenario_table, to_joint

CELLS = to_joint(scenario_table()[0].control).as_tuple()


def run(backend, arms, n):
    t0 = time.perf_counter()
    out = [backend.sample_cells(state, n, *CELLS) for state in range(arms)]
    return time.perf_counter() - t0, out


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--arms", type=int, default=2000, help="arm draws per backend")
    ap.add_argument("--n", type=int, default=100000, help="subjects per arm")
    args = ap.parse_args()

    backends = available_backends()
    results = {}
    print(f"multinomial arm draws: {args.arms} arms x n={args.n}")
    print(f"{'backend':<10}{'total s':>10}{'us/arm':>12}{'arms/s':>12}")
    for name in sorted(backends):
        # python fallback gets a smaller slice; its rate is what matters
        arms = args.arms if name != "python" else max(10, args.arms // 40)
        elapsed, out = run(backends[name], arms, args.n)
        results[name] = out
        print(
            f"{name:<10}{elapsed:>10.3f}{1e6 * elapsed / arms:>12.1f}"
            f"{arms / elapsed:>12.0f}"
        )

    if len(results) == 2:
        overlap = min(len(results["python"]), len(results["compiled"]))
        assert results["python"][:overlap] == results["compiled"][:overlap], (
            "backends disagree"
        )
        print(f"outputs identical on the first {overlap} draws: yes")
    else:
        print("compiled backend not built; nothing to compare")


if __name__ == "__main__":
    main()
