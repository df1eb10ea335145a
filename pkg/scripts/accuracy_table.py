"""Average best approximation ratio per graph size, 10 seeded instances each.

Defaults mirror the benchmark protocol: ring bond 10, depth 1, 100 iterations
of gradient descent, learning rate 0.05.

    python scripts/accuracy_table.py --sizes 6,8,10 --out table.csv
"""

import argparse
import sys
import time

import numpy as np

from trvqe import OptimizerConfig, TensorRingBackend, random_graph, run_vqe


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="6,8,10")
    parser.add_argument("--seeds", type=int, default=10)
    parser.add_argument("--chi", type=int, default=10)
    parser.add_argument("--depth", type=int, default=1)
    parser.add_argument("--iters", type=int, default=100)
    parser.add_argument("--lr", type=float, default=0.05)
    parser.add_argument("--out", default=None, help="optional CSV path")
    args = parser.parse_args()

    rows = ["size,mean_best_ratio,min_best_ratio,max_best_ratio,seconds"]
    print(f"{'size':>5} {'mean':>8} {'min':>8} {'max':>8} {'sec':>7}")
    for size in (int(s) for s in args.sizes.split(",")):
        started = time.perf_counter()
        ratios = []
        for seed in range(args.seeds):
            config = OptimizerConfig(
                iterations=args.iters,
                learning_rate=args.lr,
                seed=seed,
                bond_dim=args.chi,
                depth=args.depth,
            )
            trace = run_vqe(TensorRingBackend(args.chi), random_graph(size, seed), config)
            ratios.append(trace.best_ratio)
        took = time.perf_counter() - started
        mean, low, high = float(np.mean(ratios)), float(np.min(ratios)), float(np.max(ratios))
        print(f"{size:>5} {mean:>8.4f} {low:>8.4f} {high:>8.4f} {took:>7.1f}")
        rows.append(f"{size},{mean!r},{low!r},{high!r},{took:.1f}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
