"""Gradient distance between the ring backend and exact simulation, swept
over bond dimension, circuit depth, and graph size.

    python scripts/gradient_fidelity.py --points 50 --out-dir results/
"""

import argparse
import sys
from pathlib import Path

from trvqe.cli import gradcheck_grid


def write_rows(rows, path):
    lines = ["qubits,depth,chi,mean_distance"]
    lines += [f"{r['qubits']},{r['depth']},{r['chi']},{r['mean_distance']!r}" for r in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    # bond sweep at fixed size/depth
    rows = gradcheck_grid(10, [3], [2, 4, 8, 16], args.points, args.seed)
    write_rows(rows, out / "distance_vs_chi.csv")
    for r in rows:
        print(f"chi={r['chi']:>3}: mean distance {r['mean_distance']:.6f}")

    # depth sweep at fixed bond
    rows = gradcheck_grid(10, [1, 2, 3], [10], args.points, args.seed)
    write_rows(rows, out / "distance_vs_depth.csv")
    for r in rows:
        print(f"D={r['depth']}: mean distance {r['mean_distance']:.6f}")

    # size sweep at the benchmark defaults
    size_rows = []
    for size in (6, 8, 10, 12):
        size_rows += gradcheck_grid(size, [1], [10], args.points, args.seed)
    write_rows(size_rows, out / "distance_vs_size.csv")
    for r in size_rows:
        print(f"N={r['qubits']:>3}: mean distance {r['mean_distance']:.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
