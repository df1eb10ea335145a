"""Per-iteration runtime scaling of the ring backend over circuit depth and
graph size. Thin wrapper over the bench-runtime machinery.

    python scripts/runtime_scaling.py --repeats 5 --out-dir results/
"""

import argparse
import json
import sys
from pathlib import Path

from trvqe.cli import bench_runtime_grid


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--chi", type=int, default=10)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--depths", default="1,2,4,8")
    parser.add_argument("--qubit-sizes", default="6,8,10,14")
    parser.add_argument("--out-dir", default="results")
    args = parser.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    depth_grid = [int(v) for v in args.depths.split(",")]
    report = bench_runtime_grid("depth", depth_grid, 10, 1, args.chi, args.repeats, args.seed)
    (out / "runtime_vs_depth.json").write_text(json.dumps(report, indent=1))
    for cell in report["cells"]:
        print(f"depth {cell['value']:>2}: median {cell['median_ms']:.3f} ms")
    print(f"fit: {report['fit']['slope_ms']:.3f} ms per depth unit")

    size_grid = [int(v) for v in args.qubit_sizes.split(",")]
    report = bench_runtime_grid("qubits", size_grid, 10, 1, args.chi, args.repeats, args.seed)
    (out / "runtime_vs_qubits.json").write_text(json.dumps(report, indent=1))
    for cell in report["cells"]:
        print(f"qubits {cell['value']:>2}: median {cell['median_ms']:.3f} ms")
    print(f"fit: {report['fit']['slope_ms']:.3f} ms per qubit")
    return 0


if __name__ == "__main__":
    sys.exit(main())
