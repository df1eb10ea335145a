"""Command-line front end: end-to-end Max-Cut solves, runtime-scaling
benchmarks, gradient-fidelity sweeps, and graph generation.

Commands write CSV/JSON only and are deterministic given their seeds, apart
from wall-clock columns. Files are written atomically (temp file + rename).
TRVQE_THREADS caps the worker pool used for shifted-circuit evaluations.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import statistics
import sys
import time
from pathlib import Path

import numpy as np

from ._batch import _single_threaded_blas
from .circuits import build_ansatz, load_circuit
from .maxcut import (
    WeightedGraph,
    hamiltonian_from_graph,
    load_graph,
    random_graph,
    save_graph,
)
from .optimize import (
    ExactBackend,
    OptimizerConfig,
    TensorRingBackend,
    initial_parameters,
    parameter_shift_gradient,
    run_vqe,
    sample_parameter_points,
    write_trace_csv,
    write_trace_json,
)

DEFAULT_CHI = 10
DEFAULT_DEPTH = 1
DEFAULT_ITERS = 100
DEFAULT_LR = 0.05


def _write_text_atomic(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def _fingerprint() -> dict:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "cpu_count": os.cpu_count(),
    }


def _resolve_graph(args) -> tuple[WeightedGraph, str]:
    if args.graph is not None:
        if args.gen is not None:
            raise ValueError("--graph and --gen are mutually exclusive")
        return load_graph(args.graph), args.graph
    if args.gen is None:
        raise ValueError("provide a problem with --graph PATH or --gen K")
    return random_graph(args.gen, args.seed), f"generated(K={args.gen}, seed={args.seed})"


def _make_backend(args):
    if args.backend == "exact":
        if args.chi is not None:
            print("warning: --chi is ignored by the exact backend", file=sys.stderr)
        return ExactBackend()
    return TensorRingBackend(args.chi if args.chi is not None else DEFAULT_CHI)


def cmd_solve(args) -> int:
    graph, source = _resolve_graph(args)
    backend = _make_backend(args)
    config = OptimizerConfig(
        iterations=args.iters,
        learning_rate=args.lr,
        seed=args.seed,
        init_strategy=args.init,
        bond_dim=getattr(backend, "bond_dim", None),
        depth=args.depth,
        fix_node=args.fix_node,
    )
    out_dir = Path(args.out)

    started = time.perf_counter()
    trace = run_vqe(backend, graph, config)
    total_s = time.perf_counter() - started
    trace.meta["graph_source"] = source
    trace.meta["total_s"] = total_s

    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "trace.csv"
    json_path = out_dir / "trace.json"
    tmp = out_dir / "trace.csv.tmp"
    write_trace_csv(trace, str(tmp))
    os.replace(tmp, csv_path)
    tmp = out_dir / "trace.json.tmp"
    write_trace_json(trace, str(tmp))
    os.replace(tmp, json_path)

    ratio = trace.best_ratio
    ratio_text = "n/a" if ratio is None else f"{ratio:.4f}"
    print(
        f"solve {source}: qubits={trace.meta['num_qubits']} backend={backend.name} "
        f"final_energy={trace.records[-1].energy:.6f} best_energy={trace.best_energy:.6f} "
        f"best_ratio={ratio_text} total_s={total_s:.2f} -> {csv_path}"
    )
    return 0


class _BenchCell:
    """One grid cell's per-iteration unit: a full energy evaluation of the
    ansatz plus the parameter update from an already-evaluated gradient.

    The gradient is evaluated once at setup, outside any timed region: its
    2P circuit runs scale with the parameter count, which itself grows with
    depth, while the timed unit is the piece whose cost the ring
    representation bounds.
    """

    def __init__(self, value: int, num_qubits: int, depth: int, bond_dim: int, seed: int):
        self.value = value
        self.ham = hamiltonian_from_graph(random_graph(num_qubits, seed))
        self.circuit = build_ansatz(num_qubits, depth)
        self.params = initial_parameters(self.circuit.param_count, seed)
        self.backend = TensorRingBackend(bond_dim)
        self.gradient = parameter_shift_gradient(
            self.backend, self.circuit, self.params, self.ham
        )

    def run_once(self, learning_rate: float = DEFAULT_LR) -> float:
        started = time.perf_counter()
        self.backend.energy(self.circuit, self.params, self.ham)
        _ = self.params - learning_rate * self.gradient
        return (time.perf_counter() - started) * 1e3


def bench_runtime_grid(
    param_name: str,
    values: list[int],
    fixed_qubits: int,
    fixed_depth: int,
    bond_dim: int,
    repeats: int,
    seed: int,
) -> dict:
    """Median per-iteration time across a depth or qubit grid, plus a linear
    least-squares fit of median against the grid coordinate.

    Repetitions are interleaved round-robin over the cells (after one
    discarded warm-up round), so machine-speed drift during the run biases
    every cell equally instead of whichever happened to be measured in a
    slow stretch; the starting cell rotates each round so no cell always
    runs in the cache shadow of the same neighbor.
    """
    if repeats < 3:
        raise ValueError(f"need at least 3 repetitions per cell, got {repeats}")
    if values != sorted(values) or len(set(values)) != len(values):
        raise ValueError(f"grid values must be strictly increasing, got {values}")
    grid = [
        _BenchCell(
            v,
            v if param_name == "qubits" else fixed_qubits,
            v if param_name == "depth" else fixed_depth,
            bond_dim,
            seed,
        )
        for v in values
    ]
    samples: dict[int, list[float]] = {cell.value: [] for cell in grid}
    # let leftover worker threads park, then keep BLAS single-threaded while
    # timing: these are sub-millisecond units and pool handoffs only add noise
    time.sleep(0.25)
    with _single_threaded_blas():
        for rep in range(repeats + 1):
            for offset in range(len(grid)):
                cell = grid[(rep + offset) % len(grid)]
                elapsed = cell.run_once()
                if rep > 0:  # first full round warms caches and allocators
                    samples[cell.value].append(elapsed)
    cells = [
        {"value": cell.value, "median_ms": statistics.median(samples[cell.value]), "reps": repeats}
        for cell in grid
    ]
    xs = np.array([c["value"] for c in cells], dtype=float)
    ys = np.array([c["median_ms"] for c in cells], dtype=float)
    if len(cells) >= 2:
        slope, intercept = np.polyfit(xs, ys, 1)
    else:
        slope, intercept = 0.0, float(ys[0])
    return {
        "param": param_name,
        "bond_dim": bond_dim,
        "fixed_qubits": fixed_qubits,
        "fixed_depth": fixed_depth,
        "repeats": repeats,
        "seed": seed,
        "cells": cells,
        "fit": {"slope_ms": float(slope), "intercept_ms": float(intercept)},
        "fingerprint": _fingerprint(),
    }


def _parse_int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


def cmd_bench_runtime(args) -> int:
    if (args.depths is None) == (args.qubits_list is None):
        raise ValueError("specify exactly one grid: --depths or --qubits-list")
    if args.depths is not None:
        report = bench_runtime_grid(
            "depth", _parse_int_list(args.depths), args.qubits, DEFAULT_DEPTH,
            args.chi if args.chi is not None else DEFAULT_CHI, args.repeats, args.seed,
        )
    else:
        report = bench_runtime_grid(
            "qubits", _parse_int_list(args.qubits_list), args.qubits, args.depth,
            args.chi if args.chi is not None else DEFAULT_CHI, args.repeats, args.seed,
        )

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = ["param,value,median_ms,reps"]
    rows += [
        f"{report['param']},{c['value']},{c['median_ms']!r},{c['reps']}"
        for c in report["cells"]
    ]
    _write_text_atomic(out_dir / "bench.csv", "\n".join(rows) + "\n")
    _write_text_atomic(out_dir / "bench.json", json.dumps(report, indent=1) + "\n")
    print(
        f"bench-runtime over {report['param']} {[c['value'] for c in report['cells']]}: "
        f"medians_ms={[round(c['median_ms'], 3) for c in report['cells']]} "
        f"fit_slope={report['fit']['slope_ms']:.3f} ms/{report['param']} -> {out_dir / 'bench.csv'}"
    )
    return 0


def gradcheck_grid(
    num_qubits: int,
    depths: list[int],
    chis: list[int],
    points: int,
    seed: int,
    circuit_path: str | None = None,
    max_workers: int | None = None,
) -> list[dict]:
    """Mean gradient distance between the ring backend and the exact one for
    every (depth, chi) cell, on one seeded graph instance.

    Matches gradient_distance cell by cell (same seeded sample points); the
    exact-backend gradients are computed once per depth and shared across
    the chi sweep.
    """
    if num_qubits > 16:
        raise ValueError("gradcheck needs the exact backend; keep qubits <= 16")
    graph = random_graph(num_qubits, seed)
    ham = hamiltonian_from_graph(graph)
    rows = []
    fixed_circuit = load_circuit(circuit_path) if circuit_path else None
    if fixed_circuit is not None and fixed_circuit.num_qubits != num_qubits:
        raise ValueError(
            f"--circuit is on {fixed_circuit.num_qubits} qubits, --qubits is {num_qubits}"
        )
    exact = ExactBackend()
    for depth in depths if fixed_circuit is None else [None]:
        circuit = fixed_circuit if fixed_circuit is not None else build_ansatz(num_qubits, depth)
        grid_points = sample_parameter_points(circuit.param_count, points, seed)
        exact_grads = [
            parameter_shift_gradient(exact, circuit, pt, ham, max_workers)
            for pt in grid_points
        ]
        for chi in chis:
            ring = TensorRingBackend(chi)
            dists = [
                np.linalg.norm(
                    parameter_shift_gradient(ring, circuit, pt, ham, max_workers) - ge
                )
                for pt, ge in zip(grid_points, exact_grads)
            ]
            rows.append(
                {
                    "qubits": num_qubits,
                    "depth": depth,
                    "chi": chi,
                    "mean_distance": float(np.mean(dists)),
                }
            )
    return rows


def cmd_gradcheck(args) -> int:
    rows = gradcheck_grid(
        args.qubits,
        _parse_int_list(args.depths),
        _parse_int_list(args.chis),
        args.points,
        args.seed,
        args.circuit,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = ["qubits,depth,chi,mean_distance"]
    for r in rows:
        depth = "" if r["depth"] is None else r["depth"]
        lines.append(f"{r['qubits']},{depth},{r['chi']},{r['mean_distance']!r}")
    _write_text_atomic(out_dir / "gradcheck.csv", "\n".join(lines) + "\n")
    print(f"gradcheck: {len(rows)} cells -> {out_dir / 'gradcheck.csv'}")
    return 0


def cmd_gen_graph(args) -> int:
    graph = random_graph(args.nodes, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.with_name(out.name + ".tmp.json" if out.suffix == ".json" else out.name + ".tmp")
    save_graph(graph, str(tmp))
    os.replace(tmp, out)
    print(f"gen-graph: K={args.nodes} seed={args.seed} edges={len(graph.edges)} -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trvqe",
        description="Tensor-ring VQE Max-Cut solver and benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="train the ansatz on one Max-Cut instance")
    solve.add_argument("--graph", help="edge-list or .json graph file")
    solve.add_argument("--gen", type=int, metavar="K", help="generate a K-node instance")
    solve.add_argument("--seed", type=int, default=0)
    solve.add_argument("--chi", type=int, default=None, help=f"ring bond dimension (default {DEFAULT_CHI})")
    solve.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    solve.add_argument("--iters", type=int, default=DEFAULT_ITERS)
    solve.add_argument("--lr", type=float, default=DEFAULT_LR)
    solve.add_argument("--backend", choices=("tr", "exact"), default="tr")
    solve.add_argument("--fix-node", action="store_true", help="pin the last node, solving on K-1 qubits")
    solve.add_argument("--init", choices=("random", "zeros"), default="random")
    solve.add_argument("--out", default="out", help="output directory")
    solve.set_defaults(func=cmd_solve)

    bench = sub.add_parser("bench-runtime", help="per-iteration runtime scaling grid")
    bench.add_argument("--qubits", type=int, default=10, help="fixed N for the depth grid")
    bench.add_argument("--depth", type=int, default=DEFAULT_DEPTH, help="fixed depth for the qubit grid")
    bench.add_argument("--depths", help="comma list, e.g. 1,2,4,8")
    bench.add_argument("--qubits-list", help="comma list, e.g. 6,8,10,14")
    bench.add_argument("--chi", type=int, default=None)
    bench.add_argument("--repeats", type=int, default=3)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--out", default="out")
    bench.set_defaults(func=cmd_bench_runtime)

    grad = sub.add_parser("gradcheck", help="gradient distance to the exact backend")
    grad.add_argument("--qubits", type=int, default=10)
    grad.add_argument("--depths", default="1,2,3")
    grad.add_argument("--chis", default="2,4,8,16")
    grad.add_argument("--points", type=int, default=50)
    grad.add_argument("--seed", type=int, default=0)
    grad.add_argument("--circuit", help="JSON circuit overriding the ansatz")
    grad.add_argument("--out", default="out")
    grad.set_defaults(func=cmd_gradcheck)

    gen = sub.add_parser("gen-graph", help="write a random benchmark graph")
    gen.add_argument("--nodes", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="target file (.json for JSON format)")
    gen.set_defaults(func=cmd_gen_graph)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
