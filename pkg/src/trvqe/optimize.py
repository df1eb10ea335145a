"""Parameter-shift gradients over interchangeable energy backends, the
plain gradient-descent training loop, and the gradient-distance experiment.

Backends are deterministic evaluators (circuit, params, hamiltonian) -> real
energy, with a call counter so tests can audit the exact 2P evaluations per
gradient. The tensor-ring backend routes circuits onto ring adjacency
itself, so callers can hand it arbitrary two-qubit connectivity.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import tensor_ring as tr
from ._batch import ring_energies
from .circuits import Circuit, HALF_PI, bound_gates, build_ansatz, route_to_adjacent, shift_parameter
from .maxcut import (
    IsingHamiltonian,
    WeightedGraph,
    approximation_ratio,
    brute_force_extremes,
    hamiltonian_from_graph,
    pin_last_node,
)
from .statevector import expectation_exact, simulate_exact

BRUTE_FORCE_CAP = 24


class TrainingDivergedError(RuntimeError):
    """Energy or gradient went non-finite; carries the trace gathered so far."""

    def __init__(self, message: str, trace: "TrainTrace"):
        super().__init__(message)
        self.trace = trace


class TensorRingBackend:
    """Evaluates energies by contracting the circuit through a rank-chi ring."""

    def __init__(self, bond_dim: int):
        if bond_dim < 1:
            raise ValueError(f"bond dimension must be >= 1, got {bond_dim}")
        self.bond_dim = bond_dim
        self.eval_count = 0

    @property
    def name(self) -> str:
        return f"tensor-ring(chi={self.bond_dim})"

    def simulate(self, circuit: Circuit, params: Sequence[float] | None = None) -> tr.TensorRingState:
        routed = route_to_adjacent(circuit)
        state = tr.init_zero_state(circuit.num_qubits, self.bond_dim)
        for sites, matrix in bound_gates(routed, params):
            if len(sites) == 1:
                state = tr.apply_single_qubit(state, sites[0], matrix, check_unitary=False)
            else:
                state = tr.apply_two_qubit(state, sites[0], sites[1], matrix, check_unitary=False)
        return state

    def energy(
        self, circuit: Circuit, params: Sequence[float] | None, ham: IsingHamiltonian
    ) -> float:
        self.eval_count += 1
        return tr.expectation_hamiltonian(self.simulate(circuit, params), ham)

    def energies(
        self,
        circuit: Circuit,
        params_batch: Sequence[Sequence[float]],
        ham: IsingHamiltonian,
        max_workers: int = 1,
    ) -> np.ndarray:
        """Energy of every parameter row through the stacked pipeline; agrees
        with energy() row by row to roundoff and counts one evaluation each."""
        rows = np.asarray(params_batch, dtype=float)
        self.eval_count += rows.shape[0]
        return ring_energies(circuit, rows, ham, self.bond_dim, max_workers)


class ExactBackend:
    """Dense statevector evaluator; the reference the ring is compared to."""

    def __init__(self, max_qubits: int = 20):
        self.max_qubits = max_qubits
        self.eval_count = 0

    name = "exact"

    def energy(
        self, circuit: Circuit, params: Sequence[float] | None, ham: IsingHamiltonian
    ) -> float:
        self.eval_count += 1
        state = simulate_exact(circuit, params, max_qubits=self.max_qubits)
        return expectation_exact(state, ham)


def worker_count() -> int:
    """Parallelism cap for the shifted-circuit evaluations, from TRVQE_THREADS."""
    raw = os.environ.get("TRVQE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parameter_shift_gradient(
    backend,
    circuit: Circuit,
    params: Sequence[float],
    ham: IsingHamiltonian,
    max_workers: int | None = None,
) -> np.ndarray:
    """Gradient component i is half the energy difference at params[i] +- pi/2.

    Costs exactly 2P backend evaluations. Evaluations are independent and may
    run on a thread pool; results are assembled in slot order either way, so
    the output does not depend on the worker count.
    """
    params = np.asarray(params, dtype=float)
    p = circuit.param_count
    if params.shape[0] != p:
        raise ValueError(f"circuit takes {p} parameters, got {params.shape[0]}")
    workers = worker_count() if max_workers is None else max(1, max_workers)
    if p == 0:
        return np.zeros(0)

    if hasattr(backend, "energies"):
        rows = np.empty((2 * p, p))
        for slot in range(p):
            rows[2 * slot] = shift_parameter(params, slot, HALF_PI)
            rows[2 * slot + 1] = shift_parameter(params, slot, -HALF_PI)
        try:
            values = backend.energies(circuit, rows, ham, max_workers=workers)
            return 0.5 * (values[0::2] - values[1::2])
        except Exception:
            pass  # fall through to the per-slot path, which names the slot

    def component(slot: int) -> float:
        try:
            plus = backend.energy(circuit, shift_parameter(params, slot, HALF_PI), ham)
            minus = backend.energy(circuit, shift_parameter(params, slot, -HALF_PI), ham)
        except Exception as exc:
            raise RuntimeError(f"backend failed while shifting slot {slot}") from exc
        return 0.5 * (plus - minus)

    if workers == 1 or p <= 1:
        return np.array([component(i) for i in range(p)])
    with ThreadPoolExecutor(max_workers=min(workers, p)) as pool:
        return np.array(list(pool.map(component, range(p))))


@dataclass(frozen=True)
class OptimizerConfig:
    iterations: int = 100
    learning_rate: float = 0.05
    seed: int = 0
    init_strategy: str = "random"  # "random": uniform [0, 2pi); "zeros"
    bond_dim: int | None = 10
    depth: int = 1
    fix_node: bool = False

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ValueError(f"need at least 1 iteration, got {self.iterations}")
        if self.learning_rate < 0:
            raise ValueError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.init_strategy not in ("random", "zeros"):
            raise ValueError(f"unknown init strategy {self.init_strategy!r}")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    energy: float
    approx_ratio: float | None
    grad_norm: float
    ms: float


@dataclass
class TrainTrace:
    records: list[IterationRecord]
    final_params: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def best_ratio(self) -> float | None:
        ratios = [r.approx_ratio for r in self.records if r.approx_ratio is not None]
        return max(ratios) if ratios else None

    @property
    def best_energy(self) -> float:
        return min(r.energy for r in self.records)


def initial_parameters(param_count: int, seed: int, strategy: str = "random") -> np.ndarray:
    if strategy == "zeros":
        return np.zeros(param_count)
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * math.pi, param_count)


def run_vqe(
    backend,
    graph: WeightedGraph,
    config: OptimizerConfig,
    max_workers: int | None = None,
    progress: Callable[[IterationRecord], None] | None = None,
) -> TrainTrace:
    """Plain gradient descent on the ansatz angles.

    Each iteration logs the unshifted-circuit energy (one extra evaluation on
    top of the 2P gradient ones), the approximation ratio against brute-force
    extremes when the problem is small enough to enumerate, the gradient
    2-norm, and wall time. Identical seeds give identical traces apart from
    the timing column.
    """
    ham = hamiltonian_from_graph(graph)
    if config.fix_node:
        ham = pin_last_node(ham)
    circuit = build_ansatz(ham.num_qubits, config.depth)
    params = initial_parameters(circuit.param_count, config.seed, config.init_strategy)

    extremes = None
    if ham.num_qubits <= BRUTE_FORCE_CAP:
        extremes = brute_force_extremes(ham)

    records: list[IterationRecord] = []
    meta = {
        "backend": backend.name,
        "num_qubits": ham.num_qubits,
        "num_edges": len(graph.edges),
        "depth": config.depth,
        "iterations": config.iterations,
        "learning_rate": config.learning_rate,
        "seed": config.seed,
        "init_strategy": config.init_strategy,
        "fix_node": config.fix_node,
        "param_count": circuit.param_count,
    }
    if extremes is not None:
        meta["energy_max"], meta["energy_min"] = extremes[0], extremes[1]

    for t in range(1, config.iterations + 1):
        started = time.perf_counter()
        energy = backend.energy(circuit, params, ham)
        grad = parameter_shift_gradient(backend, circuit, params, ham, max_workers)
        elapsed_ms = (time.perf_counter() - started) * 1e3
        if not (math.isfinite(energy) and np.all(np.isfinite(grad))):
            partial = TrainTrace(records, params.copy(), meta)
            raise TrainingDivergedError(
                f"non-finite energy or gradient at iteration {t} "
                f"(energy={energy}, |grad| finite={np.all(np.isfinite(grad))})",
                partial,
            )
        ratio = None
        if extremes is not None:
            ratio = approximation_ratio(energy, extremes[0], extremes[1])
        record = IterationRecord(t, float(energy), ratio, float(np.linalg.norm(grad)), elapsed_ms)
        records.append(record)
        if progress is not None:
            progress(record)
        params = params - config.learning_rate * grad

    return TrainTrace(records, params, meta)


def sample_parameter_points(param_count: int, num_points: int, seed: int) -> np.ndarray:
    """Deterministic landscape sample: num_points vectors uniform in [0, 2pi)^P."""
    if num_points < 1:
        raise ValueError(f"need at least 1 sample point, got {num_points}")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * math.pi, (num_points, param_count))


def gradient_distance(
    backend_a,
    backend_b,
    circuit: Circuit,
    ham: IsingHamiltonian,
    num_points: int,
    seed: int,
    max_workers: int | None = None,
) -> tuple[float, np.ndarray]:
    """Mean l2 distance between the two backends' gradients over parameter
    points drawn uniformly from [0, 2pi)^P."""
    points = sample_parameter_points(circuit.param_count, num_points, seed)
    if backend_a is backend_b:
        return 0.0, np.zeros(num_points)
    per_point = np.empty(num_points)
    for k in range(num_points):
        ga = parameter_shift_gradient(backend_a, circuit, points[k], ham, max_workers)
        gb = parameter_shift_gradient(backend_b, circuit, points[k], ham, max_workers)
        per_point[k] = np.linalg.norm(ga - gb)
    return float(per_point.mean()), per_point


TRACE_COLUMNS = ("iter", "energy", "approx_ratio", "grad_norm", "ms")


def write_trace_csv(trace: TrainTrace, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for r in trace.records:
            ratio = "" if r.approx_ratio is None else repr(float(r.approx_ratio))
            writer.writerow(
                [r.iteration, repr(float(r.energy)), ratio,
                 repr(float(r.grad_norm)), repr(float(r.ms))]
            )


def load_trace_csv(path: str) -> list[IterationRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != TRACE_COLUMNS:
            raise ValueError(f"unexpected trace columns in {path}: {reader.fieldnames}")
        for row in reader:
            ratio = float(row["approx_ratio"]) if row["approx_ratio"] else None
            records.append(
                IterationRecord(
                    int(row["iter"]), float(row["energy"]), ratio,
                    float(row["grad_norm"]), float(row["ms"]),
                )
            )
    return records


def trace_to_json_dict(trace: TrainTrace) -> dict:
    return {
        "meta": trace.meta,
        "records": [
            {
                "iter": r.iteration,
                "energy": r.energy,
                "approx_ratio": r.approx_ratio,
                "grad_norm": r.grad_norm,
                "ms": r.ms,
            }
            for r in trace.records
        ],
        "final_params": trace.final_params.tolist(),
    }


def write_trace_json(trace: TrainTrace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace_to_json_dict(trace), fh, indent=1)


def load_trace_json(path: str) -> TrainTrace:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    records = [
        IterationRecord(
            int(r["iter"]), float(r["energy"]),
            None if r["approx_ratio"] is None else float(r["approx_ratio"]),
            float(r["grad_norm"]), float(r["ms"]),
        )
        for r in doc["records"]
    ]
    return TrainTrace(records, np.asarray(doc["final_params"], dtype=float), doc.get("meta", {}))
