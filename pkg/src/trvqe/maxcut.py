"""Max-Cut instances, their Ising observables, brute-force ground truth,
and the random benchmark-graph generator.

A cut assignment is a bit string over the nodes; bit value 0 puts a node in
the +1 partition. On disk, graphs use 1-based node indices (header line with
the node count, then one "i j w" line per edge); in memory everything is
0-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class WeightedGraph:
    num_nodes: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self) -> None:
        if self.num_nodes < 2:
            raise ValueError(f"graph needs at least 2 nodes, got {self.num_nodes}")
        seen = set()
        for i, j, _ in self.edges:
            if not 0 <= i < j < self.num_nodes:
                raise ValueError(f"bad edge ({i}, {j}) on {self.num_nodes} nodes")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))


@dataclass(frozen=True)
class IsingHamiltonian:
    """Diagonal observable: offset + sum of w * Z_i Z_j plus any w * Z_i."""

    num_qubits: int
    zz_terms: tuple[tuple[int, int, float], ...]
    z_terms: tuple[tuple[int, float], ...] = ()
    offset: float = 0.0

    def __post_init__(self) -> None:
        for i, j, _ in self.zz_terms:
            if i == j:
                raise ValueError(f"ZZ term with repeated index {i}")
            if not (0 <= i < self.num_qubits and 0 <= j < self.num_qubits):
                raise ValueError(f"ZZ term ({i}, {j}) out of range")
        for i, _ in self.z_terms:
            if not 0 <= i < self.num_qubits:
                raise ValueError(f"Z term on {i} out of range")


def hamiltonian_from_graph(graph: WeightedGraph) -> IsingHamiltonian:
    """One ZZ coupling per edge, one qubit per node."""
    return IsingHamiltonian(graph.num_nodes, tuple(graph.edges))


def pin_last_node(ham: IsingHamiltonian) -> IsingHamiltonian:
    """Fix the last qubit to the +1 partition (z = +1), dropping one qubit.

    ZZ couplings touching the pinned qubit become single-Z terms; existing
    Z terms on it fold into the constant offset. The energy extremes are
    unchanged because flipping every spin preserves all term values.
    """
    last = ham.num_qubits - 1
    if ham.num_qubits < 3:
        raise ValueError("pinning needs at least 3 qubits to leave a usable problem")
    zz: list[tuple[int, int, float]] = []
    kept_z: list[tuple[int, float]] = []
    offset = ham.offset
    for i, w in ham.z_terms:
        if i == last:
            offset += w
        else:
            kept_z.append((i, w))
    for i, j, w in ham.zz_terms:
        if j == last:
            kept_z.append((i, w))
        elif i == last:
            kept_z.append((j, w))
        else:
            zz.append((i, j, w))
    return IsingHamiltonian(last, tuple(zz), tuple(kept_z), offset)


def cut_value(graph: WeightedGraph, bits: str) -> float:
    """Total weight of edges whose endpoints land in different partitions."""
    if len(bits) != graph.num_nodes:
        raise ValueError(f"assignment has {len(bits)} bits for {graph.num_nodes} nodes")
    return sum(w for i, j, w in graph.edges if bits[i] != bits[j])


def ising_energy(ham: IsingHamiltonian, bits: str) -> float:
    """Energy of a basis assignment; bit 0 means spin z = +1."""
    if len(bits) != ham.num_qubits:
        raise ValueError(f"assignment has {len(bits)} bits for {ham.num_qubits} qubits")
    z = [1 - 2 * int(b) for b in bits]
    total = ham.offset
    total += sum(w * z[i] * z[j] for i, j, w in ham.zz_terms)
    total += sum(w * z[i] for i, w in ham.z_terms)
    return total


def brute_force_extremes(
    ham: IsingHamiltonian, max_qubits: int = 24
) -> tuple[float, float, str]:
    """Exact (max, min, one minimizing assignment) over all 2^N spins."""
    n = ham.num_qubits
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the enumeration cap of {max_qubits}")
    if not ham.zz_terms and not ham.z_terms:
        return ham.offset, ham.offset, "0" * n

    best_max = -np.inf
    best_min = np.inf
    argmin = 0
    chunk = 1 << min(n, 20)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        # qubit 0 is the most significant bit
        z = 1.0 - 2.0 * ((idx[:, None] >> (n - 1 - np.arange(n))) & 1)
        energy = np.full(idx.shape, ham.offset)
        for i, j, w in ham.zz_terms:
            energy += w * z[:, i] * z[:, j]
        for i, w in ham.z_terms:
            energy += w * z[:, i]
        lo = int(np.argmin(energy))
        if energy[lo] < best_min:
            best_min = float(energy[lo])
            argmin = start + lo
        best_max = max(best_max, float(np.max(energy)))
    return best_max, best_min, format(argmin, f"0{n}b")


def approximation_ratio(energy: float, maximum: float, minimum: float) -> float:
    """(max - energy) / (max - min); 1 at the ground state, 0 at the ceiling."""
    if maximum <= minimum:
        raise ValueError(f"degenerate spectrum: max {maximum} <= min {minimum}")
    return float((maximum - energy) / (maximum - minimum))


def random_graph(num_nodes: int, seed: int) -> WeightedGraph:
    """Connected benchmark instance with every node degree 2 or 3 and integer
    weights drawn uniformly from 1..10.

    Built as a random Hamiltonian cycle (degree-2 backbone, guarantees
    connectivity) plus (K + 2) // 4 chords between degree-2 nodes, which
    targets a mean degree near 2.5. Deterministic for a given seed.
    """
    if num_nodes < 4:
        raise ValueError(
            f"need at least 4 nodes to satisfy the degree-2..3 protocol, got {num_nodes}"
        )
    rng = np.random.default_rng(seed)
    order = rng.permutation(num_nodes)
    edges = set()
    for k in range(num_nodes):
        a, b = int(order[k]), int(order[(k + 1) % num_nodes])
        edges.add((min(a, b), max(a, b)))

    degree = {v: 2 for v in range(num_nodes)}
    for _ in range((num_nodes + 2) // 4):
        candidates = [
            (i, j)
            for i, j in itertools.combinations(range(num_nodes), 2)
            if degree[i] < 3 and degree[j] < 3 and (i, j) not in edges
        ]
        if not candidates:
            break
        i, j = candidates[int(rng.integers(len(candidates)))]
        edges.add((i, j))
        degree[i] += 1
        degree[j] += 1

    weighted = tuple(
        (i, j, float(rng.integers(1, 11))) for i, j in sorted(edges)
    )
    return WeightedGraph(num_nodes, weighted)


def _format_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(w)


def save_graph(graph: WeightedGraph, path: str) -> None:
    """Text format: first line the node count, then "i j w" per edge, 1-based.
    A .json path gets the JSON equivalent instead."""
    if str(path).endswith(".json"):
        doc = {
            "num_nodes": graph.num_nodes,
            "edges": [[i + 1, j + 1, w] for i, j, w in graph.edges],
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=1)
        return
    lines = [str(graph.num_nodes)]
    lines += [f"{i + 1} {j + 1} {_format_weight(w)}" for i, j, w in graph.edges]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_graph(path: str) -> WeightedGraph:
    if str(path).endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        edges = tuple(
            (min(i, j) - 1, max(i, j) - 1, float(w)) for i, j, w in doc["edges"]
        )
        return WeightedGraph(int(doc["num_nodes"]), edges)
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"empty graph file {path}")
    num_nodes = int(lines[0])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise ValueError(f"bad edge line {ln!r} in {path}")
        i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
        edges.append((min(i, j) - 1, max(i, j) - 1, w))
    return WeightedGraph(num_nodes, tuple(edges))
