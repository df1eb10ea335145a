"""Gate set, parameterized circuits, the hardware-efficient ansatz, and
SWAP routing onto ring adjacency.

Gate kinds: rx, ry, rz (one angle each, optionally bound to a parameter
slot), r (general single-qubit rotation, three fixed angles), h, z, cnot,
swap. For cnot the first site is the control and maps to the more
significant bit of the 4x4 matrix. Qubit indices are 0-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

SINGLE_SLOT_KINDS = frozenset({"rx", "ry", "rz"})
ANGLE_ARITY = {"rx": 1, "ry": 1, "rz": 1, "r": 3, "h": 0, "z": 0, "cnot": 0, "swap": 0}
SITE_ARITY = {"rx": 1, "ry": 1, "rz": 1, "r": 1, "h": 1, "z": 1, "cnot": 2, "swap": 2}

HALF_PI = math.pi / 2


class UnboundParameterError(ValueError):
    """A slotted gate was realized without a parameter vector."""


@dataclass(frozen=True)
class Gate:
    kind: str
    sites: tuple[int, ...]
    angles: tuple[float, ...] = ()
    slot: int | None = None


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    param_count: int


def _validate_gate(gate: Gate, num_qubits: int) -> None:
    if gate.kind not in SITE_ARITY:
        raise ValueError(f"unknown gate kind {gate.kind!r}")
    if len(gate.sites) != SITE_ARITY[gate.kind]:
        raise ValueError(f"{gate.kind} takes {SITE_ARITY[gate.kind]} site(s), got {gate.sites}")
    for s in gate.sites:
        if not 0 <= s < num_qubits:
            raise ValueError(f"site {s} out of range for {num_qubits} qubits")
    if len(set(gate.sites)) != len(gate.sites):
        raise ValueError(f"repeated site in {gate.kind} gate: {gate.sites}")
    if gate.slot is not None:
        if gate.kind not in SINGLE_SLOT_KINDS:
            raise ValueError(f"parameter slots are only valid on {sorted(SINGLE_SLOT_KINDS)}")
        if gate.angles:
            raise ValueError("a slotted gate cannot also carry fixed angles")
        if gate.slot < 0:
            raise ValueError(f"negative parameter slot {gate.slot}")
    elif len(gate.angles) != ANGLE_ARITY[gate.kind]:
        raise ValueError(
            f"{gate.kind} takes {ANGLE_ARITY[gate.kind]} angle(s), got {len(gate.angles)}"
        )


def make_circuit(num_qubits: int, gates: Sequence[Gate]) -> Circuit:
    """Validate gates and infer the parameter count; every slot in
    [0, param_count) must be referenced by at least one gate."""
    if num_qubits < 1:
        raise ValueError(f"circuit needs at least 1 qubit, got {num_qubits}")
    gates = tuple(gates)
    for g in gates:
        _validate_gate(g, num_qubits)
    slots = {g.slot for g in gates if g.slot is not None}
    param_count = max(slots) + 1 if slots else 0
    missing = set(range(param_count)) - slots
    if missing:
        raise ValueError(f"parameter slots never referenced: {sorted(missing)}")
    return Circuit(num_qubits, gates, param_count)


def _rotation(kind: str, theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    if kind == "rx":
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)
    if kind == "ry":
        return np.array([[c, -s], [s, c]], dtype=np.complex128)
    return np.array(
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]], dtype=np.complex128
    )


_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def gate_matrix(gate: Gate, params: Sequence[float] | None = None) -> np.ndarray:
    """Concrete 2x2 or 4x4 unitary for a gate, resolving its slot via params."""
    if gate.slot is not None:
        if params is None:
            raise UnboundParameterError(
                f"gate {gate.kind} on {gate.sites} is bound to slot {gate.slot}"
            )
        return _rotation(gate.kind, float(params[gate.slot]))
    if gate.kind in SINGLE_SLOT_KINDS:
        return _rotation(gate.kind, gate.angles[0])
    if gate.kind == "r":
        alpha, beta, gamma = gate.angles
        ca, sa = math.cos(alpha / 2), math.sin(alpha / 2)
        return np.array(
            [
                [ca, -np.exp(1j * gamma) * sa],
                [np.exp(1j * beta) * sa, np.exp(1j * (beta + gamma)) * ca],
            ],
            dtype=np.complex128,
        )
    if gate.kind == "h":
        return _H
    if gate.kind == "z":
        return _Z
    if gate.kind == "cnot":
        return _CNOT
    return _SWAP


def bound_gates(
    circuit: Circuit, params: Sequence[float] | None = None
) -> Iterator[tuple[tuple[int, ...], np.ndarray]]:
    """Yield (sites, matrix) in circuit order with all angles concretized."""
    if circuit.param_count and params is not None and len(params) != circuit.param_count:
        raise ValueError(
            f"circuit takes {circuit.param_count} parameters, got {len(params)}"
        )
    for gate in circuit.gates:
        yield gate.sites, gate_matrix(gate, params)


def build_ansatz(num_qubits: int, depth: int) -> Circuit:
    """Hardware-efficient ansatz: a parameterized Ry layer on every qubit,
    then `depth` blocks of [CNOT ring, Ry layer, CNOT ring, Ry layer].

    The CNOT ring is CNOT(k, k+1) for k = 0..N-2 followed by CNOT(N-1, 0),
    so every entangler is ring-adjacent by construction. For N = 2 the ring
    traversal is kept literally, giving CNOT(0, 1) then CNOT(1, 0).
    Parameter count is N * (2 * depth + 1).
    """
    if num_qubits < 2:
        raise ValueError(f"ansatz needs at least 2 qubits, got {num_qubits}")
    if depth < 1:
        raise ValueError(f"ansatz depth must be >= 1, got {depth}")
    gates: list[Gate] = []
    slot = 0

    def ry_layer() -> None:
        nonlocal slot
        for q in range(num_qubits):
            gates.append(Gate("ry", (q,), slot=slot))
            slot += 1

    def cnot_ring() -> None:
        for k in range(num_qubits - 1):
            gates.append(Gate("cnot", (k, k + 1)))
        gates.append(Gate("cnot", (num_qubits - 1, 0)))

    ry_layer()
    for _ in range(depth):
        cnot_ring()
        ry_layer()
        cnot_ring()
        ry_layer()
    return make_circuit(num_qubits, gates)


def shift_parameter(params: Sequence[float], slot: int, delta: float) -> np.ndarray:
    """Return a copy of the parameter vector with params[slot] += delta."""
    out = np.array(params, dtype=float)
    if not 0 <= slot < out.shape[0]:
        raise ValueError(f"slot {slot} out of range for {out.shape[0]} parameters")
    out[slot] += delta
    return out


def _ring_adjacent(a: int, b: int, n: int) -> bool:
    return b == (a + 1) % n or a == (b + 1) % n


def route_to_adjacent(circuit: Circuit) -> Circuit:
    """Rewrite two-qubit gates on distant pairs into SWAP-conjugated
    ring-adjacent ones; returns the input circuit unchanged if nothing
    needed routing.

    The first site of the gate walks the shorter ring arc toward the second
    (ties go to the increasing-index direction) and is swapped back
    afterwards, so the routed circuit is unitarily equivalent.
    """
    n = circuit.num_qubits
    out: list[Gate] = []
    changed = False
    for gate in circuit.gates:
        if len(gate.sites) != 2:
            out.append(gate)
            continue
        a, b = gate.sites
        if _ring_adjacent(a, b, n):
            out.append(gate)
            continue
        changed = True
        fwd = (b - a) % n
        back = (a - b) % n
        step = 1 if fwd <= back else -1
        hops = (fwd if step == 1 else back) - 1
        path = [(a + step * k) % n for k in range(hops + 1)]
        swaps = [Gate("swap", (path[k], path[k + 1])) for k in range(hops)]
        out.extend(swaps)
        out.append(Gate(gate.kind, (path[-1], b), gate.angles, gate.slot))
        out.extend(reversed(swaps))
    if not changed:
        return circuit
    return Circuit(n, tuple(out), circuit.param_count)


def circuit_to_json_dict(circuit: Circuit) -> dict:
    gates = []
    for g in circuit.gates:
        entry: dict = {"kind": g.kind, "sites": list(g.sites)}
        if g.slot is not None:
            entry["slot"] = g.slot
        if g.angles:
            entry["angles"] = list(g.angles)
        gates.append(entry)
    return {
        "num_qubits": circuit.num_qubits,
        "param_count": circuit.param_count,
        "gates": gates,
    }


def circuit_from_json_dict(doc: dict) -> Circuit:
    gates = [
        Gate(
            entry["kind"],
            tuple(entry["sites"]),
            tuple(entry.get("angles", ())),
            entry.get("slot"),
        )
        for entry in doc["gates"]
    ]
    circuit = make_circuit(int(doc["num_qubits"]), gates)
    declared = int(doc.get("param_count", circuit.param_count))
    if declared != circuit.param_count:
        raise ValueError(
            f"declared param_count {declared} != inferred {circuit.param_count}"
        )
    return circuit


def save_circuit(circuit: Circuit, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(circuit_to_json_dict(circuit), fh, indent=1)


def load_circuit(path: str) -> Circuit:
    with open(path, encoding="utf-8") as fh:
        return circuit_from_json_dict(json.load(fh))
