"""Exact dense statevector simulator, the ground truth the ring is checked
against. Qubit 0 is the most significant bit, matching the ring convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuits import Circuit, bound_gates
from .maxcut import IsingHamiltonian


@dataclass(frozen=True)
class DenseState:
    amplitudes: np.ndarray
    num_qubits: int


def apply_gate_dense(
    amps: np.ndarray, num_qubits: int, sites: tuple[int, ...], matrix: np.ndarray
) -> np.ndarray:
    """Apply a 2x2 or 4x4 matrix to a dense amplitude vector. Two-qubit gates
    may act on any pair, adjacent or not."""
    grid = amps.reshape([2] * num_qubits)
    if len(sites) == 1:
        grid = np.tensordot(matrix, grid, axes=([1], [sites[0]]))
        grid = np.moveaxis(grid, 0, sites[0])
    else:
        a, b = sites
        tensor = matrix.reshape(2, 2, 2, 2)
        grid = np.tensordot(tensor, grid, axes=([2, 3], [a, b]))
        grid = np.moveaxis(grid, [0, 1], [a, b])
    return grid.reshape(-1)


def simulate_exact(
    circuit: Circuit, params: Sequence[float] | None = None, max_qubits: int = 20
) -> DenseState:
    """Run a circuit on |0...0> by full matrix application in gate order."""
    n = circuit.num_qubits
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the dense cap of {max_qubits}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    for sites, matrix in bound_gates(circuit, params):
        amps = apply_gate_dense(amps, n, sites, matrix)
    return DenseState(amps, n)


def expectation_exact(state: DenseState | np.ndarray, ham: IsingHamiltonian) -> float:
    """<H> by diagonal evaluation: ZZ terms never materialize a 2^N matrix."""
    if isinstance(state, DenseState):
        amps = state.amplitudes
        n = state.num_qubits
    else:
        amps = np.asarray(state)
        n = int(round(np.log2(amps.shape[0])))
    if n != ham.num_qubits:
        raise ValueError(f"state on {n} qubits, hamiltonian on {ham.num_qubits}")
    probs = np.abs(amps) ** 2
    idx = np.arange(probs.shape[0], dtype=np.int64)
    z_cache: dict[int, np.ndarray] = {}

    def z(i: int) -> np.ndarray:
        if i not in z_cache:
            z_cache[i] = 1.0 - 2.0 * ((idx >> (n - 1 - i)) & 1)
        return z_cache[i]

    total = float(ham.offset)
    for i, j, w in ham.zz_terms:
        total += w * float(np.dot(probs, z(i) * z(j)))
    for i, w in ham.z_terms:
        total += w * float(np.dot(probs, z(i)))
    return float(total)
