"""Tensor-ring quantum state: gate application and expectation contractions.

A state over N qubits is held as N order-3 tensors of shape (chi, chi, 2),
indexed (left bond, right bond, physical), with the bonds closed circularly:
tensor N-1's right bond is tensor 0's left bond. Qubit 0 is the most
significant bit of the statevector index.

Single-qubit gates contract against the physical leg and leave the structure
untouched. Two-qubit gates on ring-adjacent sites merge the pair, apply the
gate, and split back via an SVD that keeps only the chi largest singular
values; the discarded weight is the representation's truncation noise.
Expectations of diagonal Z/ZZ observables are evaluated by multiplying
per-site transfer matrices (chi^2 x chi^2) around the ring and are always
normalized by <psi|psi>, since truncation moves the norm off 1. Note that
on a closed ring the truncation is optimal only in the blob's own Frobenius
metric, not in the state metric induced by the (non-isometric) environment,
so the norm usually shrinks but can also grow; normalized expectations stay
inside the observable's spectrum regardless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

import numpy as np

if TYPE_CHECKING:
    from .maxcut import IsingHamiltonian

UNITARY_ATOL = 1e-12


class RoutingRequiredError(ValueError):
    """Two-qubit gate requested on a non-adjacent pair; route with SWAPs first."""


@dataclass(frozen=True)
class TensorRingState:
    """Immutable ring of order-3 tensors approximating an N-qubit state."""

    num_qubits: int
    bond_dim: int
    tensors: tuple[np.ndarray, ...]


def init_zero_state(num_qubits: int, bond_dim: int) -> TensorRingState:
    """All-zeros basis state: every tensor is 1 at index (0, 0, 0), else 0."""
    if num_qubits < 2:
        raise ValueError(f"need at least 2 qubits, got {num_qubits}")
    if bond_dim < 1:
        raise ValueError(f"bond dimension must be >= 1, got {bond_dim}")
    tensors = []
    for _ in range(num_qubits):
        t = np.zeros((bond_dim, bond_dim, 2), dtype=np.complex128)
        t[0, 0, 0] = 1.0
        tensors.append(t)
    return TensorRingState(num_qubits, bond_dim, tuple(tensors))


def _check_site(state: TensorRingState, site: int) -> None:
    if not 0 <= site < state.num_qubits:
        raise ValueError(f"site {site} out of range for {state.num_qubits} qubits")


def _check_unitary(mat: np.ndarray, atol: float = UNITARY_ATOL) -> None:
    eye = np.eye(mat.shape[0])
    if np.max(np.abs(mat @ mat.conj().T - eye)) > atol:
        raise ValueError("gate matrix is not unitary")


def apply_single_qubit(
    state: TensorRingState,
    site: int,
    gate: np.ndarray,
    check_unitary: bool = True,
) -> TensorRingState:
    """Contract a 2x2 gate against the physical leg of one tensor."""
    _check_site(state, site)
    gate = np.asarray(gate, dtype=np.complex128)
    if gate.shape != (2, 2):
        raise ValueError(f"single-qubit gate must be 2x2, got {gate.shape}")
    if check_unitary:
        _check_unitary(gate)
    tensors = list(state.tensors)
    tensors[site] = np.einsum("pi,lri->lrp", gate, tensors[site])
    return TensorRingState(state.num_qubits, state.bond_dim, tuple(tensors))


def two_qubit_gate_tensor(matrix: np.ndarray, check_unitary: bool = True) -> np.ndarray:
    """Reshape a 4x4 unitary into the order-4 tensor U[i'_a, i'_b, i_a, i_b].

    Row index of the matrix is i'_a * 2 + i'_b (first qubit of the pair is
    the more significant bit), column index likewise.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    if matrix.shape != (4, 4):
        raise ValueError(f"two-qubit gate must be 4x4, got {matrix.shape}")
    if check_unitary:
        _check_unitary(matrix)
    return matrix.reshape(2, 2, 2, 2)


def _svd(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # gesdd very rarely fails to converge; fall back to the slower gesvd
    try:
        return np.linalg.svd(mat, full_matrices=False)
    except np.linalg.LinAlgError:
        from scipy.linalg import svd as scipy_svd

        return scipy_svd(mat, full_matrices=False, lapack_driver="gesvd")


def apply_two_qubit_adjacent(
    state: TensorRingState, site: int, gate_tensor: np.ndarray
) -> TensorRingState:
    """Apply a two-qubit gate to the ring-adjacent pair (site, site+1 mod N).

    The pair is merged over its shared bond, the gate tensor is contracted
    in, the result is reshaped to (2 chi) x (2 chi) grouping (i'_a, left bond)
    against (i'_b, right bond), and a truncated SVD keeps the chi largest
    singular values. The singular values are absorbed into the left tensor.
    Output tensor shapes equal input shapes. The discarded weight perturbs
    the state; because the rest of the ring closes around the pair with a
    non-isometric environment, the norm usually drops but is not guaranteed
    monotone (at bond 1 it is, since the environment factorizes into
    nonnegative scalars).
    """
    _check_site(state, site)
    gate_tensor = np.asarray(gate_tensor, dtype=np.complex128)
    if gate_tensor.shape != (2, 2, 2, 2):
        raise ValueError(f"gate tensor must have shape (2,2,2,2), got {gate_tensor.shape}")
    n = state.num_qubits
    chi = state.bond_dim
    a, b = site, (site + 1) % n

    merged = np.einsum("lsa,srb->labr", state.tensors[a], state.tensors[b])
    blob = np.einsum("pqab,labr->plqr", gate_tensor, merged)
    x, s, yh = _svd(blob.reshape(2 * chi, 2 * chi))
    # descending order from LAPACK; ties resolved by keeping the first chi
    left = np.ascontiguousarray((x[:, :chi] * s[:chi]).reshape(2, chi, chi).transpose(1, 2, 0))
    right = np.ascontiguousarray(yh[:chi, :].reshape(chi, 2, chi).transpose(0, 2, 1))

    tensors = list(state.tensors)
    tensors[a] = left
    tensors[b] = right
    return TensorRingState(n, chi, tuple(tensors))


def apply_two_qubit(
    state: TensorRingState,
    site_a: int,
    site_b: int,
    matrix: np.ndarray,
    check_unitary: bool = True,
) -> TensorRingState:
    """Apply a 4x4 gate to qubits (site_a, site_b); site_a is the control-side
    (more significant) index of the matrix.

    The pair must be ring-adjacent in either direction; otherwise a
    RoutingRequiredError is raised and the caller must insert SWAPs.
    """
    _check_site(state, site_a)
    _check_site(state, site_b)
    if site_a == site_b:
        raise ValueError("two-qubit gate needs two distinct sites")
    n = state.num_qubits
    tensor = two_qubit_gate_tensor(matrix, check_unitary=check_unitary)
    if site_b == (site_a + 1) % n:
        return apply_two_qubit_adjacent(state, site_a, tensor)
    if site_a == (site_b + 1) % n:
        # pair runs (site_b, site_a) along the ring: swap the qubit roles
        return apply_two_qubit_adjacent(state, site_b, tensor.transpose(1, 0, 3, 2))
    raise RoutingRequiredError(
        f"qubits {site_a} and {site_b} are not ring-adjacent on {n} qubits"
    )


def _kron_pair(a: np.ndarray) -> np.ndarray:
    # kron(a, conj(a)); np.kron's axis plumbing is too slow for the hot path
    left, right = a.shape
    out = np.einsum("lr,ms->lmrs", a, a.conj())
    return out.reshape(left * left, right * right)


def _site_transfer_parts(tensor: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Physical-index slices of one site's transfer matrix: their sum is the
    plain transfer matrix, their difference the Z-dressed one."""
    a0 = np.ascontiguousarray(tensor[:, :, 0])
    a1 = np.ascontiguousarray(tensor[:, :, 1])
    return _kron_pair(a0), _kron_pair(a1)


def _site_transfer(tensor: np.ndarray, z: bool = False) -> np.ndarray:
    """Transfer matrix of one site (row: doubled left bond, column: doubled
    right bond), optionally Z-dressed."""
    p0, p1 = _site_transfer_parts(tensor)
    return p0 - p1 if z else p0 + p1


def norm_squared(state: TensorRingState) -> float:
    """<psi|psi> via the ring trace of per-site transfer matrices."""
    acc = _site_transfer(state.tensors[0])
    for t in state.tensors[1:]:
        acc = acc @ _site_transfer(t)
    return max(float(np.trace(acc).real), 0.0)


def _ring_trace_with_z(state: TensorRingState, z_sites: Iterable[int]) -> complex:
    z_set = set(z_sites)
    acc = _site_transfer(state.tensors[0], z=0 in z_set)
    for k in range(1, state.num_qubits):
        acc = acc @ _site_transfer(state.tensors[k], z=k in z_set)
    return complex(np.trace(acc))


def expectation_z(state: TensorRingState, site: int) -> float:
    """Normalized single-site <Z_site>."""
    _check_site(state, site)
    nrm = norm_squared(state)
    if nrm <= 0.0:
        raise ValueError("state has zero norm")
    return _ring_trace_with_z(state, [site]).real / nrm


def expectation_zz(state: TensorRingState, p: int, q: int) -> float:
    """Normalized two-site <Z_p Z_q>."""
    _check_site(state, p)
    _check_site(state, q)
    if p == q:
        raise ValueError("ZZ expectation needs two distinct sites")
    nrm = norm_squared(state)
    if nrm <= 0.0:
        raise ValueError("state has zero norm")
    return _ring_trace_with_z(state, [p, q]).real / nrm


def expectation_hamiltonian(state: TensorRingState, ham: "IsingHamiltonian") -> float:
    """Weighted sum of ZZ (and any single-Z) expectations of an Ising observable.

    Shares the ring contraction across terms: plain transfer matrices are
    swept into prefix and suffix products once, then each term costs a short
    sweep between its two sites plus one chi^4 trace, rather than a full
    ring trace per term.
    """
    if ham.num_qubits != state.num_qubits:
        raise ValueError(
            f"hamiltonian is on {ham.num_qubits} qubits, state on {state.num_qubits}"
        )
    n = state.num_qubits
    if not ham.zz_terms and not ham.z_terms:
        return float(ham.offset)

    z_needed = {i for i, _ in ham.z_terms}
    z_needed.update(i for i, _, _ in ham.zz_terms)
    z_needed.update(j for _, j, _ in ham.zz_terms)

    plain: list[np.ndarray] = []
    dressed: dict[int, np.ndarray] = {}
    for k, t in enumerate(state.tensors):
        p0, p1 = _site_transfer_parts(t)
        plain.append(p0 + p1)
        if k in z_needed:
            dressed[k] = p0 - p1

    eye = np.eye(state.bond_dim ** 2, dtype=np.complex128)
    prefix = [eye]
    for k in range(n):
        prefix.append(prefix[k] @ plain[k])
    nrm = float(np.trace(prefix[n]).real)
    if nrm <= 0.0:
        raise ValueError("state has zero norm")
    suffix = [eye] * (n + 1)
    for k in range(n - 1, -1, -1):
        suffix[k] = plain[k] @ suffix[k + 1]

    # tail[q] = (Z-dressed transfer at q) @ suffix: one chi^4 trace per term
    second_sites = {max(i, j) for i, j, _ in ham.zz_terms} | {i for i, _ in ham.z_terms}
    tail = {q: dressed[q] @ suffix[q + 1] for q in second_sites}

    total = 0.0
    for i, w in ham.z_terms:
        total += w * np.einsum("ij,ji->", prefix[i], tail[i]).real

    by_first: dict[int, list[tuple[int, float]]] = {}
    for i, j, w in ham.zz_terms:
        p, q = (i, j) if i < j else (j, i)
        by_first.setdefault(p, []).append((q, w))
    for p, group in by_first.items():
        acc = prefix[p] @ dressed[p]
        cursor = p + 1
        for q, w in sorted(group):
            while cursor < q:
                acc = acc @ plain[cursor]
                cursor += 1
            total += w * np.einsum("ij,ji->", acc, tail[q]).real

    return float(total / nrm) + float(ham.offset)


def to_statevector(state: TensorRingState, max_qubits: int = 20) -> np.ndarray:
    """Dense 2^N amplitude vector; each amplitude is the circular trace of the
    per-site bond matrices selected by the physical indices."""
    n = state.num_qubits
    if n > max_qubits:
        raise ValueError(f"{n} qubits exceeds the dense cap of {max_qubits}")
    acc = state.tensors[0].transpose(0, 2, 1)  # [l0, i0, r]
    for k in range(1, n):
        acc = np.tensordot(acc, state.tensors[k], axes=([-1], [0]))
        acc = np.moveaxis(acc, -1, -2)  # bond index back to the tail
    amps = np.trace(acc, axis1=0, axis2=-1)
    return amps.reshape(-1)


def dump_state_json(state: TensorRingState, path: str) -> None:
    """Debug dump. Per tensor: shape, then real and imaginary parts of the
    row-major (C-order) flattened entries, as two parallel lists."""
    doc = {
        "num_qubits": state.num_qubits,
        "bond_dim": state.bond_dim,
        "tensors": [
            {
                "shape": list(t.shape),
                "real": t.real.reshape(-1).tolist(),
                "imag": t.imag.reshape(-1).tolist(),
            }
            for t in state.tensors
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_state_json(path: str) -> TensorRingState:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    tensors = []
    for entry in doc["tensors"]:
        flat = np.asarray(entry["real"]) + 1j * np.asarray(entry["imag"])
        tensors.append(flat.reshape(entry["shape"]).astype(np.complex128))
    return TensorRingState(doc["num_qubits"], doc["bond_dim"], tuple(tensors))
