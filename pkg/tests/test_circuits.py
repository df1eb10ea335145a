"""Gate matrices, ansatz construction, parameter shifting, routing, JSON."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trvqe import (
    Gate,
    build_ansatz,
    circuit_from_json_dict,
    circuit_to_json_dict,
    gate_matrix,
    load_circuit,
    make_circuit,
    route_to_adjacent,
    save_circuit,
    shift_parameter,
    simulate_exact,
)
from trvqe.circuits import UnboundParameterError

DATA = Path(__file__).parent / "data"

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


def test_hadamard_matrix():
    h = gate_matrix(Gate("h", (0,)))
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    np.testing.assert_allclose(h, expected, atol=1e-15)


def test_zero_rotations_are_identity():
    assert np.allclose(gate_matrix(Gate("rz", (0,), (0.0,))), np.eye(2))
    assert np.allclose(gate_matrix(Gate("r", (0,), (0.0, 0.0, 0.0))), np.eye(2))


def test_cnot_control_is_most_significant_bit():
    cnot = gate_matrix(Gate("cnot", (0, 1)))
    ket10 = np.array([0, 0, 1, 0], dtype=complex)
    np.testing.assert_array_equal(cnot @ ket10, [0, 0, 0, 1])
    # control clear: target untouched
    ket01 = np.array([0, 1, 0, 0], dtype=complex)
    np.testing.assert_array_equal(cnot @ ket01, ket01)


@settings(max_examples=100, deadline=None)
@given(theta=angles)
def test_rotation_matrices_match_their_closed_forms(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    np.testing.assert_allclose(
        gate_matrix(Gate("rx", (0,), (theta,))),
        [[c, -1j * s], [-1j * s, c]],
        atol=1e-15,
    )
    np.testing.assert_allclose(
        gate_matrix(Gate("ry", (0,), (theta,))), [[c, -s], [s, c]], atol=1e-15
    )
    np.testing.assert_allclose(
        gate_matrix(Gate("rz", (0,), (theta,))),
        [[np.exp(-1j * theta / 2), 0], [0, np.exp(1j * theta / 2)]],
        atol=1e-15,
    )


@settings(max_examples=100, deadline=None)
@given(alpha=angles, beta=angles, gamma=angles)
def test_general_rotation_entries_and_unitarity(alpha, beta, gamma):
    mat = gate_matrix(Gate("r", (0,), (alpha, beta, gamma)))
    ca, sa = math.cos(alpha / 2), math.sin(alpha / 2)
    np.testing.assert_allclose(mat[0, 0], ca, atol=1e-15)
    np.testing.assert_allclose(mat[0, 1], -np.exp(1j * gamma) * sa, atol=1e-15)
    np.testing.assert_allclose(mat[1, 0], np.exp(1j * beta) * sa, atol=1e-15)
    np.testing.assert_allclose(mat[1, 1], np.exp(1j * (beta + gamma)) * ca, atol=1e-15)
    np.testing.assert_allclose(mat @ mat.conj().T, np.eye(2), atol=1e-12)


def test_unbound_slot_rejected():
    gate = Gate("ry", (0,), slot=0)
    with pytest.raises(UnboundParameterError):
        gate_matrix(gate)
    assert gate_matrix(gate, [0.5])[0, 0] == pytest.approx(math.cos(0.25))


@pytest.mark.parametrize(
    "num_qubits,depth,expected_params,expected_cnots",
    [(4, 1, 12, 8), (10, 1, 30, 20), (4, 3, 28, 24), (10, 3, 70, 60)],
)
def test_ansatz_parameter_and_entangler_counts(num_qubits, depth, expected_params, expected_cnots):
    circuit = build_ansatz(num_qubits, depth)
    assert circuit.param_count == expected_params == num_qubits * (2 * depth + 1)
    assert sum(1 for g in circuit.gates if g.kind == "cnot") == expected_cnots


def test_ansatz_two_qubit_ring_keeps_both_directions():
    circuit = build_ansatz(2, 1)
    cnots = [g.sites for g in circuit.gates if g.kind == "cnot"]
    assert cnots == [(0, 1), (1, 0), (0, 1), (1, 0)]
    assert circuit.param_count == 6


def test_ansatz_is_deterministic():
    assert build_ansatz(6, 2) == build_ansatz(6, 2)


def test_ansatz_slots_cover_range_in_order():
    circuit = build_ansatz(5, 2)
    slots = [g.slot for g in circuit.gates if g.slot is not None]
    assert slots == list(range(circuit.param_count))


def test_ansatz_entanglers_are_ring_adjacent():
    circuit = build_ansatz(7, 2)
    assert route_to_adjacent(circuit) is circuit


def test_shift_parameter_examples():
    np.testing.assert_array_equal(
        shift_parameter([0.0, 0.0], 0, math.pi / 2), [math.pi / 2, 0.0]
    )
    np.testing.assert_array_equal(
        shift_parameter([1.0], 0, -math.pi / 2), [1.0 - math.pi / 2]
    )


def test_shift_parameter_unshift_restores_exactly():
    theta = np.array([0.0, 1.0, 0.25])
    forward = shift_parameter(theta, 1, math.pi / 2)
    back = shift_parameter(forward, 1, -math.pi / 2)
    np.testing.assert_array_equal(back, theta)


def test_shift_parameter_leaves_input_unmodified():
    theta = np.zeros(3)
    shift_parameter(theta, 2, math.pi / 2)
    np.testing.assert_array_equal(theta, np.zeros(3))


def test_shift_parameter_slot_range():
    with pytest.raises(ValueError):
        shift_parameter([0.0], 1, math.pi / 2)


def test_route_distance_one_arc():
    circuit = make_circuit(4, [Gate("cnot", (0, 2))])
    routed = route_to_adjacent(circuit)
    kinds = [(g.kind, g.sites) for g in routed.gates]
    assert kinds == [("swap", (0, 1)), ("cnot", (1, 2)), ("swap", (0, 1))]


def test_route_circular_pair_untouched():
    circuit = make_circuit(4, [Gate("cnot", (0, 3))])
    assert route_to_adjacent(circuit) is circuit


def _random_circuit(rng, num_qubits, num_gates):
    gates = []
    for _ in range(num_gates):
        if rng.random() < 0.5:
            q = int(rng.integers(num_qubits))
            gates.append(Gate("ry", (q,), (float(rng.uniform(0, 2 * math.pi)),)))
        else:
            a, b = rng.choice(num_qubits, size=2, replace=False)
            gates.append(Gate("cnot", (int(a), int(b))))
    return make_circuit(num_qubits, gates)


@pytest.mark.parametrize("num_qubits", [4, 5, 8])
def test_routing_preserves_the_statevector(num_qubits):
    rng = np.random.default_rng(num_qubits)
    for _ in range(5):
        circuit = _random_circuit(rng, num_qubits, 12)
        routed = route_to_adjacent(circuit)
        before = simulate_exact(circuit).amplitudes
        after = simulate_exact(routed).amplitudes
        np.testing.assert_allclose(after, before, atol=1e-10)


def test_routing_keeps_parameter_slots():
    gates = [Gate("ry", (0,), slot=0), Gate("cnot", (0, 2)), Gate("ry", (2,), slot=1)]
    routed = route_to_adjacent(make_circuit(5, gates))
    assert routed.param_count == 2
    assert [g.slot for g in routed.gates if g.slot is not None] == [0, 1]


def test_circuit_json_round_trip():
    circuit = build_ansatz(5, 2)
    doc = circuit_to_json_dict(circuit)
    assert circuit_from_json_dict(json.loads(json.dumps(doc))) == circuit


def test_circuit_file_round_trip(tmp_path):
    circuit = make_circuit(
        3,
        [
            Gate("h", (0,)),
            Gate("r", (1,), (0.1, 0.2, 0.3)),
            Gate("ry", (2,), slot=0),
            Gate("cnot", (0, 1)),
        ],
    )
    path = tmp_path / "circuit.json"
    save_circuit(circuit, str(path))
    assert load_circuit(str(path)) == circuit


def test_golden_circuit_file_still_loads():
    circuit = load_circuit(str(DATA / "golden_circuit.json"))
    assert circuit.num_qubits == 4
    assert circuit.param_count == 12
    assert circuit == build_ansatz(4, 1)


def test_binding_rejects_wrong_length_vectors():
    from trvqe.circuits import bound_gates

    circuit = build_ansatz(3, 1)
    with pytest.raises(ValueError):
        list(bound_gates(circuit, [0.0] * (circuit.param_count - 1)))
    lowered = list(bound_gates(circuit, [0.0] * circuit.param_count))
    assert len(lowered) == len(circuit.gates)


def test_validation_rejects_bad_gates():
    with pytest.raises(ValueError):
        make_circuit(2, [Gate("cnot", (0, 2))])
    with pytest.raises(ValueError):
        make_circuit(2, [Gate("cnot", (1, 1))])
    with pytest.raises(ValueError):
        make_circuit(2, [Gate("ry", (0,), slot=1)])  # slot 0 never referenced
    with pytest.raises(ValueError):
        make_circuit(2, [Gate("h", (0,), (1.0,))])
    with pytest.raises(ValueError):
        make_circuit(2, [Gate("r", (0,), (0.1, 0.2, 0.3), slot=0)])
