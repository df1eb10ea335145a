"""Dense simulator: gate application, diagonal expectations, norm preservation."""

import math

import numpy as np
import pytest

from trvqe import (
    Gate,
    IsingHamiltonian,
    build_ansatz,
    expectation_exact,
    make_circuit,
    simulate_exact,
)

ZZ = IsingHamiltonian(2, ((0, 1, 1.0),))


def test_empty_circuit_is_the_zero_basis_state():
    state = simulate_exact(make_circuit(3, []))
    expected = np.zeros(8)
    expected[0] = 1.0
    np.testing.assert_array_equal(state.amplitudes, expected)


def test_bell_circuit_matches_hand_matrix_product():
    circuit = make_circuit(2, [Gate("h", (0,)), Gate("cnot", (0, 1))])
    state = simulate_exact(circuit)
    # oracle: explicit 4x4 product applied to e0
    h_full = np.kron(np.array([[1, 1], [1, -1]]) / math.sqrt(2), np.eye(2))
    cnot = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
    expected = cnot @ h_full @ np.array([1, 0, 0, 0])
    np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)


def test_qubit_zero_is_most_significant_bit():
    circuit = make_circuit(3, [Gate("ry", (0,), (math.pi,))])
    amps = simulate_exact(circuit).amplitudes
    assert amps[0b100] == pytest.approx(1.0)


@pytest.mark.parametrize("seed", range(4))
def test_random_ansatz_keeps_unit_norm(seed):
    rng = np.random.default_rng(seed)
    circuit = build_ansatz(5, 2)
    params = rng.uniform(0, 2 * math.pi, circuit.param_count)
    amps = simulate_exact(circuit, params).amplitudes
    assert np.sum(np.abs(amps) ** 2) == pytest.approx(1.0, abs=1e-10)


def test_qubit_cap():
    with pytest.raises(ValueError):
        simulate_exact(make_circuit(6, []), max_qubits=5)


def test_zz_expectations_on_simple_states():
    zero = simulate_exact(make_circuit(2, []))
    assert expectation_exact(zero, ZZ) == pytest.approx(1.0)

    # uniform superposition averages (+1, -1, -1, +1) to zero
    uniform = simulate_exact(make_circuit(2, [Gate("h", (0,)), Gate("h", (1,))]))
    hand_average = np.mean([+1, -1, -1, +1])
    assert expectation_exact(uniform, ZZ) == pytest.approx(hand_average, abs=1e-12)

    bell = simulate_exact(make_circuit(2, [Gate("h", (0,)), Gate("cnot", (0, 1))]))
    assert expectation_exact(bell, ZZ) == pytest.approx(1.0, abs=1e-12)


def test_expectation_with_z_terms_and_offset():
    circuit = make_circuit(2, [Gate("ry", (0,), (math.pi,))])  # |10>
    state = simulate_exact(circuit)
    ham = IsingHamiltonian(2, ((0, 1, 2.0),), ((0, 3.0), (1, -1.0)), offset=0.5)
    # spins (z0, z1) = (-1, +1): 2*(-1) + 3*(-1) + (-1)*(+1) + 0.5
    assert expectation_exact(state, ham) == pytest.approx(-5.5, abs=1e-12)


def test_expectation_accepts_raw_amplitudes():
    amps = np.zeros(4, dtype=complex)
    amps[0b11] = 1.0
    assert expectation_exact(amps, ZZ) == pytest.approx(1.0)


def test_expectation_qubit_mismatch():
    state = simulate_exact(make_circuit(3, []))
    with pytest.raises(ValueError):
        expectation_exact(state, ZZ)
