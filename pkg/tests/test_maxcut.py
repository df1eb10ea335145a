"""Max-Cut instances, Ising mapping, brute force, graph generator, file IO."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trvqe import (
    IsingHamiltonian,
    WeightedGraph,
    approximation_ratio,
    brute_force_extremes,
    cut_value,
    hamiltonian_from_graph,
    ising_energy,
    load_graph,
    pin_last_node,
    random_graph,
    save_graph,
)

TRIANGLE = WeightedGraph(3, ((0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)))


def exhaustive_extremes(ham):
    """Independent oracle: pure-Python enumeration of every spin assignment."""
    best_max, best_min = -float("inf"), float("inf")
    for bits in itertools.product("01", repeat=ham.num_qubits):
        energy = ising_energy(ham, "".join(bits))
        best_max = max(best_max, energy)
        best_min = min(best_min, energy)
    return best_max, best_min


def test_hamiltonian_from_graph_maps_edges_one_to_one():
    ham = hamiltonian_from_graph(TRIANGLE)
    assert ham.num_qubits == 3
    assert set(ham.zz_terms) == {(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)}
    single = hamiltonian_from_graph(WeightedGraph(2, ((0, 1, 5.0),)))
    assert single.zz_terms == ((0, 1, 5.0),)
    empty = hamiltonian_from_graph(WeightedGraph(2, ()))
    assert empty.zz_terms == ()


def test_cut_values():
    assert cut_value(TRIANGLE, "000") == 0
    assert cut_value(TRIANGLE, "010") == 2
    assert cut_value(WeightedGraph(2, ((0, 1, 5.0),)), "01") == 5
    with pytest.raises(ValueError):
        cut_value(TRIANGLE, "01")


def test_brute_force_extremes_examples():
    ham = hamiltonian_from_graph(TRIANGLE)
    maximum, minimum, argmin = brute_force_extremes(ham)
    assert (maximum, minimum) == exhaustive_extremes(ham) == (3.0, -1.0)
    assert ising_energy(ham, argmin) == minimum

    single = hamiltonian_from_graph(WeightedGraph(2, ((0, 1, 5.0),)))
    assert brute_force_extremes(single)[:2] == (5.0, -5.0)

    empty = IsingHamiltonian(3, ())
    assert brute_force_extremes(empty) == (0.0, 0.0, "000")


def test_brute_force_handles_z_terms_and_offset():
    ham = IsingHamiltonian(3, ((0, 1, 2.0),), ((2, -1.5),), offset=0.25)
    maximum, minimum, argmin = brute_force_extremes(ham)
    oracle_max, oracle_min = exhaustive_extremes(ham)
    assert maximum == pytest.approx(oracle_max)
    assert minimum == pytest.approx(oracle_min)
    assert ising_energy(ham, argmin) == pytest.approx(minimum)


def test_brute_force_cap():
    with pytest.raises(ValueError):
        brute_force_extremes(IsingHamiltonian(30, ((0, 1, 1.0),)))


def test_approximation_ratio():
    assert approximation_ratio(-1.0, 3.0, -1.0) == 1.0
    assert approximation_ratio(3.0, 3.0, -1.0) == 0.0
    assert approximation_ratio(1.0, 3.0, -1.0) == 0.5
    with pytest.raises(ValueError):
        approximation_ratio(0.0, 2.0, 2.0)


def _degrees(graph):
    degree = dict.fromkeys(range(graph.num_nodes), 0)
    for i, j, _ in graph.edges:
        degree[i] += 1
        degree[j] += 1
    return degree


def _is_connected(graph):
    neighbors = {v: set() for v in range(graph.num_nodes)}
    for i, j, _ in graph.edges:
        neighbors[i].add(j)
        neighbors[j].add(i)
    seen = {0}
    frontier = [0]
    while frontier:
        node = frontier.pop()
        for other in neighbors[node]:
            if other not in seen:
                seen.add(other)
                frontier.append(other)
    return len(seen) == graph.num_nodes


def test_random_graph_is_deterministic():
    assert random_graph(10, 7) == random_graph(10, 7)
    assert random_graph(10, 7) != random_graph(10, 8)


@pytest.mark.parametrize("num_nodes", [4, 6, 10, 16])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_random_graph_degree_weight_and_connectivity_protocol(num_nodes, seed):
    graph = random_graph(num_nodes, seed)
    degrees = _degrees(graph)
    assert all(2 <= d <= 3 for d in degrees.values())
    assert all(w == int(w) and 1 <= w <= 10 for _, _, w in graph.edges)
    assert _is_connected(graph)


def test_random_graph_rejects_tiny_instances():
    with pytest.raises(ValueError):
        random_graph(3, 0)


@pytest.mark.parametrize(
    "graph",
    [TRIANGLE, random_graph(6, 1), random_graph(8, 2), random_graph(10, 3)],
    ids=["triangle", "K6", "K8", "K10"],
)
def test_energy_cut_duality_exhaustively(graph):
    ham = hamiltonian_from_graph(graph)
    total_weight = sum(w for _, _, w in graph.edges)
    for assignment in itertools.product("01", repeat=graph.num_nodes):
        bits = "".join(assignment)
        assert total_weight - 2 * cut_value(graph, bits) == pytest.approx(
            ising_energy(ham, bits)
        )


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 6 - 1))
def test_global_spin_flip_symmetry(assignment):
    graph = random_graph(6, 4)
    ham = hamiltonian_from_graph(graph)
    bits = format(assignment, "06b")
    flipped = "".join("1" if b == "0" else "0" for b in bits)
    assert cut_value(graph, bits) == cut_value(graph, flipped)
    assert ising_energy(ham, bits) == pytest.approx(ising_energy(ham, flipped))


@pytest.mark.parametrize("seed", [0, 5, 9])
def test_max_is_negated_min_of_negated_instance(seed):
    graph = random_graph(8, seed)
    ham = hamiltonian_from_graph(graph)
    negated = IsingHamiltonian(
        ham.num_qubits, tuple((i, j, -w) for i, j, w in ham.zz_terms)
    )
    assert brute_force_extremes(ham)[0] == pytest.approx(
        -brute_force_extremes(negated)[1]
    )


def test_pin_last_node_creates_z_terms_and_keeps_extremes():
    graph = random_graph(8, 6)
    full = hamiltonian_from_graph(graph)
    reduced = pin_last_node(full)
    assert reduced.num_qubits == 7
    assert reduced.z_terms  # the pinned node had degree >= 2
    assert all(j != 7 and i != 7 for i, j, _ in reduced.zz_terms)
    # spin-flip symmetry makes the reduced spectrum extremes identical
    assert brute_force_extremes(reduced)[:2] == brute_force_extremes(full)[:2]


def test_pin_last_node_matches_restricted_enumeration():
    graph = random_graph(6, 11)
    full = hamiltonian_from_graph(graph)
    reduced = pin_last_node(full)
    for assignment in itertools.product("01", repeat=5):
        bits = "".join(assignment)
        assert ising_energy(reduced, bits) == pytest.approx(
            ising_energy(full, bits + "0")
        )


def test_graph_text_file_round_trip(tmp_path):
    graph = random_graph(7, 3)
    path = tmp_path / "graph.txt"
    save_graph(graph, str(path))
    first_line = path.read_text().splitlines()[0]
    assert first_line == "7"
    assert load_graph(str(path)) == graph


def test_graph_json_file_round_trip(tmp_path):
    graph = WeightedGraph(4, ((0, 1, 2.5), (2, 3, 1.0)))
    path = tmp_path / "graph.json"
    save_graph(graph, str(path))
    assert load_graph(str(path)) == graph


def test_graph_file_indices_are_one_based(tmp_path):
    path = tmp_path / "graph.txt"
    path.write_text("3\n1 2 1\n2 3 4.5\n")
    graph = load_graph(str(path))
    assert graph.edges == ((0, 1, 1.0), (1, 2, 4.5))


def test_graph_validation():
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 0, 1.0),))
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 1, 1.0), (0, 1, 2.0)))
    with pytest.raises(ValueError):
        WeightedGraph(3, ((0, 5, 1.0),))
    with pytest.raises(ValueError):
        IsingHamiltonian(2, ((0, 0, 1.0),))
