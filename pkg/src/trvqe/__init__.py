"""Tensor-ring VQE: a classical Max-Cut solver that contracts variational
circuits through a rank-truncated tensor ring, with an exact statevector
oracle for verification."""

from .circuits import (
    Circuit,
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
)
from .maxcut import (
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
from .optimize import (
    ExactBackend,
    OptimizerConfig,
    TensorRingBackend,
    TrainTrace,
    TrainingDivergedError,
    gradient_distance,
    initial_parameters,
    load_trace_csv,
    load_trace_json,
    parameter_shift_gradient,
    run_vqe,
    sample_parameter_points,
    write_trace_csv,
    write_trace_json,
)
from .statevector import DenseState, expectation_exact, simulate_exact
from .tensor_ring import (
    RoutingRequiredError,
    TensorRingState,
    apply_single_qubit,
    apply_two_qubit,
    apply_two_qubit_adjacent,
    dump_state_json,
    expectation_hamiltonian,
    expectation_z,
    expectation_zz,
    init_zero_state,
    load_state_json,
    norm_squared,
    to_statevector,
    two_qubit_gate_tensor,
)

__version__ = "0.1.0"
