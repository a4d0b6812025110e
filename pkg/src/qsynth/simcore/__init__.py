"""Simulation substrate: state vectors, gates, circuit IR, lowering, metrics."""

from qsynth.simcore.state import (
    StateVector,
    haar_random_unitary,
    is_unitary,
    random_state,
)
from qsynth.simcore.circuit import QNC, QACF0, ORACLE, CircuitIR, ResourceReport
from qsynth.simcore.apply import (
    CircuitOracle,
    MatrixOracle,
    apply_circuit,
    apply_gate,
    circuit_as_matrix,
    implementation_distance,
    sim_cap,
)
from qsynth.simcore.lowering import lower_to_qnc, lowered_depth_of_gate
from qsynth.simcore.serial import (
    circuit_from_json,
    circuit_to_json,
    state_from_json,
    state_to_json,
    unitary_from_json,
    unitary_to_json,
)

__all__ = [
    "StateVector",
    "haar_random_unitary",
    "is_unitary",
    "random_state",
    "QNC",
    "QACF0",
    "ORACLE",
    "CircuitIR",
    "ResourceReport",
    "CircuitOracle",
    "MatrixOracle",
    "apply_circuit",
    "apply_gate",
    "circuit_as_matrix",
    "implementation_distance",
    "sim_cap",
    "lower_to_qnc",
    "lowered_depth_of_gate",
    "circuit_from_json",
    "circuit_to_json",
    "state_from_json",
    "state_to_json",
    "unitary_from_json",
    "unitary_to_json",
]
