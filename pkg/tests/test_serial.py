"""Wire-format round trips and the index convention format test."""

import json

import numpy as np

from qsynth.simcore import (
    StateVector,
    apply_gate,
    circuit_from_json,
    circuit_to_json,
    state_from_json,
    state_to_json,
    unitary_from_json,
    unitary_to_json,
)
from qsynth.simcore import gates as g

from tests.util import random_circuit


def test_qubit_zero_is_most_significant():
    # X on qubit 0 of a 2-qubit register maps |00> to |10>, i.e. index 0 -> 2
    out = apply_gate(StateVector.zero(2), g.one_qubit(g.X, 0))
    assert np.argmax(np.abs(out.amps)) == 0b10


def test_circuit_json_round_trip_structural():
    rng = np.random.default_rng(41)
    for _ in range(10):
        circuit = random_circuit(int(rng.integers(2, 6)), 4, rng)
        data = json.loads(json.dumps(circuit_to_json(circuit)))
        assert circuit_from_json(data) == circuit


def test_circuit_json_with_oracle_calls_and_registers():
    from qsynth.simcore import CircuitIR

    circuit = CircuitIR(
        3,
        [[g.oracle_call("qram", (0, 1, 2))], [g.basis_reflection("01", (1, 2))]],
        register_map={"input": (0, 1), "qram": (1, 2)},
    )
    data = circuit_to_json(circuit, oracles={"qram": {"kind": "matrix"}})
    parsed = circuit_from_json(json.loads(json.dumps(data)))
    assert parsed == circuit
    assert data["oracles"] == {"qram": {"kind": "matrix"}}


def test_state_json_round_trip():
    rng = np.random.default_rng(4)
    v = rng.normal(size=8) + 1j * rng.normal(size=8)
    v /= np.linalg.norm(v)
    n, amps = state_from_json(json.loads(json.dumps(state_to_json(3, v))))
    assert n == 3 and np.array_equal(amps, v)


def test_unitary_json_round_trip():
    mat = np.asarray(g.SQRT_X)
    back = unitary_from_json(json.loads(json.dumps(unitary_to_json(mat))))
    assert np.array_equal(back, mat)
