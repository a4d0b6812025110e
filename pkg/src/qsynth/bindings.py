"""Reconstruction of oracle bindings from the specs embedded in circuit JSON.

Every oracle an emitted circuit references serializes to a small spec dict,
so a saved circuit stays self-contained for verify/simulate/stats runs.
"""

from __future__ import annotations

from qsynth.errors import MalformedOracle
from qsynth.grover import MarkedReflectionOracle
from qsynth.qram import QramOracle, functional_qram, permutation_qram
from qsynth.simcore import CircuitOracle, MatrixOracle
from qsynth.simcore.serial import circuit_from_json, unitary_from_json
from qsynth.statesynth import table_from_json
from qsynth.unitsynth import TreeQramAction, _BlockDiagAction, multiplexed_prep_unitary


def resolve_oracle(spec: dict):
    kind = spec.get("kind")
    if kind == "matrix":
        return MatrixOracle(unitary_from_json(spec["matrix"]))
    if kind == "marked_reflection":
        return MarkedReflectionOracle(int(spec["n"]), spec["marked"])
    if kind == "functional_qram":
        return functional_qram(unitary_from_json(spec["unitary"]))
    if kind == "permutation_qram":
        return permutation_qram([int(v) for v in spec["sigma"]])
    if kind == "qram_steps":
        action = TreeQramAction(unitary_from_json(spec["unitary"]))
        return QramOracle(action.n, action.m, action, spec=spec)
    if kind == "beta_qram":
        table = table_from_json(spec)
        n = table.n
        blocks = [
            multiplexed_prep_unitary(table, format(x, f"0{n}b")) for x in range(1 << n)
        ]
        return QramOracle(n, 2 * n, _BlockDiagAction(blocks), spec=spec)
    if kind == "circuit":
        return CircuitOracle(
            circuit_from_json(spec["circuit"]), int(spec["logical_qubits"])
        )
    raise MalformedOracle(f"unknown oracle spec kind {kind!r}")


def resolve_bindings(specs: dict | None) -> dict:
    if not specs:
        return {}
    return {oracle_id: resolve_oracle(spec) for oracle_id, spec in specs.items()}
