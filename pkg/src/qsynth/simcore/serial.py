"""JSON wire formats.

Circuit: {"format": 1, "num_qubits": int, "gate_class": str,
          "registers": {name: [start, len]}, "layers": [[gate, ...], ...],
          "oracles": {id: spec}?}
Gate:    {"kind": str, "targets": [int, ...]} plus, per kind, a row-major
         "matrix" as a flat list of [re, im] pairs, a "basis_state" string,
         or "direction" and "oracle_id".
State:   {"num_qubits": int, "amps": [[re, im], ...]} in index order.
Unitary: row-major nested arrays of [re, im].
"""

from __future__ import annotations

import numpy as np

from qsynth.errors import DimensionMismatch
from qsynth.simcore import gates as g
from qsynth.simcore.circuit import CircuitIR

FORMAT_VERSION = 1


def _matrix_to_pairs(mat: np.ndarray) -> list[list[float]]:
    flat = np.asarray(mat, dtype=np.complex128).reshape(-1)
    return [[float(z.real), float(z.imag)] for z in flat]


def _pairs_to_matrix(pairs: list[list[float]]) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)
    dim = int(round(len(flat) ** 0.5))
    if dim * dim != len(flat):
        raise DimensionMismatch("matrix pair list is not square")
    return flat.reshape(dim, dim)


def gate_to_json(gate: g.Gate) -> dict:
    out: dict = {"kind": gate.kind, "targets": list(gate.targets)}
    if gate.matrix is not None:
        out["matrix"] = _matrix_to_pairs(gate.matrix)
    if gate.basis_state is not None:
        out["basis_state"] = gate.basis_state
    if gate.kind == g.ORACLE_CALL:
        out["direction"] = gate.direction
        out["oracle_id"] = gate.oracle_id
    return out


def gate_from_json(data: dict) -> g.Gate:
    kind = data["kind"]
    targets = tuple(data["targets"])
    if kind in (g.ONE_QUBIT, g.TWO_QUBIT):
        return g.Gate(kind, targets, matrix=_pairs_to_matrix(data["matrix"]))
    if kind == g.BASIS_REFLECTION:
        return g.Gate(kind, targets, basis_state=data["basis_state"])
    if kind == g.ORACLE_CALL:
        return g.Gate(kind, targets, direction=data["direction"], oracle_id=data["oracle_id"])
    return g.Gate(kind, targets)


def circuit_to_json(circuit: CircuitIR, oracles: dict | None = None) -> dict:
    out = {
        "format": FORMAT_VERSION,
        "num_qubits": circuit.num_qubits,
        "gate_class": circuit.gate_class,
        "registers": {name: [start, length] for name, (start, length) in circuit.register_map.items()},
        "layers": [[gate_to_json(gate) for gate in layer] for layer in circuit.layers],
    }
    if oracles:
        out["oracles"] = oracles
    return out


def circuit_from_json(data: dict) -> CircuitIR:
    if data.get("format", FORMAT_VERSION) != FORMAT_VERSION:
        raise DimensionMismatch(f"unsupported circuit format {data.get('format')!r}")
    registers = {name: (int(r[0]), int(r[1])) for name, r in data.get("registers", {}).items()}
    layers = [[gate_from_json(gd) for gd in layer] for layer in data["layers"]]
    return CircuitIR(int(data["num_qubits"]), layers, registers, data.get("gate_class"))


def state_to_json(num_qubits: int, amps: np.ndarray) -> dict:
    return {
        "num_qubits": num_qubits,
        "amps": [[float(z.real), float(z.imag)] for z in np.asarray(amps, dtype=np.complex128)],
    }


def state_from_json(data: dict) -> tuple[int, np.ndarray]:
    amps = np.array([complex(re, im) for re, im in data["amps"]], dtype=np.complex128)
    return int(data["num_qubits"]), amps


def unitary_to_json(matrix: np.ndarray) -> list:
    matrix = np.asarray(matrix, dtype=np.complex128)
    return [[[float(z.real), float(z.imag)] for z in row] for row in matrix]


def unitary_from_json(data: list) -> np.ndarray:
    return np.array(
        [[complex(re, im) for re, im in row] for row in data], dtype=np.complex128
    )
