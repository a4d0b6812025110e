"""Gate and circuit application on dense state vectors.

Oracle calls are resolved through a bindings map from oracle id to an
object with ``num_qubits``, ``apply_forward(block)`` and
``apply_backward(block)``, where ``block`` has shape (2^k, batch) and the
row index runs over the oracle's qubits (first target most significant).
"""

from __future__ import annotations

import os

import numpy as np

from qsynth.errors import (
    DimensionMismatch,
    TargetOutOfRange,
    TooManyQubits,
    UnboundOracle,
)
from qsynth.simcore import gates as g
from qsynth.simcore.circuit import CircuitIR, ResourceReport
from qsynth.simcore.state import StateVector, is_unitary

DEFAULT_SIM_CAP = 14


def sim_cap() -> int:
    """Dense full-matrix check cap; override with QSYNTH_SIM_CAP."""
    raw = os.environ.get("QSYNTH_SIM_CAP")
    return int(raw) if raw else DEFAULT_SIM_CAP


class MatrixOracle:
    """Oracle backed by an explicit dense unitary."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix, dtype=np.complex128)
        if not is_unitary(matrix):
            raise DimensionMismatch("oracle matrix must be unitary")
        k = int(matrix.shape[0]).bit_length() - 1
        if 1 << k != matrix.shape[0]:
            raise DimensionMismatch("oracle dimension must be a power of two")
        self.num_qubits = k
        self.matrix = matrix

    def apply_forward(self, block: np.ndarray) -> np.ndarray:
        return self.matrix @ block

    def apply_backward(self, block: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ block


def _tensor(amps: np.ndarray, m: int) -> np.ndarray:
    return amps.reshape((2,) * m)


def _axis_positions(removed: tuple[int, ...], wanted: tuple[int, ...]) -> tuple[int, ...]:
    """Axis indices of ``wanted`` after the ``removed`` axes were sliced away."""
    return tuple(w - sum(1 for r in removed if r < w) for w in wanted)


def _apply_one_qubit(amps: np.ndarray, mat: np.ndarray, q: int, m: int) -> None:
    """In-place 1-qubit update via two half-array slices."""
    shaped = amps.reshape((1 << q, 2, -1))
    a, b = shaped[:, 0, :], shaped[:, 1, :]
    t = mat[0, 0] * a + mat[0, 1] * b
    b *= mat[1, 1]
    b += mat[1, 0] * a
    a[:] = t


def _apply_two_qubit(amps: np.ndarray, mat: np.ndarray, targets: tuple[int, ...], m: int) -> None:
    """In-place 2-qubit update; CNOT and SWAP skip the dense arithmetic."""
    hi, lo = targets
    if hi < lo:
        shaped = amps.reshape((1 << hi, 2, 1 << (lo - hi - 1), 2, -1))
        s = lambda i, j: shaped[:, i, :, j, :]
    else:
        shaped = amps.reshape((1 << lo, 2, 1 << (hi - lo - 1), 2, -1))
        s = lambda i, j: shaped[:, j, :, i, :]
    if np.array_equal(mat, g.CNOT):
        t = s(1, 0).copy()
        s(1, 0)[...] = s(1, 1)
        s(1, 1)[...] = t
        return
    if np.array_equal(mat, g.SWAP):
        t = s(0, 1).copy()
        s(0, 1)[...] = s(1, 0)
        s(1, 0)[...] = t
        return
    old = [s(0, 0), s(0, 1), s(1, 0), s(1, 1)]
    new = [sum(mat[r, c] * old[c] for c in range(4) if mat[r, c] != 0) for r in range(4)]
    for r in range(4):
        block = new[r]
        old[r][...] = block if isinstance(block, np.ndarray) else 0


def _apply_toffoli(amps: np.ndarray, targets: tuple[int, ...], m: int) -> None:
    view = _tensor(amps, m)
    controls = targets[1:]
    idx = [slice(None)] * m
    for c in controls:
        idx[c] = 1
    sub = view[tuple(idx)]
    (pos,) = _axis_positions(controls, (targets[0],))
    view[tuple(idx)] = np.flip(sub, axis=pos).copy()


def _apply_fanout(amps: np.ndarray, targets: tuple[int, ...], m: int) -> None:
    view = _tensor(amps, m)
    control = targets[0]
    idx = [slice(None)] * m
    idx[control] = 1
    sub = view[tuple(idx)]
    pos = _axis_positions((control,), targets[1:])
    view[tuple(idx)] = np.flip(sub, axis=pos).copy()


def _apply_reflection(amps: np.ndarray, bits: str, targets: tuple[int, ...], m: int) -> None:
    view = _tensor(amps, m)
    idx = [slice(None)] * m
    for q, b in zip(targets, bits):
        idx[q] = int(b)
    view[tuple(idx)] = -view[tuple(idx)]


def _apply_oracle(amps: np.ndarray, gate: g.Gate, bindings: dict, m: int) -> np.ndarray:
    if not bindings or gate.oracle_id not in bindings:
        raise UnboundOracle(f"no binding for oracle {gate.oracle_id!r}")
    oracle = bindings[gate.oracle_id]
    k = len(gate.targets)
    if getattr(oracle, "num_qubits", k) != k:
        raise DimensionMismatch(
            f"oracle {gate.oracle_id!r} acts on {oracle.num_qubits} qubits, call has {k} targets"
        )
    t = np.moveaxis(_tensor(amps, m), gate.targets, range(k))
    shape = t.shape
    block = np.ascontiguousarray(t).reshape(1 << k, -1)
    if gate.direction == g.FORWARD:
        block = oracle.apply_forward(block)
    else:
        block = oracle.apply_backward(block)
    t = np.moveaxis(np.asarray(block).reshape(shape), range(k), gate.targets)
    return np.ascontiguousarray(t).reshape(-1)


def _apply_gate_raw(amps: np.ndarray, gate: g.Gate, bindings: dict | None, m: int) -> np.ndarray:
    """Apply one gate to an owned buffer; mutates in place where possible and
    always returns the updated array."""
    for t in gate.targets:
        if not 0 <= t < m:
            raise TargetOutOfRange(f"gate target {t} outside [0, {m})")
    if gate.kind == g.ONE_QUBIT:
        _apply_one_qubit(amps, gate.matrix, gate.targets[0], m)
    elif gate.kind == g.TWO_QUBIT:
        _apply_two_qubit(amps, gate.matrix, gate.targets, m)
    elif gate.kind == g.TOFFOLI:
        _apply_toffoli(amps, gate.targets, m)
    elif gate.kind == g.FANOUT:
        _apply_fanout(amps, gate.targets, m)
    elif gate.kind == g.BASIS_REFLECTION:
        _apply_reflection(amps, gate.basis_state, gate.targets, m)
    else:
        return _apply_oracle(amps, gate, bindings or {}, m)
    return amps


def apply_gate(state: StateVector, gate: g.Gate, bindings: dict | None = None) -> StateVector:
    """Apply one gate; norm is preserved and re-validated."""
    amps = _apply_gate_raw(state.amps.copy(), gate, bindings, state.num_qubits)
    return StateVector(state.num_qubits, amps)


def apply_circuit(
    state: StateVector, circuit: CircuitIR, bindings: dict | None = None
) -> tuple[StateVector, ResourceReport]:
    """Apply all layers in order and report the resources actually used."""
    if circuit.num_qubits != state.num_qubits:
        raise DimensionMismatch(
            f"circuit on {circuit.num_qubits} qubits cannot act on {state.num_qubits}-qubit state"
        )
    amps = state.amps.copy()
    fwd = bwd = 0
    for layer in circuit.layers:
        for gate in layer:
            amps = _apply_gate_raw(amps, gate, bindings, state.num_qubits)
            if gate.kind == g.ORACLE_CALL:
                if gate.direction == g.FORWARD:
                    fwd += 1
                else:
                    bwd += 1
    report = ResourceReport(circuit.depth, circuit.size, circuit.ancilla_count(), fwd, bwd)
    assert report.size <= report.depth * circuit.num_qubits
    assert (fwd, bwd) == circuit.query_counts()
    return StateVector(state.num_qubits, amps), report


def circuit_as_matrix(circuit: CircuitIR, bindings: dict | None = None) -> np.ndarray:
    """Full 2^m x 2^m unitary of the circuit, columns by basis-state simulation."""
    m = circuit.num_qubits
    if m > sim_cap():
        raise TooManyQubits(f"{m} qubits exceeds the simulation cap {sim_cap()}")
    dim = 1 << m
    out = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        amps = np.zeros(dim, dtype=np.complex128)
        amps[col] = 1.0
        for layer in circuit.layers:
            for gate in layer:
                amps = _apply_gate_raw(amps, gate, bindings, m)
        out[:, col] = amps
    return out


def implementation_distance(
    circuit: CircuitIR, bindings: dict | None, unitary: np.ndarray
) -> float:
    """Operator norm of C(I_n x |0...0>) - U x |0...0>.

    The circuit's first n qubits are the logical register; all remaining
    qubits start and must end at |0>. Computed as the largest singular
    value of the 2^m x 2^n difference matrix.
    """
    unitary = np.asarray(unitary, dtype=np.complex128)
    n = int(unitary.shape[0]).bit_length() - 1
    if 1 << n != unitary.shape[0] or unitary.ndim != 2 or unitary.shape[0] != unitary.shape[1]:
        raise DimensionMismatch("unitary must be square with power-of-two dimension")
    m = circuit.num_qubits
    if m < n:
        raise DimensionMismatch(f"circuit has {m} qubits, unitary needs {n}")
    if m > sim_cap():
        raise TooManyQubits(f"{m} qubits exceeds the simulation cap {sim_cap()}")
    pad = 1 << (m - n)
    diff = np.zeros((1 << m, 1 << n), dtype=np.complex128)
    for col in range(1 << n):
        amps = np.zeros(1 << m, dtype=np.complex128)
        amps[col * pad] = 1.0
        for layer in circuit.layers:
            for gate in layer:
                amps = _apply_gate_raw(amps, gate, bindings, m)
        expected = np.zeros(1 << m, dtype=np.complex128)
        expected[np.arange(1 << n) * pad] = unitary[:, col]
        diff[:, col] = amps - expected
    return float(np.linalg.norm(diff, 2))


class CircuitOracle:
    """Oracle whose action is a gate-level circuit on logical qubits plus
    clean ancillae. Ancillae are driven from |0> and must return to |0>."""

    def __init__(self, circuit: CircuitIR, logical_qubits: int, bindings: dict | None = None,
                 ancilla_tol: float = 1e-9):
        if logical_qubits > circuit.num_qubits:
            raise DimensionMismatch("logical register larger than the circuit")
        self.num_qubits = logical_qubits
        self.circuit = circuit
        self.bindings = bindings
        self.ancilla_tol = ancilla_tol
        self._inverse = circuit.inverse()

    def _run(self, block: np.ndarray, circuit: CircuitIR) -> np.ndarray:
        k = self.num_qubits
        extra = circuit.num_qubits - k
        batch = block.shape[1]
        out = np.empty_like(block)
        for j in range(batch):
            amps = np.zeros(1 << circuit.num_qubits, dtype=np.complex128)
            amps[(np.arange(1 << k)) << extra] = block[:, j]
            for layer in circuit.layers:
                for gate in layer:
                    amps = _apply_gate_raw(amps, gate, self.bindings, circuit.num_qubits)
            lifted = amps.reshape(1 << k, 1 << extra)
            leak = float(np.sum(np.abs(lifted[:, 1:]) ** 2))
            if leak > self.ancilla_tol:
                raise DimensionMismatch(
                    f"circuit oracle left {leak:.3e} probability outside |0> ancillae"
                )
            out[:, j] = lifted[:, 0]
        return out

    def apply_forward(self, block: np.ndarray) -> np.ndarray:
        return self._run(block, self.circuit)

    def apply_backward(self, block: np.ndarray) -> np.ndarray:
        return self._run(block, self._inverse)
