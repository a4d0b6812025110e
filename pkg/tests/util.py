"""Shared test helpers: independent dense-gate construction and random circuits.

dense_gate builds gate matrices basis state by basis state straight from the
gate definitions (string bit twiddling), deliberately avoiding the reshape
machinery in the package so the two paths check each other.
"""

from __future__ import annotations

import numpy as np

from qsynth.simcore import CircuitIR, StateVector, haar_random_unitary
from qsynth.simcore import gates as g


def bits_of(index: int, m: int) -> list[int]:
    return [(index >> (m - 1 - q)) & 1 for q in range(m)]


def index_of(bits: list[int]) -> int:
    out = 0
    for b in bits:
        out = (out << 1) | b
    return out


def dense_gate(gate: g.Gate, m: int) -> np.ndarray:
    dim = 1 << m
    out = np.zeros((dim, dim), dtype=np.complex128)
    for col in range(dim):
        bits = bits_of(col, m)
        if gate.kind == g.TOFFOLI:
            target, controls = gate.targets[0], gate.targets[1:]
            new = list(bits)
            if all(bits[c] == 1 for c in controls):
                new[target] ^= 1
            out[index_of(new), col] = 1.0
        elif gate.kind == g.FANOUT:
            control, rest = gate.targets[0], gate.targets[1:]
            new = list(bits)
            for t in rest:
                new[t] ^= bits[control]
            out[index_of(new), col] = 1.0
        elif gate.kind == g.BASIS_REFLECTION:
            hit = all(bits[q] == int(b) for q, b in zip(gate.targets, gate.basis_state))
            out[col, col] = -1.0 if hit else 1.0
        elif gate.kind in (g.ONE_QUBIT, g.TWO_QUBIT):
            v = index_of([bits[t] for t in gate.targets])
            for w in range(gate.matrix.shape[0]):
                new = list(bits)
                wb = bits_of(w, len(gate.targets))
                for t, b in zip(gate.targets, wb):
                    new[t] = b
                out[index_of(new), col] += gate.matrix[w, v]
        else:
            raise AssertionError(f"dense_gate cannot embed {gate.kind}")
    return out


def random_circuit(m: int, layers: int, rng: np.random.Generator) -> CircuitIR:
    """Random mixed-kind circuit on m qubits (no oracle calls)."""
    built: list[list[g.Gate]] = []
    for _ in range(layers):
        qubits = list(rng.permutation(m))
        layer: list[g.Gate] = []
        while qubits:
            kind = rng.integers(0, 5)
            if kind == 0 or len(qubits) == 1:
                layer.append(g.one_qubit(haar_random_unitary(2, rng), qubits.pop()))
            elif kind == 1 or len(qubits) == 2:
                layer.append(g.two_qubit(haar_random_unitary(4, rng), qubits.pop(), qubits.pop()))
            else:
                arity = int(rng.integers(2, min(len(qubits), 5) + 1))
                chosen = [qubits.pop() for _ in range(arity)]
                if kind == 2:
                    layer.append(g.toffoli(chosen[0], tuple(chosen[1:])))
                elif kind == 3:
                    layer.append(g.fanout(chosen[0], tuple(chosen[1:])))
                else:
                    bits = "".join(str(rng.integers(0, 2)) for _ in chosen)
                    layer.append(g.basis_reflection(bits, tuple(chosen)))
        built.append(layer)
    return CircuitIR(m, built)


def random_state_pair(m: int, rng: np.random.Generator) -> StateVector:
    v = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return StateVector(m, v / np.linalg.norm(v))
