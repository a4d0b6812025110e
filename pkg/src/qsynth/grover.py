"""Zero-error Grover search.

The iteration count t = ceil((pi/4) 2^(n/2)) fixes a rotation angle
theta = (pi/2)/(2t+1) and a flag amplitude p = 2^n sin^2(theta) <= 1 such
that t reflections land exactly on the marked string, not merely with high
probability. The start state is |+>^n on the search register tensored with
sqrt(1-p)|0> + sqrt(p)|1> on a flag qubit; the oracle reflects about
|marked, 1> and the diffusion reflects about the start state. A final X
returns the flag to |0> so the circuit cleanly constructs |marked> and can
be run in reverse to uncompute a known string.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from qsynth.errors import DimensionMismatch
from qsynth.simcore import CircuitIR, StateVector, apply_circuit
from qsynth.simcore import gates as g

GROVER_ORACLE_ID = "marked"


@dataclass(frozen=True)
class GroverParams:
    n: int
    t: int
    theta: float
    p: float


def grover_params(n: int) -> GroverParams:
    if n < 1:
        raise DimensionMismatch("search register needs at least one qubit")
    t = math.ceil((math.pi / 4) * 2 ** (n / 2))
    theta = (math.pi / 2) / (2 * t + 1)
    p = (2**n) * math.sin(theta) ** 2
    # p <= 1 is guaranteed by t's choice; a violation means the formulas broke
    assert 0.0 < p <= 1.0, f"flag amplitude p={p!r} escaped (0, 1]"
    return GroverParams(n=n, t=t, theta=theta, p=p)


class MarkedReflectionOracle:
    """Reflection I - 2|x,1><x,1| on n+1 qubits with a query counter."""

    def __init__(self, n: int, marked: str):
        if len(marked) != n or set(marked) - {"0", "1"}:
            raise DimensionMismatch(f"marked string {marked!r} is not {n} bits")
        self.n = n
        self.marked = marked
        self.query_count = 0
        self.num_qubits = n + 1
        self._row = (int(marked, 2) << 1) | 1

    def _reflect(self, block: np.ndarray) -> np.ndarray:
        self.query_count += 1
        out = block.copy()
        out[self._row] = -out[self._row]
        return out

    apply_forward = _reflect
    apply_backward = _reflect

    def spec(self) -> dict:
        return {"kind": "marked_reflection", "n": self.n, "marked": self.marked}


def _flag_rotation(p: float) -> np.ndarray:
    c, s = math.sqrt(1.0 - p), math.sqrt(p)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def _prep_layer(n: int, p: float, negate: bool = False) -> list[g.Gate]:
    """One-qubit layer mapping |0...0> to the Grover start state.

    With ``negate`` the flag rotation carries a -1 so that conjugating the
    reflection about |0...0> yields exactly 2|psi0><psi0| - I, phase included.
    """
    v = _flag_rotation(p)
    if negate:
        v = -v
    return [g.one_qubit(g.H, q) for q in range(n)] + [g.one_qubit(v, n)]


def _adjoint_layer(layer: list[g.Gate]) -> list[g.Gate]:
    return [gate.adjoint() for gate in layer]


def build_exact_grover(n: int) -> CircuitIR:
    """Circuit on n+1 qubits mapping |0...0> to |marked>|0> once the oracle
    calls are bound to the marked reflection. Exactly t oracle calls."""
    params = grover_params(n)
    prep = _prep_layer(n, params.p)
    layers: list[list[g.Gate]] = [prep]
    for _ in range(params.t):
        layers.append([g.oracle_call(GROVER_ORACLE_ID, tuple(range(n + 1)))])
        layers.append(_adjoint_layer(prep))
        layers.append([g.basis_reflection("0" * (n + 1), tuple(range(n + 1)))])
        layers.append(_prep_layer(n, params.p, negate=True))
    layers.append([g.one_qubit(g.X, n)])
    return CircuitIR(
        n + 1,
        layers,
        register_map={"output": (0, n), "grover": (0, n + 1), "flag": (n, 1)},
    )


def build_reverse_grover(n: int) -> CircuitIR:
    """Inverse circuit: uncomputes |x>|0> to |0...0> given the same oracle."""
    return build_exact_grover(n).inverse()


def run_exact_grover(n: int, oracle: MarkedReflectionOracle) -> str:
    """Run the search against ``oracle`` and read out the found string."""
    if oracle.n != n:
        raise DimensionMismatch(f"oracle is for n={oracle.n}, search asked n={n}")
    circuit = build_exact_grover(n)
    final, _ = apply_circuit(
        StateVector.zero(n + 1), circuit, {GROVER_ORACLE_ID: oracle}
    )
    return final.most_likely_bits()[:n]


def grover_final_fidelity(n: int, marked: str) -> float:
    """Fidelity of the final state with |marked>|0>; 1 up to float error."""
    oracle = MarkedReflectionOracle(n, marked)
    circuit = build_exact_grover(n)
    final, _ = apply_circuit(
        StateVector.zero(n + 1), circuit, {GROVER_ORACLE_ID: oracle}
    )
    return final.fidelity(StateVector.basis(n + 1, int(marked, 2) << 1))
