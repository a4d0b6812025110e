"""Gate records and the fixed matrices the builders lean on.

Multi-qubit conventions: a Toffoli flips ``targets[0]`` iff all remaining
targets read 1; a fanout XORs ``targets[0]`` onto all remaining targets; a
basis reflection negates the amplitude of one basis string over its targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from qsynth.errors import DimensionMismatch, NonUnitaryGate
from qsynth.simcore.state import is_unitary

ONE_QUBIT = "one_qubit"
TWO_QUBIT = "two_qubit"
TOFFOLI = "toffoli"
FANOUT = "fanout"
BASIS_REFLECTION = "basis_reflection"
ORACLE_CALL = "oracle_call"

FORWARD = "forward"
BACKWARD = "backward"

SQ2 = 1.0 / np.sqrt(2.0)
I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[SQ2, SQ2], [SQ2, -SQ2]], dtype=np.complex128)
SQRT_X = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=np.complex128)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)
SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128
)


def controlled(u: np.ndarray) -> np.ndarray:
    """Two-qubit block matrix |0><0| x I + |1><1| x u (control = first qubit)."""
    out = np.eye(4, dtype=np.complex128)
    out[2:, 2:] = u
    return out


@dataclass(eq=False)
class Gate:
    kind: str
    targets: tuple[int, ...]
    matrix: np.ndarray | None = None
    basis_state: str | None = None
    direction: str | None = None
    oracle_id: str | None = None

    def __post_init__(self):
        self.targets = tuple(int(t) for t in self.targets)
        if len(set(self.targets)) != len(self.targets):
            raise DimensionMismatch(f"duplicate targets {self.targets}")
        if self.kind in (ONE_QUBIT, TWO_QUBIT):
            arity = 1 if self.kind == ONE_QUBIT else 2
            if len(self.targets) != arity:
                raise DimensionMismatch(f"{self.kind} needs {arity} targets")
            self.matrix = np.asarray(self.matrix, dtype=np.complex128)
            if self.matrix.shape != (1 << arity, 1 << arity):
                raise DimensionMismatch(f"{self.kind} matrix must be {1 << arity}x{1 << arity}")
            if not is_unitary(self.matrix):
                raise NonUnitaryGate(f"{self.kind} matrix is not unitary within 1e-10")
        elif self.kind in (TOFFOLI, FANOUT):
            if len(self.targets) < 2:
                raise DimensionMismatch(f"{self.kind} arity must be at least 2")
        elif self.kind == BASIS_REFLECTION:
            if self.basis_state is None or len(self.basis_state) != len(self.targets):
                raise DimensionMismatch("basis_state length must equal target count")
            if set(self.basis_state) - {"0", "1"}:
                raise DimensionMismatch(f"bad basis_state {self.basis_state!r}")
        elif self.kind == ORACLE_CALL:
            if self.direction not in (FORWARD, BACKWARD):
                raise DimensionMismatch(f"bad oracle direction {self.direction!r}")
            if not self.oracle_id:
                raise DimensionMismatch("oracle_call needs an oracle_id")
        else:
            raise DimensionMismatch(f"unknown gate kind {self.kind!r}")

    @property
    def arity(self) -> int:
        return len(self.targets)

    def adjoint(self) -> "Gate":
        """Inverse gate. Toffoli, fanout and reflections are self-inverse."""
        if self.kind in (ONE_QUBIT, TWO_QUBIT):
            return Gate(self.kind, self.targets, matrix=self.matrix.conj().T)
        if self.kind == ORACLE_CALL:
            flipped = BACKWARD if self.direction == FORWARD else FORWARD
            return Gate(self.kind, self.targets, direction=flipped, oracle_id=self.oracle_id)
        return Gate(self.kind, self.targets, basis_state=self.basis_state)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Gate):
            return NotImplemented
        if (self.kind, self.targets, self.basis_state, self.direction, self.oracle_id) != (
            other.kind, other.targets, other.basis_state, other.direction, other.oracle_id
        ):
            return False
        if self.matrix is None or other.matrix is None:
            return self.matrix is None and other.matrix is None
        return bool(np.array_equal(self.matrix, other.matrix))


def one_qubit(matrix: np.ndarray, target: int) -> Gate:
    return Gate(ONE_QUBIT, (target,), matrix=matrix)


def two_qubit(matrix: np.ndarray, a: int, b: int) -> Gate:
    return Gate(TWO_QUBIT, (a, b), matrix=matrix)


def cnot(control: int, target: int) -> Gate:
    return Gate(TWO_QUBIT, (control, target), matrix=CNOT)


def swap(a: int, b: int) -> Gate:
    return Gate(TWO_QUBIT, (a, b), matrix=SWAP)


def toffoli(target: int, controls: tuple[int, ...]) -> Gate:
    return Gate(TOFFOLI, (target, *controls))


def fanout(control: int, targets: tuple[int, ...]) -> Gate:
    return Gate(FANOUT, (control, *targets))


def basis_reflection(bits: str, targets: tuple[int, ...]) -> Gate:
    return Gate(BASIS_REFLECTION, tuple(targets), basis_state=bits)


def oracle_call(oracle_id: str, targets: tuple[int, ...], direction: str = FORWARD) -> Gate:
    return Gate(ORACLE_CALL, tuple(targets), direction=direction, oracle_id=oracle_id)
