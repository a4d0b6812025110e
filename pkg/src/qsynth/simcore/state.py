"""Dense state vectors.

Index convention used everywhere in this package: qubit 0 is the most
significant bit of the basis-state index, so |q0 q1 ... q_{m-1}> lives at
index q0*2^(m-1) + q1*2^(m-2) + ... + q_{m-1}.
"""

from __future__ import annotations

import numpy as np

from qsynth.errors import DimensionMismatch, UnnormalizedState

NORM_TOL = 1e-10


class StateVector:
    """A normalized pure state on ``num_qubits`` qubits."""

    __slots__ = ("num_qubits", "amps")

    def __init__(self, num_qubits: int, amps: np.ndarray, *, validate: bool = True):
        if num_qubits < 1:
            raise DimensionMismatch(f"need at least one qubit, got {num_qubits}")
        amps = np.asarray(amps, dtype=np.complex128)
        if amps.shape != (1 << num_qubits,):
            raise DimensionMismatch(
                f"expected {1 << num_qubits} amplitudes for {num_qubits} qubits, got {amps.shape}"
            )
        if validate:
            if not np.all(np.isfinite(amps)):
                raise UnnormalizedState("non-finite amplitude")
            norm = float(np.linalg.norm(amps))
            if abs(norm - 1.0) > NORM_TOL:
                raise UnnormalizedState(f"norm {norm!r} deviates from 1 by more than {NORM_TOL}")
        self.num_qubits = num_qubits
        self.amps = amps

    @classmethod
    def zero(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(num_qubits, amps, validate=False)

    @classmethod
    def basis(cls, num_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(num_qubits, amps, validate=False)

    @classmethod
    def from_bits(cls, bits: str) -> "StateVector":
        """Computational basis state from a bit string, qubit 0 first."""
        return cls.basis(len(bits), int(bits, 2))

    def fidelity(self, other: "StateVector") -> float:
        """|<self|other>|^2."""
        if self.num_qubits != other.num_qubits:
            raise DimensionMismatch("fidelity needs equal qubit counts")
        return float(abs(np.vdot(self.amps, other.amps)) ** 2)

    def prob_zero_on(self, qubits: tuple[int, ...]) -> float:
        """Probability that every listed qubit measures 0."""
        t = self.amps.reshape((2,) * self.num_qubits)
        idx = [slice(None)] * self.num_qubits
        for q in qubits:
            idx[q] = 0
        block = t[tuple(idx)]
        return float(np.sum(np.abs(block) ** 2))

    def most_likely_bits(self) -> str:
        return format(int(np.argmax(np.abs(self.amps) ** 2)), f"0{self.num_qubits}b")

    def __repr__(self) -> str:
        return f"StateVector(num_qubits={self.num_qubits})"


def random_state(num_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state (normalized complex Gaussian vector)."""
    dim = 1 << num_qubits
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(num_qubits, v / np.linalg.norm(v), validate=False)


def haar_random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def is_unitary(mat: np.ndarray, tol: float = 1e-10) -> bool:
    mat = np.asarray(mat)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return False
    if not np.all(np.isfinite(mat)):
        return False
    eye = np.eye(mat.shape[0])
    return bool(np.max(np.abs(mat.conj().T @ mat - eye)) <= tol)
