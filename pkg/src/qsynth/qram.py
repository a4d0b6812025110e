"""Unitary-loading oracles and the search-based circuit that implements a
unitary from oracle access.

A width-m oracle A loads U|x> next to a preserved address register:
A|x, 0^(m-n)> = |x> (x) U|x> (x) |0^(m-2n)>. Conjugating a basis reflection
by A and its adjoint yields, on the address-plus-flag register, exactly the
marked-string reflection that zero-error Grover consumes, while the loaded
copy of U|x> is left untouched. Running the search in reverse therefore
uncomputes the address, after which a swap moves U|x> into place. The whole
construction is exact: one initial load plus two oracle calls per Grover
iteration, 1 + 2t calls in total.
"""

from __future__ import annotations

import numpy as np

from qsynth.errors import (
    DimensionMismatch,
    NonUnitaryInput,
    NotABijection,
    QramPropertyViolated,
)
from qsynth.grover import GROVER_ORACLE_ID, build_reverse_grover, grover_params
from qsynth.simcore import CircuitIR, is_unitary
from qsynth.simcore import gates as g

QRAM_ORACLE_ID = "qram"


class QramOracle:
    """Black-box m-qubit unitary with per-run query counters.

    ``action`` supplies the unitary through apply_forward/apply_backward on
    (2^m, batch) blocks; the counters tick only when the oracle is queried
    through a circuit, not during verification.
    """

    def __init__(self, n: int, m: int, action, spec: dict | None = None):
        if m < 2 * n:
            raise DimensionMismatch(f"oracle width m={m} must be at least 2n={2 * n}")
        if getattr(action, "num_qubits", m) != m:
            raise DimensionMismatch("action width disagrees with m")
        self.n = n
        self.m = m
        self.num_qubits = m
        self.action = action
        self.forward_queries = 0
        self.backward_queries = 0
        self._spec = spec

    def apply_forward(self, block: np.ndarray) -> np.ndarray:
        self.forward_queries += 1
        return self.action.apply_forward(block)

    def apply_backward(self, block: np.ndarray) -> np.ndarray:
        self.backward_queries += 1
        return self.action.apply_backward(block)

    def reset_counters(self) -> None:
        self.forward_queries = 0
        self.backward_queries = 0

    def spec(self) -> dict | None:
        return self._spec


class _DenseAction:
    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix
        self.num_qubits = int(matrix.shape[0]).bit_length() - 1

    def apply_forward(self, block: np.ndarray) -> np.ndarray:
        return self.matrix @ block

    def apply_backward(self, block: np.ndarray) -> np.ndarray:
        return self.matrix.conj().T @ block


class _PermutationAction:
    """Basis permutation |i> -> |perm[i]>."""

    def __init__(self, perm: np.ndarray):
        self.perm = np.asarray(perm, dtype=np.int64)
        self.num_qubits = int(len(perm)).bit_length() - 1

    def apply_forward(self, block: np.ndarray) -> np.ndarray:
        out = np.empty_like(block)
        out[self.perm] = block
        return out

    def apply_backward(self, block: np.ndarray) -> np.ndarray:
        return block[self.perm]


def functional_qram(unitary: np.ndarray) -> QramOracle:
    """Oracle A|x, y> = |x> (x) U|x XOR y> on 2n qubits."""
    unitary = np.asarray(unitary, dtype=np.complex128)
    if not is_unitary(unitary):
        raise NonUnitaryInput("functional oracle needs a unitary within 1e-10")
    dim = unitary.shape[0]
    n = dim.bit_length() - 1
    if 1 << n != dim:
        raise DimensionMismatch("unitary dimension must be a power of two")
    blocks = np.zeros((dim * dim, dim * dim), dtype=np.complex128)
    for x in range(dim):
        cols = unitary[:, x ^ np.arange(dim)]
        blocks[x * dim : (x + 1) * dim, x * dim : (x + 1) * dim] = cols
    from qsynth.simcore.serial import unitary_to_json

    return QramOracle(
        n, 2 * n, _DenseAction(blocks),
        spec={"kind": "functional_qram", "n": n, "unitary": unitary_to_json(unitary)},
    )


def permutation_qram(sigma: list[int]) -> QramOracle:
    """XOR oracle A|x, y> = |x, y XOR sigma(x)> for a bijection sigma."""
    size = len(sigma)
    n = size.bit_length() - 1
    if 1 << n != size:
        raise DimensionMismatch("permutation table length must be a power of two")
    if sorted(sigma) != list(range(size)):
        raise NotABijection("table is not a bijection on n-bit strings")
    idx = np.arange(size * size, dtype=np.int64)
    x, y = idx >> n, idx & (size - 1)
    perm = (x << n) | (y ^ np.asarray(sigma, dtype=np.int64)[x])
    return QramOracle(
        n, 2 * n, _PermutationAction(perm),
        spec={"kind": "permutation_qram", "n": n, "sigma": [int(v) for v in sigma]},
    )


def verify_qram(oracle: QramOracle, unitary: np.ndarray, tol: float = 1e-9,
                exhaustive_limit: int = 8, samples: int = 256,
                seed: int = 0) -> dict:
    """Check A|x, 0^(m-n)> = |x> U|x> |0^(m-2n)| over all (or sampled) x.

    Uses the oracle's action directly so verification never touches the
    query counters. Returns {"ok": bool, "worst_deviation": float}.
    """
    unitary = np.asarray(unitary, dtype=np.complex128)
    n = int(unitary.shape[0]).bit_length() - 1
    m = oracle.m
    if 1 << n != unitary.shape[0] or oracle.n != n or m < 2 * n:
        raise DimensionMismatch("oracle and unitary disagree on qubit counts")
    if n <= exhaustive_limit:
        xs = range(1 << n)
    else:
        xs = np.random.default_rng(seed).integers(0, 1 << n, size=samples)
    worst = 0.0
    for x in xs:
        x = int(x)
        col = np.zeros(1 << m, dtype=np.complex128)
        col[x << (m - n)] = 1.0
        out = oracle.action.apply_forward(col.reshape(-1, 1))[:, 0]
        expected = np.zeros(1 << m, dtype=np.complex128)
        expected[(x << (m - n)) + (np.arange(1 << n) << (m - 2 * n))] = unitary[:, x]
        worst = max(worst, float(np.linalg.norm(out - expected)))
    return {"ok": worst <= tol, "worst_deviation": worst}


def qram_implied_unitary(oracle: QramOracle, tol: float = 1e-9) -> np.ndarray:
    """Recover U from the loaded columns, checking the loading property.

    Raises QramPropertyViolated if the address is disturbed, the padding is
    not returned to zero, or the loaded states are not orthonormal.
    """
    n, m = oracle.n, oracle.m
    dim = 1 << n
    u = np.zeros((dim, dim), dtype=np.complex128)
    for x in range(dim):
        col = np.zeros(1 << m, dtype=np.complex128)
        col[x << (m - n)] = 1.0
        out = oracle.action.apply_forward(col.reshape(-1, 1))[:, 0]
        shaped = out.reshape(dim, 1 << (m - n))
        leak = float(np.sum(np.abs(shaped) ** 2) - np.sum(np.abs(shaped[x]) ** 2))
        pad = shaped[x].reshape(dim, 1 << (m - 2 * n))
        pad_leak = float(np.sum(np.abs(pad[:, 1:]) ** 2))
        if leak > tol or pad_leak > tol:
            raise QramPropertyViolated(
                f"loading |{x:0{n}b}> left {leak + pad_leak:.3e} outside the output slot"
            )
        u[:, x] = pad[:, 0]
    if not is_unitary(u, tol):
        raise QramPropertyViolated("loaded states are not orthonormal")
    return u


def _oracle_targets(n: int, m: int) -> tuple[int, ...]:
    """Oracle qubits in circuit order: address register then data tail."""
    return tuple(range(n)) + tuple(range(n + 1, m + 1))


def reflection_from_qram(oracle: QramOracle) -> CircuitIR:
    """Reflection about the loaded subspace on m+1 qubits.

    Applies the oracle backward, reflects about |0^(m-n)>|1> on the data
    tail plus flag, applies the oracle forward. On the address-plus-flag
    register this acts as I - 2|x,1><x,1| whenever the tail holds U|x>.
    """
    n, m = oracle.n, oracle.m
    targets = _oracle_targets(n, m)
    tail_and_flag = tuple(range(n + 1, m + 1)) + (n,)
    layers = [
        [g.oracle_call(QRAM_ORACLE_ID, targets, direction=g.BACKWARD)],
        [g.basis_reflection("0" * (m - n) + "1", tail_and_flag)],
        [g.oracle_call(QRAM_ORACLE_ID, targets, direction=g.FORWARD)],
    ]
    return CircuitIR(
        m + 1,
        layers,
        register_map={"address": (0, n), "flag": (n, 1), "qram": (n + 1, m - n)},
    )


def implement_via_qram(oracle: QramOracle, check: bool = True, check_tol: float = 1e-9) -> CircuitIR:
    """Circuit on m+1 qubits implementing the oracle's unitary exactly.

    Load once, run the reverse zero-error search with every query answered
    by the conjugated reflection, then swap the result into the input
    register. 1 + 2t oracle calls; all ancillae end at |0>.
    """
    n, m = oracle.n, oracle.m
    if check:
        qram_implied_unitary(oracle, check_tol)
    targets = _oracle_targets(n, m)
    reflection = reflection_from_qram(oracle)
    layers: list[list[g.Gate]] = [[g.oracle_call(QRAM_ORACLE_ID, targets)]]
    for layer in build_reverse_grover(n).layers:
        is_query = any(
            gate.kind == g.ORACLE_CALL and gate.oracle_id == GROVER_ORACLE_ID
            for gate in layer
        )
        if is_query:
            layers.extend([list(refl_layer) for refl_layer in reflection.layers])
        else:
            layers.append(list(layer))
    layers.append([g.swap(i, n + 1 + i) for i in range(n)])
    return CircuitIR(
        m + 1,
        layers,
        register_map={
            "input": (0, n),
            "output": (0, n),
            "grover": (0, n + 1),
            "flag": (n, 1),
            "qram": (n + 1, m - n),
        },
    )


def query_budget(n: int) -> int:
    """Oracle calls used by implement_via_qram: one load plus two per iteration."""
    return 1 + 2 * grover_params(n).t
