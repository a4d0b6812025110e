"""State preparation three ways.

The workhorse is a conditional-amplitude tree: for every nonempty prefix x
of a basis string, beta_x is the amplitude of x's last bit given the
earlier bits, so full amplitudes factor as alpha_x = prod_i beta_{x<=i}.

1. A constant-layer-count circuit over one-qubit gates, generalized
   Toffolis and fanouts: place one qubit per prefix in state
   phi_x = beta_{x0}|0> + beta_{x1}|1>, XOR the self-indexing function
   f(x)_i = x_{f(x)_{<i}} (computed by a per-output-bit DNF) onto an
   n-qubit output register, then uncompute every prefix qubit controlled
   on the output.
2. Its one/two-qubit lowering (depth linear in n).
3. A query-driven loop that reads finite-precision encodings of the child
   amplitudes from a classical bit table and rotates one qubit per level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from qsynth.errors import DimensionMismatch, MalformedOracle
from qsynth.simcore import CircuitIR, StateVector
from qsynth.simcore import gates as g
from qsynth.simcore.lowering import lower_to_qnc


# ---------------------------------------------------------------------------
# conditional-amplitude tree


@dataclass
class AmplitudeTree:
    """beta_x for every nonempty prefix x (strings of length 1..n).

    Internal betas are subtree-norm ratios (real, nonnegative); the last
    level carries the amplitudes' phases. Zero-mass branches follow the
    convention beta_{x0} = 1, beta_{x1} = 0.
    """

    n: int
    beta: dict[str, complex]

    def children(self, prefix: str) -> tuple[complex, complex]:
        return self.beta[prefix + "0"], self.beta[prefix + "1"]

    def phi_matrix(self, prefix: str) -> np.ndarray:
        """One-qubit unitary sending |0> to beta_{x0}|0> + beta_{x1}|1>."""
        b0, b1 = self.children(prefix)
        return np.array([[b0, -np.conj(b1)], [b1, np.conj(b0)]], dtype=np.complex128)


def amplitude_tree(psi: StateVector) -> AmplitudeTree:
    n = psi.num_qubits
    mass = [None] * (n + 1)
    mass[n] = np.abs(psi.amps) ** 2
    for level in range(n - 1, -1, -1):
        mass[level] = mass[level + 1].reshape(-1, 2).sum(axis=1)
    norms = [np.sqrt(m) for m in mass]
    beta: dict[str, complex] = {}
    for level in range(1, n + 1):
        parent_norms = norms[level - 1]
        for v in range(1 << level):
            key = format(v, f"0{level}b")
            parent = parent_norms[v >> 1]
            if parent == 0.0:
                beta[key] = 1.0 + 0j if key[-1] == "0" else 0.0 + 0j
            elif level == n:
                beta[key] = complex(psi.amps[v]) / parent
            else:
                beta[key] = complex(norms[level][v]) / parent
    return AmplitudeTree(n=n, beta=beta)


def tree_reconstruct(tree: AmplitudeTree) -> np.ndarray:
    """Amplitudes rebuilt as products of betas down each root-to-leaf path."""
    amps = np.zeros(1 << tree.n, dtype=np.complex128)
    for v in range(1 << tree.n):
        bits = format(v, f"0{tree.n}b")
        prod = 1.0 + 0j
        for i in range(1, tree.n + 1):
            prod *= tree.beta[bits[:i]]
        amps[v] = prod
    return amps


# ---------------------------------------------------------------------------
# the self-indexing function f and its DNF


def eval_f(assignment: dict[str, int], n: int) -> str:
    """Resolve f(x)_i = x_{f(x)_{<i}} by n sequential lookups."""
    y = ""
    for _ in range(n):
        y += str(assignment[y])
    return y


@dataclass
class DnfFormula:
    """Per output bit j, a disjunction over the depth-j prefixes that end in 1
    of conjunctions asserting the prefix lies on the selected path."""

    n: int
    outputs: list[list[list[tuple[str, int]]]] = field(default_factory=list)

    def term_count(self, j: int) -> int:
        return len(self.outputs[j - 1])

    def literal_count(self) -> int:
        return sum(len(term) for terms in self.outputs for term in terms)


def build_f_dnf(n: int) -> DnfFormula:
    if n < 1:
        raise DimensionMismatch("need at least one output bit")
    outputs = []
    for j in range(1, n + 1):
        terms = []
        for tv in range(1 << j):
            t = format(tv, f"0{j}b")
            if t[-1] != "1":
                continue
            terms.append([(t[:i], int(t[i])) for i in range(j)])
        outputs.append(terms)
    return DnfFormula(n=n, outputs=outputs)


def eval_dnf(dnf: DnfFormula, assignment: dict[str, int]) -> str:
    bits = []
    for terms in dnf.outputs:
        hit = any(all(assignment[w] == b for w, b in term) for term in terms)
        bits.append("1" if hit else "0")
    return "".join(bits)


def f_table(n: int) -> np.ndarray:
    """f over all 2^(2^n - 1) assignments, assignments packed heap-order
    (prefix w at bit position counted from the most significant)."""
    bits = (1 << n) - 1
    r = np.arange(1 << bits, dtype=np.int64)
    y = np.zeros_like(r)
    for level in range(n):
        heap = ((1 << level) - 1) + y
        b = (r >> (bits - 1 - heap)) & 1
        y = (y << 1) | b
    return y


# ---------------------------------------------------------------------------
# constant-layer-count builder


def _heap_prefixes(n: int) -> list[str]:
    out = [""]
    for level in range(1, n):
        out.extend(format(v, f"0{level}b") for v in range(1 << level))
    return out


def _zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    det = np.linalg.det(u)
    alpha = float(np.angle(det) / 2)
    v = u * np.exp(-1j * alpha)
    a, b = v[0, 0], v[1, 0]
    gamma = float(2 * np.arctan2(abs(b), abs(a)))
    s = float(-np.angle(a)) if abs(a) > 1e-12 else 0.0
    r = float(np.angle(b)) if abs(b) > 1e-12 else 0.0
    return alpha, s + r, gamma, s - r


def _rz(t: float) -> np.ndarray:
    return np.diag([np.exp(-1j * t / 2), np.exp(1j * t / 2)]).astype(np.complex128)


def _ry(t: float) -> np.ndarray:
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def controlled_1q_pieces(u: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(A, B, C, P) with ABC = I and P x (A X B X C) = controlled-u.

    Gadget order on the target: C, CNOT, B, CNOT, A; P is the phase on the
    control qubit.
    """
    alpha, beta, gamma, delta = _zyz(u)
    a = _rz(beta) @ _ry(gamma / 2)
    b = _ry(-gamma / 2) @ _rz(-(delta + beta) / 2)
    c = _rz((delta - beta) / 2)
    p = np.diag([1.0, np.exp(1j * alpha)]).astype(np.complex128)
    return a, b, c, p


class TreeLayout:
    """Qubit assignment for the tree-preparation circuit."""

    def __init__(self, n: int):
        self.n = n
        self.prefixes = _heap_prefixes(n)
        self.reg = {w: i for i, w in enumerate(self.prefixes)}
        self.s_start = len(self.prefixes)
        self.next_free = self.s_start + n

    def s_qubit(self, j: int) -> int:
        """Output bit j, 1-indexed."""
        return self.s_start + j - 1

    def take(self, count: int) -> list[int]:
        block = list(range(self.next_free, self.next_free + count))
        self.next_free += count
        return block


def _terms(n: int) -> list[tuple[int, str]]:
    out = []
    for j in range(1, n + 1):
        for tv in range(1 << j):
            t = format(tv, f"0{j}b")
            if t[-1] == "1":
                out.append((j, t))
    return out


def build_qacf0_state_circuit(psi: StateVector) -> CircuitIR:
    """Wide-gate state-preparation circuit with an n-independent layer count.

    On |0...0> the output register ends in the target state and every other
    qubit returns to |0>. Registers: 'tree' holds the per-prefix qubits,
    'output' the result, everything after is ancilla.
    """
    circuit, _ = _build_tree_circuit(amplitude_tree(psi))
    return circuit


def _build_tree_circuit(tree: AmplitudeTree) -> tuple[CircuitIR, TreeLayout]:
    n = tree.n
    if n == 1:
        layout = TreeLayout(1)
        circuit = CircuitIR(
            1, [[g.one_qubit(tree.phi_matrix(""), 0)]], register_map={"output": (0, 1)}
        )
        return circuit, layout

    layout = TreeLayout(n)
    terms = _terms(n)

    # literal instances: the first use of a prefix register controls on the
    # register itself, later simultaneous uses go through fanout copies
    uses: dict[str, int] = {}
    for _, t in terms:
        for i in range(len(t)):
            uses[t[:i]] = uses.get(t[:i], 0) + 1
    copy_block = {w: layout.take(c - 1) for w, c in uses.items() if c > 1}
    seen: dict[str, int] = {}
    instance: dict[tuple[int, str, int], int] = {}
    for j, t in terms:
        for i in range(j):
            w = t[:i]
            k = seen.get(w, 0)
            seen[w] = k + 1
            instance[(j, t, i)] = layout.reg[w] if k == 0 else copy_block[w][k - 1]

    term_anc = {(j, t): layout.take(1)[0] for j, t in terms}
    disj_anc = {j: layout.take(1)[0] for j in range(1, n + 1)}

    # output-register copies consumed by the uncompute stage: register x of
    # depth l needs output bits 1..l as its prefix condition and bit l+1 as
    # the value to erase
    s_copies = {j: layout.take((1 << n) - (1 << (j - 1))) for j in range(1, n + 1)}
    s_cursor = {j: 0 for j in range(1, n + 1)}

    def take_s_copy(j: int) -> int:
        q = s_copies[j][s_cursor[j]]
        s_cursor[j] += 1
        return q

    cond_copy: dict[tuple[str, int], int] = {}
    b_copy: dict[str, int] = {}
    for w in layout.prefixes:
        for i in range(1, len(w) + 1):
            cond_copy[(w, i)] = take_s_copy(i)
        b_copy[w] = take_s_copy(len(w) + 1)
    q_anc = {w: layout.take(1)[0] for w in layout.prefixes if w}

    deep = [w for w in layout.prefixes if w]  # registers with a prefix condition
    abc = {w: controlled_1q_pieces(tree.phi_matrix(w)) for w in deep}

    layers: list[list[g.Gate]] = []

    def layer(gates: list[g.Gate]) -> None:
        layers.append(gates)

    # stage 1: one-qubit preparations
    layer([g.one_qubit(tree.phi_matrix(w), layout.reg[w]) for w in layout.prefixes])

    # stage 2: XOR f onto the output register, then uncompute the garbage
    fan_literals = [
        g.fanout(layout.reg[w], tuple(copy_block[w])) for w in layout.prefixes if w in copy_block
    ]
    neg_literals = [
        g.one_qubit(g.X, instance[(j, t, i)])
        for j, t in terms
        for i in range(j)
        if t[i] == "0"
    ]
    term_toffolis = [
        g.toffoli(term_anc[(j, t)], tuple(instance[(j, t, i)] for i in range(j)))
        for j, t in terms
    ]
    x_on_terms = [g.one_qubit(g.X, term_anc[(j, t)]) for j, t in terms]
    disj_toffolis = [
        g.toffoli(disj_anc[j], tuple(term_anc[(jj, t)] for jj, t in terms if jj == j))
        for j in range(1, n + 1)
    ]
    x_on_disj = [g.one_qubit(g.X, disj_anc[j]) for j in range(1, n + 1)]
    xor_out = [g.toffoli(layout.s_qubit(j), (disj_anc[j],)) for j in range(1, n + 1)]

    layer(fan_literals)
    layer(neg_literals)
    layer(term_toffolis)
    layer(x_on_terms)
    layer(disj_toffolis)
    layer(x_on_terms + x_on_disj)
    layer(xor_out)
    layer(x_on_terms + x_on_disj)
    layer(disj_toffolis)
    layer(x_on_terms)
    layer(term_toffolis)
    layer(neg_literals)
    layer(fan_literals)

    # stage 3: erase the prefix qubits controlled on the output
    fan_s = [
        g.fanout(layout.s_qubit(j), tuple(s_copies[j])) for j in range(1, n + 1)
    ]
    cond_negs = [
        g.one_qubit(g.X, cond_copy[(w, i)])
        for w in deep
        for i in range(1, len(w) + 1)
        if w[i - 1] == "0"
    ]
    q_toffolis = [
        g.toffoli(q_anc[w], tuple(cond_copy[(w, i)] for i in range(1, len(w) + 1)))
        for w in deep
    ]

    layer(fan_s)
    layer([g.one_qubit(tree.phi_matrix(w).conj().T, layout.reg[w]) for w in deep])
    layer(cond_negs)
    layer(q_toffolis)
    layer([g.one_qubit(abc[w][2], layout.reg[w]) for w in deep])
    layer([g.toffoli(layout.reg[w], (q_anc[w],)) for w in deep])
    layer([g.one_qubit(abc[w][1], layout.reg[w]) for w in deep])
    layer([g.toffoli(layout.reg[w], (q_anc[w],)) for w in deep])
    layer(
        [g.one_qubit(abc[w][0], layout.reg[w]) for w in deep]
        + [g.one_qubit(abc[w][3], q_anc[w]) for w in deep]
    )
    layer(
        [g.toffoli(layout.reg[w], (q_anc[w], b_copy[w])) for w in deep]
        + [g.toffoli(layout.reg[""], (b_copy[""],))]
    )
    layer(q_toffolis)
    layer(cond_negs)
    layer(fan_s)

    circuit = CircuitIR(
        layout.next_free,
        layers,
        register_map={
            "tree": (0, len(layout.prefixes)),
            "output": (layout.s_start, n),
            "ancilla": (layout.s_start + n, layout.next_free - layout.s_start - n),
        },
    )
    return circuit, layout


def build_qnc_state_circuit(psi: StateVector) -> CircuitIR:
    """One/two-qubit form of the tree-preparation circuit (depth ~ n)."""
    return lower_to_qnc(build_qacf0_state_circuit(psi))


# ---------------------------------------------------------------------------
# register-level simulation (wide-gate machinery applied virtually)


def _apply_1q_flat(vec: np.ndarray, mat: np.ndarray, axis: int, axes: int) -> np.ndarray:
    shaped = vec.reshape(1 << axis, 2, -1)
    return np.einsum("ab,ibj->iaj", mat, shaped).reshape(vec.shape)


def simulate_tree_preparation(psi: StateVector) -> StateVector:
    """Simulate the preparation on the prefix registers plus output register
    only: the XOR machinery acts as its basis permutation and the erasure
    stage as the per-branch one-qubit maps it implements.

    Returns the joint (2^n - 1 + n)-qubit state; correct preparation leaves
    the prefix registers at |0> with the target state in the last n qubits.
    """
    n = psi.num_qubits
    if n == 1:
        return psi
    tree = amplitude_tree(psi)
    prefixes = _heap_prefixes(n)
    regs = len(prefixes)

    vec = np.ones(1, dtype=np.complex128)
    for w in prefixes:
        vec = np.kron(vec, tree.phi_matrix(w)[:, 0])
    s_part = np.zeros(1 << n, dtype=np.complex128)
    s_part[0] = 1.0
    vec = np.kron(vec, s_part)

    table = f_table(n)
    grid = vec.reshape(1 << regs, 1 << n)
    out = np.empty_like(grid)
    rows = np.arange(1 << regs)[:, None]
    out[rows, np.arange(1 << n)[None, :] ^ table[:, None]] = grid
    grid = out

    result = np.empty_like(grid)
    for t in range(1 << n):
        tbits = format(t, f"0{n}b")
        col = grid[:, t].copy()
        for axis, w in enumerate(prefixes):
            depth = len(w)
            if tbits[:depth] == w:
                if tbits[depth] == "1":
                    col = _apply_1q_flat(col, g.X, axis, regs)
            else:
                col = _apply_1q_flat(col, tree.phi_matrix(w).conj().T, axis, regs)
        result[:, t] = col
    return StateVector(regs + n, result.reshape(-1))


def tree_state_qubits(n: int) -> int:
    return 1 if n == 1 else (1 << n) - 1 + n


# ---------------------------------------------------------------------------
# classical bit-table oracle and the query-driven synthesis loop


@dataclass
class ClassicalBitOracle:
    """Fixed-point child amplitudes keyed by prefix.

    Address: '1' followed by the prefix bits (the leading 1 makes prefixes
    of different lengths distinct). Value: four fixed-point numbers (real
    and imaginary parts of beta_{x0} then beta_{x1}), each one sign bit
    plus ``precision_bits`` magnitude bits scaling [-1, 1].
    """

    n: int
    precision_bits: int
    entries: dict[str, str]

    def total_bits(self) -> int:
        return sum(len(v) for v in self.entries.values())


def _encode_real(value: float, b: int) -> str:
    scale = (1 << b) - 1
    q = int(round(min(1.0, abs(value)) * scale))
    return ("1" if value < 0 else "0") + format(q, f"0{b}b")


def _decode_real(bits: str) -> float:
    scale = (1 << (len(bits) - 1)) - 1
    mag = int(bits[1:], 2) / scale
    return -mag if bits[0] == "1" else mag


def oracle_address(prefix: str) -> str:
    return "1" + prefix


def beta_oracle(psi: StateVector, b: int) -> ClassicalBitOracle:
    """Encode every prefix's child amplitudes to b magnitude bits."""
    if b < 2:
        raise DimensionMismatch("need at least 2 precision bits")
    tree = amplitude_tree(psi)
    entries: dict[str, str] = {}
    for depth in range(psi.num_qubits):
        for v in range(1 << depth):
            prefix = format(v, f"0{depth}b") if depth else ""
            b0, b1 = tree.children(prefix)
            entries[oracle_address(prefix)] = (
                _encode_real(b0.real, b)
                + _encode_real(b0.imag, b)
                + _encode_real(b1.real, b)
                + _encode_real(b1.imag, b)
            )
    return ClassicalBitOracle(n=psi.num_qubits, precision_bits=b, entries=entries)


def decode_children(oracle: ClassicalBitOracle, prefix: str) -> tuple[complex, complex]:
    key = oracle_address(prefix)
    if key not in oracle.entries:
        raise MalformedOracle(f"no entry for prefix {prefix!r}")
    value = oracle.entries[key]
    width = oracle.precision_bits + 1
    if len(value) != 4 * width or set(value) - {"0", "1"}:
        raise MalformedOracle(f"corrupt value for prefix {prefix!r}")
    parts = [_decode_real(value[i * width : (i + 1) * width]) for i in range(4)]
    return complex(parts[0], parts[1]), complex(parts[2], parts[3])


def oracle_state_synth(n: int, oracle: ClassicalBitOracle) -> StateVector:
    """Level-by-level synthesis from the bit table.

    For k = 1..n, controlled on each (k-1)-bit prefix, query the child
    amplitudes, renormalize them, and rotate qubit k accordingly; the
    query registers are uncomputed by a second oracle call per level, so
    the loop costs two queries per level.
    """
    if oracle.n != n:
        raise MalformedOracle(f"oracle was built for n={oracle.n}, asked n={n}")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    for k in range(1, n + 1):
        view = amps.reshape(1 << (k - 1), 2, -1)
        for v in range(1 << (k - 1)):
            prefix = format(v, f"0{k - 1}b") if k > 1 else ""
            b0, b1 = decode_children(oracle, prefix)
            norm = math.hypot(abs(b0), abs(b1))
            if norm == 0.0:
                b0, b1 = 1.0 + 0j, 0.0 + 0j
            else:
                b0, b1 = b0 / norm, b1 / norm
            rot = np.array([[b0, -np.conj(b1)], [b1, np.conj(b0)]], dtype=np.complex128)
            view[v] = np.einsum("ab,bj->aj", rot, view[v])
    return StateVector(n, amps)


def oracle_synth_query_count(n: int) -> int:
    """One query plus one uncompute per level."""
    return 2 * n


def table_to_json(oracle: ClassicalBitOracle) -> dict:
    """Hex wire form. A sentinel 1 bit is prepended to each address so that
    leading zeros survive the integer round trip; values have a fixed bit
    width of 4*(precision_bits+1) and are zero-padded accordingly."""
    entries = {
        format(int("1" + addr, 2), "x"): format(int(value, 2), f"0{(len(value) + 3) // 4}x")
        for addr, value in oracle.entries.items()
    }
    return {"n": oracle.n, "precision_bits": oracle.precision_bits, "entries": entries}


def table_from_json(data: dict) -> ClassicalBitOracle:
    n = int(data["n"])
    b = int(data["precision_bits"])
    width = 4 * (b + 1)
    entries: dict[str, str] = {}
    for addr_hex, value_hex in data["entries"].items():
        addr = bin(int(addr_hex, 16))[3:]  # drop 0b and the sentinel bit
        entries[addr] = format(int(value_hex, 16), f"0{width}b")
    return ClassicalBitOracle(n=n, precision_bits=b, entries=entries)
