"""Lowering of wide gates to one- and two-qubit form.

Fanout uses a balanced CNOT copy tree, generalized Toffoli an AND tree of
three-qubit Toffolis, each inlined through the standard five-gate
controlled-sqrt(X) network. Basis reflections become X-conjugated
multi-controlled Z via the same AND tree. Tree ancillae come from a pool
appended after the original qubits; the pool is sized for the busiest
layer and reused across layers, and every gadget restores its ancillae
to |0>.
"""

from __future__ import annotations

import math

import numpy as np

from qsynth.simcore import gates as g
from qsynth.simcore.circuit import CircuitIR


def _ccx_layers(c1: int, c2: int, target: int) -> list[list[g.Gate]]:
    """Toffoli on (target; c1, c2) as five two-qubit gates."""
    v, vdg = g.SQRT_X, g.SQRT_X.conj().T
    return [
        [g.two_qubit(g.controlled(v), c1, target)],
        [g.cnot(c1, c2)],
        [g.two_qubit(g.controlled(vdg), c2, target)],
        [g.cnot(c1, c2)],
        [g.two_qubit(g.controlled(v), c2, target)],
    ]


def _and_tree(wires: list[int], pool: list[int]) -> tuple[list[list[g.Gate]], int, int]:
    """AND of ``wires`` into one output wire.

    Returns (layers, output_wire, ancillae_used). Layer lists from parallel
    nodes at one tree level are merged; ``pool`` supplies fresh ancillae.
    """
    layers: list[list[g.Gate]] = []
    used = 0
    level = list(wires)
    while len(level) > 1:
        nxt: list[int] = []
        node_gadgets: list[list[list[g.Gate]]] = []
        for i in range(0, len(level) - 1, 2):
            anc = pool[used]
            used += 1
            node_gadgets.append(_ccx_layers(level[i], level[i + 1], anc))
            nxt.append(anc)
        if len(level) % 2:
            nxt.append(level[-1])
        for step in range(5):
            layers.append([gate for gadget in node_gadgets for gate in gadget[step]])
        level = nxt
    return layers, level[0], used


def _lower_toffoli(gate: g.Gate, pool: list[int]) -> tuple[list[list[g.Gate]], int]:
    target, controls = gate.targets[0], list(gate.targets[1:])
    if len(controls) == 1:
        return [[g.cnot(controls[0], target)]], 0
    if len(controls) == 2:
        return _ccx_layers(controls[0], controls[1], target), 0
    tree, top, used = _and_tree(controls, pool)
    untree = [list(layer) for layer in reversed(tree)]
    return tree + [[g.cnot(top, target)]] + untree, used


def _lower_fanout(gate: g.Gate, pool: list[int]) -> tuple[list[list[g.Gate]], int]:
    control, targets = gate.targets[0], list(gate.targets[1:])
    if len(targets) == 1:
        return [[g.cnot(control, targets[0])]], 0
    copies = [pool[i] for i in range(len(targets))]
    # Balanced doubling: every qubit already holding the control bit seeds
    # one fresh copy per layer.
    copy_layers: list[list[g.Gate]] = []
    holders = [control]
    remaining = list(copies)
    while remaining:
        layer = []
        for h in list(holders):
            if not remaining:
                break
            c = remaining.pop(0)
            layer.append(g.cnot(h, c))
            holders.append(c)
        copy_layers.append(layer)
    apply_layer = [g.cnot(c, t) for c, t in zip(copies, targets)]
    uncopy = [list(layer) for layer in reversed(copy_layers)]
    return copy_layers + [apply_layer] + uncopy, len(copies)


def _lower_reflection(gate: g.Gate, pool: list[int]) -> tuple[list[list[g.Gate]], int]:
    bits, targets = gate.basis_state, gate.targets
    if len(targets) == 1:
        mat = np.diag([(-1.0 + 0j) if str(b) == bits else (1.0 + 0j) for b in "01"])
        return [[g.one_qubit(mat, targets[0])]], 0
    if len(targets) == 2:
        mat = np.eye(4, dtype=np.complex128)
        mat[int(bits, 2), int(bits, 2)] = -1.0
        return [[g.two_qubit(mat, targets[0], targets[1])]], 0
    flips = [g.one_qubit(g.X, q) for q, b in zip(targets, bits) if b == "0"]
    tree, top, used = _and_tree(list(targets), pool)
    untree = [list(layer) for layer in reversed(tree)]
    layers = tree + [[g.one_qubit(g.Z, top)]] + untree
    if flips:
        layers = [list(flips)] + layers + [list(flips)]
    return layers, used


def _ancilla_need(gate: g.Gate) -> int:
    k = gate.arity
    if gate.kind == g.TOFFOLI and k >= 4:
        return k - 2
    if gate.kind == g.FANOUT and k >= 3:
        return k - 1
    if gate.kind == g.BASIS_REFLECTION and k >= 3:
        return k - 1
    return 0


def lower_to_qnc(circuit: CircuitIR) -> CircuitIR:
    """Replace every wide gate by an equivalent one/two-qubit sub-circuit.

    The action on the original qubits is unchanged; pool ancillae start and
    end at |0>. Oracle calls pass through untouched.
    """
    pool_size = max(
        (sum(_ancilla_need(gate) for gate in layer) for layer in circuit.layers),
        default=0,
    )
    total = circuit.num_qubits + pool_size
    out_layers: list[list[g.Gate]] = []
    for layer in circuit.layers:
        cursor = circuit.num_qubits
        expansions: list[list[list[g.Gate]]] = []
        for gate in layer:
            need = _ancilla_need(gate)
            pool = list(range(cursor, cursor + need))
            cursor += need
            if gate.kind == g.TOFFOLI:
                sub, _ = _lower_toffoli(gate, pool)
            elif gate.kind == g.FANOUT:
                sub, _ = _lower_fanout(gate, pool)
            elif gate.kind == g.BASIS_REFLECTION:
                sub, _ = _lower_reflection(gate, pool)
            else:
                sub = [[gate]]
            expansions.append(sub)
        depth = max(len(sub) for sub in expansions)
        for step in range(depth):
            merged = [gate for sub in expansions if step < len(sub) for gate in sub[step]]
            out_layers.append(merged)
    registers = dict(circuit.register_map)
    if pool_size:
        registers["lowering_pool"] = (circuit.num_qubits, pool_size)
    return CircuitIR(total, out_layers, registers)


def lowered_depth_of_gate(kind: str, arity: int, basis_state: str | None = None) -> int:
    """Depth the lowering pass emits for one gate; mirrors lower_to_qnc."""
    if kind == g.TOFFOLI:
        if arity == 2:
            return 1
        if arity == 3:
            return 5
        return 10 * math.ceil(math.log2(arity - 1)) + 1
    if kind == g.FANOUT:
        if arity == 2:
            return 1
        return 2 * math.ceil(math.log2(arity)) + 1
    if kind == g.BASIS_REFLECTION:
        if arity <= 2:
            return 1
        depth = 10 * math.ceil(math.log2(arity)) + 1
        if basis_state is not None and "0" in basis_state:
            depth += 2
        return depth
    return 1


def lowered_size_of_gate(kind: str, arity: int, basis_state: str | None = None) -> int:
    """Gate count the lowering pass emits for one gate."""
    if kind == g.TOFFOLI:
        if arity == 2:
            return 1
        if arity == 3:
            return 5
        return 10 * (arity - 2) + 1
    if kind == g.FANOUT:
        if arity == 2:
            return 1
        return 3 * (arity - 1)
    if kind == g.BASIS_REFLECTION:
        if arity <= 2:
            return 1
        zeros = basis_state.count("0") if basis_state else 0
        return 10 * (arity - 1) + 1 + 2 * zeros
    return 1


def lowered_ancillae_of_gate(kind: str, arity: int) -> int:
    if kind == g.TOFFOLI:
        return max(0, arity - 2) if arity >= 4 else 0
    if kind == g.FANOUT:
        return arity - 1 if arity >= 3 else 0
    if kind == g.BASIS_REFLECTION:
        return arity - 1 if arity >= 3 else 0
    return 0
