"""Layered circuit intermediate representation with resource accounting."""

from __future__ import annotations

from dataclasses import dataclass

from qsynth.errors import DimensionMismatch, LayerConflict, TargetOutOfRange
from qsynth.simcore import gates as g

QNC = "QNC"
QACF0 = "QACf0"
ORACLE = "ORACLE"

_QNC_KINDS = {g.ONE_QUBIT, g.TWO_QUBIT, g.ORACLE_CALL}


@dataclass(frozen=True)
class ResourceReport:
    depth: int
    size: int
    ancillae: int
    forward_queries: int
    backward_queries: int

    def __post_init__(self):
        for name in ("depth", "size", "ancillae", "forward_queries", "backward_queries"):
            if getattr(self, name) < 0:
                raise DimensionMismatch(f"negative {name} in resource report")

    @property
    def queries(self) -> int:
        return self.forward_queries + self.backward_queries

    def as_dict(self) -> dict:
        return {
            "depth": self.depth,
            "size": self.size,
            "ancillae": self.ancillae,
            "forward_queries": self.forward_queries,
            "backward_queries": self.backward_queries,
        }


class CircuitIR:
    """Immutable layered gate list over a fixed qubit count.

    ``register_map`` names contiguous qubit ranges as (start, length) pairs.
    Ranges may alias (e.g. input and output on the same qubits). Qubits in
    no named register count as ancillae, as do registers named 'ancilla'.
    """

    __slots__ = ("num_qubits", "layers", "register_map", "gate_class")

    def __init__(
        self,
        num_qubits: int,
        layers: list[list[g.Gate]],
        register_map: dict[str, tuple[int, int]] | None = None,
        gate_class: str | None = None,
    ):
        if num_qubits < 1:
            raise DimensionMismatch("circuit needs at least one qubit")
        layers = [list(layer) for layer in layers if layer]
        for layer in layers:
            seen: set[int] = set()
            for gate in layer:
                for t in gate.targets:
                    if not 0 <= t < num_qubits:
                        raise TargetOutOfRange(f"target {t} outside [0, {num_qubits})")
                    if t in seen:
                        raise LayerConflict(f"qubit {t} used twice in one layer")
                    seen.add(t)
        register_map = dict(register_map or {})
        for name, (start, length) in register_map.items():
            if length < 0 or start < 0 or start + length > num_qubits:
                raise TargetOutOfRange(f"register {name!r} range {(start, length)} out of bounds")
        if gate_class is None:
            gate_class = infer_gate_class(layers)
        if gate_class not in (QNC, QACF0, ORACLE):
            raise DimensionMismatch(f"unknown gate class {gate_class!r}")
        if gate_class == QNC:
            for layer in layers:
                for gate in layer:
                    if gate.kind not in _QNC_KINDS:
                        raise DimensionMismatch(
                            f"QNC circuits admit only one/two-qubit gates and oracle calls, got {gate.kind}"
                        )
        self.num_qubits = num_qubits
        self.layers = tuple(tuple(layer) for layer in layers)
        self.register_map = register_map
        self.gate_class = gate_class

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def size(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def gates(self):
        for layer in self.layers:
            yield from layer

    def query_counts(self) -> tuple[int, int]:
        fwd = sum(1 for gate in self.gates() if gate.kind == g.ORACLE_CALL and gate.direction == g.FORWARD)
        bwd = sum(1 for gate in self.gates() if gate.kind == g.ORACLE_CALL and gate.direction == g.BACKWARD)
        return fwd, bwd

    def ancilla_count(self) -> int:
        """Qubits outside the union of the 'input' and 'output' registers."""
        marked: set[int] = set()
        for name in ("input", "output"):
            if name in self.register_map:
                start, length = self.register_map[name]
                marked.update(range(start, start + length))
        return self.num_qubits - len(marked)

    def report(self) -> ResourceReport:
        fwd, bwd = self.query_counts()
        rep = ResourceReport(self.depth, self.size, self.ancilla_count(), fwd, bwd)
        assert rep.size <= rep.depth * self.num_qubits
        return rep

    def inverse(self) -> "CircuitIR":
        """Layers reversed and every gate replaced by its adjoint."""
        inv_layers = [[gate.adjoint() for gate in layer] for layer in reversed(self.layers)]
        return CircuitIR(self.num_qubits, inv_layers, self.register_map, self.gate_class)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CircuitIR):
            return NotImplemented
        return (
            self.num_qubits == other.num_qubits
            and self.gate_class == other.gate_class
            and self.register_map == other.register_map
            and len(self.layers) == len(other.layers)
            and all(
                len(a) == len(b) and all(x == y for x, y in zip(a, b))
                for a, b in zip(self.layers, other.layers)
            )
        )

    def __repr__(self) -> str:
        return (
            f"CircuitIR(num_qubits={self.num_qubits}, depth={self.depth}, "
            f"size={self.size}, gate_class={self.gate_class!r})"
        )


def infer_gate_class(layers) -> str:
    has_oracle = False
    has_wide = False
    for layer in layers:
        for gate in layer:
            if gate.kind == g.ORACLE_CALL:
                has_oracle = True
            elif gate.kind not in (g.ONE_QUBIT, g.TWO_QUBIT):
                has_wide = True
    if has_oracle:
        return ORACLE if has_wide else QNC
    return QACF0 if has_wide else QNC
