"""Request and response models for the synthesis service.

The circuit, state, unitary and oracle-table payloads follow the package's
wire formats (see README); responses carry a top-level format version.
"""

from __future__ import annotations

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

FORMAT_VERSION = 1

Unitary = list  # row-major nested arrays of [re, im]


class GateModel(BaseModel):
    kind: str
    targets: list[int]
    matrix: Optional[list[list[float]]] = None
    basis_state: Optional[str] = None
    direction: Optional[str] = None
    oracle_id: Optional[str] = None


class CircuitModel(BaseModel):
    format: int = FORMAT_VERSION
    num_qubits: int
    gate_class: str
    registers: dict[str, list[int]] = Field(default_factory=dict)
    layers: list[list[GateModel]]
    oracles: Optional[dict[str, Any]] = None


class StateModel(BaseModel):
    num_qubits: int
    amps: list[list[float]]


class ResourceReportModel(BaseModel):
    depth: int
    size: int
    ancillae: int
    forward_queries: int
    backward_queries: int


class OracleTableModel(BaseModel):
    n: int
    precision_bits: int
    entries: dict[str, str]


class HealthResponse(BaseModel):
    status: str
    version: str


class GroverRequest(BaseModel):
    n: int = Field(ge=1, le=16)
    marked: str
    reverse: bool = False


class GroverResponse(BaseModel):
    format: int = FORMAT_VERSION
    found: str
    queries: int
    fidelity: float


class StateSynthRequest(BaseModel):
    state: StateModel
    method: Literal["qacf0", "qnc", "oracle"]
    precision_bits: int = 16


class StateSynthResponse(BaseModel):
    format: int = FORMAT_VERSION
    method: str
    circuit: Optional[CircuitModel] = None
    report: Optional[ResourceReportModel] = None
    oracle_table: Optional[OracleTableModel] = None
    trace_distance: Optional[float] = None
    queries: Optional[int] = None


class UnitarySynthRequest(BaseModel):
    unitary: Unitary
    method: Literal["oracle", "depth", "teleport", "qram-grover"]
    precision_bits: int = 20
    seed: int = 0
    input_state: Optional[StateModel] = None
    qram: Literal["functional", "circuit"] = "functional"


class TeleportTraceModel(BaseModel):
    rounds: int
    corrections: list[str]
    fidelity: float
    final_state: StateModel


class UnitarySynthResponse(BaseModel):
    format: int = FORMAT_VERSION
    method: str
    circuit: Optional[CircuitModel] = None
    report: Optional[ResourceReportModel] = None
    expanded: Optional[dict[str, int]] = None
    distance: Optional[float] = None
    classical_queries: Optional[int] = None
    oracle_table: Optional[OracleTableModel] = None
    trace: Optional[TeleportTraceModel] = None


class SimulateRequest(BaseModel):
    circuit: CircuitModel
    state: Optional[StateModel] = None


class SimulateResponse(BaseModel):
    format: int = FORMAT_VERSION
    state: StateModel
    report: ResourceReportModel


class VerifyRequest(BaseModel):
    circuit: CircuitModel
    unitary: Unitary
    tol: float = 1e-9


class VerifyResponse(BaseModel):
    format: int = FORMAT_VERSION
    ok: bool
    distance: float
    tol: float


class StatsRequest(BaseModel):
    circuit: CircuitModel


class StatsResponse(BaseModel):
    format: int = FORMAT_VERSION
    report: ResourceReportModel


class BenchRequest(BaseModel):
    methods: list[str] = Field(default_factory=list)
    n_min: int = Field(default=1, ge=1)
    n_max: int = Field(default=4, ge=1, le=10)


class BenchRow(BaseModel):
    n: int
    method: str
    depth: int
    size: int
    ancillae: int
    queries: int
    distance: Optional[float] = None


class BenchResponse(BaseModel):
    format: int = FORMAT_VERSION
    rows: list[BenchRow]
