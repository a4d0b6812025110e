"""FastAPI front end: synthesis, simulation, verification, resources.

Every endpoint is a pure function of its request body (seeds default to
zero), so identical requests produce identical responses.
"""

from __future__ import annotations

import math

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

import qsynth
from qsynth.bindings import resolve_bindings
from qsynth.errors import QsynthError, TooManyQubits
from qsynth.grover import (
    GROVER_ORACLE_ID,
    MarkedReflectionOracle,
    build_exact_grover,
    build_reverse_grover,
    grover_params,
)
from qsynth.qram import QRAM_ORACLE_ID, functional_qram, implement_via_qram
from qsynth.service import schemas as s
from qsynth.simcore import (
    StateVector,
    apply_circuit,
    circuit_from_json,
    circuit_to_json,
    haar_random_unitary,
    implementation_distance,
    random_state,
    state_from_json,
    state_to_json,
    unitary_from_json,
)
from qsynth.simcore.lowering import lower_to_qnc
from qsynth.statesynth import (
    beta_oracle,
    build_qacf0_state_circuit,
    build_qnc_state_circuit,
    oracle_state_synth,
    oracle_synth_query_count,
    table_to_json,
)
from qsynth.unitsynth import (
    TreeQramAction,
    build_gate_level_qram,
    depth_pipeline_report,
    depth_synthesize,
    oracle_synthesize,
    teleport_synthesize,
)

app = FastAPI(title="qsynth", version=qsynth.__version__)


@app.exception_handler(QsynthError)
async def _domain_error(_request: Request, exc: QsynthError):
    return JSONResponse(status_code=400, content={"detail": f"{type(exc).__name__}: {exc}"})


def _to_circuit(model: s.CircuitModel):
    data = model.model_dump(exclude_none=True)
    return circuit_from_json(data), resolve_bindings(data.get("oracles"))


def _circuit_model(circuit, oracles: dict | None = None) -> s.CircuitModel:
    return s.CircuitModel(**circuit_to_json(circuit, oracles))


def _report_model(report) -> s.ResourceReportModel:
    return s.ResourceReportModel(**report.as_dict())


def _state_model(state: StateVector) -> s.StateModel:
    return s.StateModel(**state_to_json(state.num_qubits, state.amps))


def _to_state(model: s.StateModel) -> StateVector:
    n, amps = state_from_json(model.model_dump())
    return StateVector(n, amps)


def _maybe_distance(circuit, bindings, unitary) -> float | None:
    try:
        return float(implementation_distance(circuit, bindings, unitary))
    except TooManyQubits:
        return None


@app.get("/health", response_model=s.HealthResponse)
def health() -> s.HealthResponse:
    return s.HealthResponse(status="ok", version=qsynth.__version__)


@app.post("/grover", response_model=s.GroverResponse)
def grover(request: s.GroverRequest) -> s.GroverResponse:
    n = request.n
    oracle = MarkedReflectionOracle(n, request.marked)
    bindings = {GROVER_ORACLE_ID: oracle}
    if request.reverse:
        circuit = build_reverse_grover(n)
        start = StateVector.basis(n + 1, int(request.marked, 2) << 1)
        final, report = apply_circuit(start, circuit, bindings)
        fidelity = final.fidelity(StateVector.zero(n + 1))
    else:
        circuit = build_exact_grover(n)
        final, report = apply_circuit(StateVector.zero(n + 1), circuit, bindings)
        fidelity = final.fidelity(StateVector.basis(n + 1, int(request.marked, 2) << 1))
    return s.GroverResponse(
        found=final.most_likely_bits()[:n],
        queries=report.queries,
        fidelity=float(fidelity),
    )


@app.post("/synthesize-state", response_model=s.StateSynthResponse)
def synthesize_state(request: s.StateSynthRequest) -> s.StateSynthResponse:
    psi = _to_state(request.state)
    if request.method == "oracle":
        table = beta_oracle(psi, request.precision_bits)
        produced = oracle_state_synth(psi.num_qubits, table)
        distance = math.sqrt(max(0.0, 1.0 - produced.fidelity(psi)))
        return s.StateSynthResponse(
            method=request.method,
            oracle_table=s.OracleTableModel(**table_to_json(table)),
            trace_distance=distance,
            queries=oracle_synth_query_count(psi.num_qubits),
        )
    if request.method == "qacf0":
        circuit = build_qacf0_state_circuit(psi)
    else:
        circuit = build_qnc_state_circuit(psi)
    return s.StateSynthResponse(
        method=request.method,
        circuit=_circuit_model(circuit),
        report=_report_model(circuit.report()),
    )


@app.post("/synthesize-unitary", response_model=s.UnitarySynthResponse)
def synthesize_unitary(request: s.UnitarySynthRequest) -> s.UnitarySynthResponse:
    unitary = unitary_from_json(request.unitary)
    n = int(unitary.shape[0]).bit_length() - 1

    if request.method == "teleport":
        psi = _to_state(request.input_state) if request.input_state else StateVector.zero(n)
        trace = teleport_synthesize(unitary, psi, seed=request.seed)
        expected = unitary @ psi.amps
        fidelity = float(abs(np.vdot(trace.final_state.amps, expected)) ** 2)
        return s.UnitarySynthResponse(
            method=request.method,
            trace=s.TeleportTraceModel(
                rounds=trace.rounds,
                corrections=trace.corrections,
                fidelity=fidelity,
                final_state=_state_model(trace.final_state),
            ),
        )

    if request.method == "oracle":
        result = oracle_synthesize(unitary, request.precision_bits)
        oracle = result.bindings[QRAM_ORACLE_ID]
        return s.UnitarySynthResponse(
            method=request.method,
            circuit=_circuit_model(result.circuit, {QRAM_ORACLE_ID: oracle.spec()}),
            report=_report_model(result.circuit.report()),
            distance=result.achieved_distance,
            classical_queries=result.classical_queries,
            oracle_table=s.OracleTableModel(**table_to_json(result.table)),
        )

    if request.method == "depth":
        result = depth_synthesize(unitary)
        return s.UnitarySynthResponse(
            method=request.method,
            circuit=_circuit_model(result.circuit, {QRAM_ORACLE_ID: result.loader.spec()}),
            report=_report_model(result.circuit.report()),
            expanded=result.expanded,
            distance=_maybe_distance(result.circuit, result.bindings, unitary),
        )

    # qram-grover
    if request.qram == "functional":
        oracle = functional_qram(unitary)
        circuit = implement_via_qram(oracle)
    else:
        oracle = build_gate_level_qram(unitary)
        circuit = implement_via_qram(oracle, check=n <= TreeQramAction.MAX_N)
    return s.UnitarySynthResponse(
        method=request.method,
        circuit=_circuit_model(circuit, {QRAM_ORACLE_ID: oracle.spec()}),
        report=_report_model(circuit.report()),
        distance=_maybe_distance(circuit, {QRAM_ORACLE_ID: oracle}, unitary),
    )


@app.post("/simulate", response_model=s.SimulateResponse)
def simulate(request: s.SimulateRequest) -> s.SimulateResponse:
    circuit, bindings = _to_circuit(request.circuit)
    state = _to_state(request.state) if request.state else StateVector.zero(circuit.num_qubits)
    final, report = apply_circuit(state, circuit, bindings)
    return s.SimulateResponse(state=_state_model(final), report=_report_model(report))


@app.post("/verify", response_model=s.VerifyResponse)
def verify(request: s.VerifyRequest) -> s.VerifyResponse:
    circuit, bindings = _to_circuit(request.circuit)
    unitary = unitary_from_json(request.unitary)
    distance = float(implementation_distance(circuit, bindings, unitary))
    return s.VerifyResponse(ok=distance <= request.tol, distance=distance, tol=request.tol)


@app.post("/stats", response_model=s.StatsResponse)
def stats(request: s.StatsRequest) -> s.StatsResponse:
    circuit, _ = _to_circuit(request.circuit)
    return s.StatsResponse(report=_report_model(circuit.report()))


_BENCH_METHODS = ("grover", "qram-grover", "depth", "state-qacf0", "state-qnc", "oracle")


def _bench_row(method: str, n: int) -> s.BenchRow:
    rng = np.random.default_rng(1000 + n)
    if method == "grover":
        report = build_exact_grover(n).report()
        return s.BenchRow(n=n, method=method, depth=report.depth, size=report.size,
                          ancillae=report.ancillae, queries=report.queries)
    if method == "qram-grover":
        if n > 5:
            raise TooManyQubits("functional oracles are dense; capped at n = 5 in bench")
        unitary = haar_random_unitary(1 << n, rng)
        oracle = functional_qram(unitary)
        circuit = implement_via_qram(oracle)
        report = circuit.report()
        distance = (
            _maybe_distance(circuit, {QRAM_ORACLE_ID: oracle}, unitary) if n <= 3 else None
        )
        return s.BenchRow(n=n, method=method, depth=report.depth, size=report.size,
                          ancillae=report.ancillae, queries=report.queries, distance=distance)
    if method == "depth":
        report = depth_pipeline_report(n)
        distance = None
        if n <= TreeQramAction.MAX_N:
            unitary = haar_random_unitary(1 << n, rng)
            result = depth_synthesize(unitary)
            distance = _maybe_distance(result.circuit, result.bindings, unitary)
        return s.BenchRow(n=n, method=method, depth=report["depth"], size=report["size"],
                          ancillae=report["ancillae"], queries=report["loader_calls"],
                          distance=distance)
    if method in ("state-qacf0", "state-qnc"):
        circuit = build_qacf0_state_circuit(random_state(n, rng))
        if method == "state-qnc":
            circuit = lower_to_qnc(circuit)
        report = circuit.report()
        return s.BenchRow(n=n, method=method, depth=report.depth, size=report.size,
                          ancillae=report.ancillae, queries=0)
    if method == "oracle":
        if n > 4:
            raise TooManyQubits("bit-table loaders are dense; capped at n = 4 in bench")
        unitary = haar_random_unitary(1 << n, rng)
        result = oracle_synthesize(unitary, 16)
        report = result.circuit.report()
        return s.BenchRow(n=n, method=method, depth=report.depth, size=report.size,
                          ancillae=report.ancillae, queries=result.classical_queries,
                          distance=result.achieved_distance)
    raise QsynthError(f"unknown bench method {method!r}; choose from {_BENCH_METHODS}")


@app.post("/bench", response_model=s.BenchResponse)
def bench(request: s.BenchRequest) -> s.BenchResponse:
    rows = [
        _bench_row(method, n)
        for method in request.methods
        for n in range(request.n_min, request.n_max + 1)
    ]
    return s.BenchResponse(rows=rows)
