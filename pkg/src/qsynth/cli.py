"""Command-line client for the synthesis service.

Every subcommand builds a request, posts it to the service (in-process by
default, or a remote base URL via --server), and prints the JSON response
on stdout. Diagnostics go to stderr. Exit codes: 0 success, 1 verification
failure, 2 malformed input or request error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import httpx

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_BAD_INPUT = 2


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from starlette.testclient import TestClient

    from qsynth.service.app import app

    return TestClient(app, base_url="http://qsynth.internal")


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SystemExit(_fail(f"cannot read {path}: {exc}"))


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_BAD_INPUT


def _emit(payload, pretty: bool) -> None:
    if pretty:
        print(json.dumps(payload, indent=2))
    else:
        print(json.dumps(payload, separators=(",", ":")))


def _post(args, path: str, body: dict) -> tuple[int, dict | None]:
    try:
        with _client(args.server) as client:
            response = client.post(path, json=body)
    except httpx.HTTPError as exc:
        return _fail(f"request failed: {exc}"), None
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        return _fail(f"error {response.status_code}: {detail}"), None
    return EXIT_OK, response.json()


def _cmd_grover(args) -> int:
    code, payload = _post(
        args, "/grover", {"n": args.n, "marked": args.marked, "reverse": args.reverse}
    )
    if payload is not None:
        _emit(payload, args.pretty)
    return code


def _cmd_synthesize_state(args) -> int:
    body = {
        "state": _load_json(args.state),
        "method": args.method,
        "precision_bits": args.precision_bits,
    }
    code, payload = _post(args, "/synthesize-state", body)
    if payload is not None:
        _emit(payload, args.pretty)
    return code


def _cmd_synthesize_unitary(args) -> int:
    body = {
        "unitary": _load_json(args.unitary),
        "method": args.method,
        "precision_bits": args.precision_bits,
        "seed": args.seed,
        "qram": args.qram,
    }
    if args.input:
        body["input_state"] = _load_json(args.input)
    code, payload = _post(args, "/synthesize-unitary", body)
    if payload is not None:
        _emit(payload, args.pretty)
    return code


def _cmd_simulate(args) -> int:
    body = {"circuit": _load_json(args.circuit)}
    if args.state:
        body["state"] = _load_json(args.state)
    code, payload = _post(args, "/simulate", body)
    if payload is not None:
        _emit(payload, args.pretty)
    return code


def _cmd_verify(args) -> int:
    body = {
        "circuit": _load_json(args.circuit),
        "unitary": _load_json(args.unitary),
        "tol": args.tol,
    }
    code, payload = _post(args, "/verify", body)
    if payload is None:
        return code
    _emit(payload, args.pretty)
    return EXIT_OK if payload["ok"] else EXIT_VERIFY_FAILED


def _cmd_stats(args) -> int:
    code, payload = _post(args, "/stats", {"circuit": _load_json(args.circuit)})
    if payload is not None:
        _emit(payload, args.pretty)
    return code


def _cmd_bench(args) -> int:
    methods = [m for m in (args.methods or "").split(",") if m]
    body = {"methods": methods, "n_min": args.n_min, "n_max": args.n_max}
    code, payload = _post(args, "/bench", body)
    if payload is None:
        return code
    if args.pretty:
        _print_bench_table(payload["rows"])
    else:
        _emit(payload, False)
    return EXIT_OK


def _print_bench_table(rows: list[dict]) -> None:
    headers = ["n", "method", "depth", "size", "ancillae", "queries", "distance"]
    cells = [
        [
            str(row["n"]),
            row["method"],
            str(row["depth"]),
            str(row["size"]),
            str(row["ancillae"]),
            str(row["queries"]),
            "-" if row.get("distance") is None else f"{row['distance']:.3e}",
        ]
        for row in rows
    ]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    print("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in cells:
        print("  ".join(c.ljust(w) for c, w in zip(row, widths)))


def _cmd_serve(args) -> int:
    import uvicorn

    from qsynth.service.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsynth",
        description="Circuit synthesis toolkit: exact search, oracle-driven "
        "unitary implementation, low-depth state preparation.",
    )
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    parser.add_argument("--pretty", action="store_true", help="human-readable output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("grover", help="run the zero-error search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--marked", required=True)
    p.add_argument("--reverse", action="store_true")
    p.set_defaults(func=_cmd_grover)

    p = sub.add_parser("synthesize-state", help="build a state-preparation circuit or table")
    p.add_argument("--state", required=True, help="state JSON file")
    p.add_argument("--method", choices=["qacf0", "qnc", "oracle"], required=True)
    p.add_argument("--precision-bits", type=int, default=16)
    p.set_defaults(func=_cmd_synthesize_state)

    p = sub.add_parser("synthesize-unitary", help="build an implementation of a unitary")
    p.add_argument("--unitary", required=True, help="unitary JSON file")
    p.add_argument(
        "--method", choices=["oracle", "depth", "teleport", "qram-grover"], required=True
    )
    p.add_argument("--precision-bits", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--input", help="input state JSON file (teleport method)")
    p.add_argument("--qram", choices=["functional", "circuit"], default="functional")
    p.set_defaults(func=_cmd_synthesize_unitary)

    p = sub.add_parser("simulate", help="apply a circuit to a state")
    p.add_argument("--circuit", required=True)
    p.add_argument("--state")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("verify", help="check a circuit implements a unitary within tolerance")
    p.add_argument("--circuit", required=True)
    p.add_argument("--unitary", required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("stats", help="resource report of a circuit")
    p.add_argument("--circuit", required=True)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("bench", help="resource table across methods and sizes")
    p.add_argument("--methods", default="", help="comma-separated method list")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.set_defaults(func=_cmd_bench)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8042)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_BAD_INPUT
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
