"""Thin command-line client for the index service.

Every subcommand builds the same pydantic request the HTTP endpoint takes
and dispatches it, in process by default or to a running server when
``--server URL`` is given.  Reports are printed as JSON with deterministic
field order.  Exit codes: 0 success, 1 usage error, 2 mathematical error
(with a machine-readable {error, detail} payload on stdout).
"""

from __future__ import annotations

import argparse
import json
import sys

import httpx

from . import service
from .errors import QidxMathError, QidxUsageError
from .schemas import (
    DecomposeRequest,
    DemosRequest,
    FredholmRequest,
    Index2DRequest,
    IndexNDRequest,
    MatIndexRequest,
    MatrixIn,
    OracleRequest,
    SymbolIn,
    TensorVerifyRequest,
    ThetaIn,
    TraceVerifyRequest,
    WindRequest,
)

_COMMANDS = {
    "wind": ("/wind", service.do_wind),
    "index2d": ("/index2d", service.do_index2d),
    "indexnd": ("/indexnd", service.do_indexnd),
    "decompose": ("/decompose", service.do_decompose),
    "fredholm": ("/fredholm", service.do_fredholm),
    "matindex": ("/matindex", service.do_matindex),
    "oracle": ("/oracle", service.do_oracle),
    "trace-verify": ("/trace-verify", service.do_trace_verify),
    "tensor-verify": ("/tensor-verify", service.do_tensor_verify),
    "demos": ("/demos", service.do_demos),
}


def emit_report(report: dict, path: str | None = None):
    """Write the JSON report to ``path``, or stdout when no path is given."""
    text = json.dumps(report, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--out", help="write the JSON report to this path")
    p.add_argument("--format", default="json", help="output format (json)")
    p.add_argument("--server", help="dispatch to a running service at this URL")


def _add_symbol(p: argparse.ArgumentParser):
    p.add_argument("expr", nargs="?", help="symbol expression, e.g. 'z1^2*z2^-3'")
    p.add_argument("--file", help="symbol JSON file ({dim, terms}) instead of an expression")


def _add_theta(p: argparse.ArgumentParser):
    p.add_argument("--theta", help="weights: names (sqrt2, golden) or decimals, comma separated")
    p.add_argument(
        "--assert-irrational",
        action="store_true",
        help="treat decimal weights as rationally independent",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qidx")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("wind", help="winding number of a 1-D symbol")
    _add_symbol(p)
    _add_common(p)

    p = sub.add_parser("index2d", help="weighted index on the 2-torus")
    _add_symbol(p)
    _add_theta(p)
    p.add_argument("--grid", help="decomposition grid, e.g. 256 or 256,256")
    _add_common(p)

    p = sub.add_parser("indexnd", help="weighted index on the N-torus")
    _add_symbol(p)
    _add_theta(p)
    p.add_argument("--dim", type=int, help="force the torus dimension")
    _add_common(p)

    p = sub.add_parser("decompose", help="monomial exponents and log grid")
    _add_symbol(p)
    p.add_argument("--grid", help="grid size, e.g. 256 or 256,256")
    _add_common(p)

    p = sub.add_parser("fredholm", help="non-vanishing test on the 2-torus")
    _add_symbol(p)
    _add_common(p)

    p = sub.add_parser("matindex", help="index of a matrix symbol (via det)")
    p.add_argument("--file", required=True, help="matrix JSON file {entries: [[...]]}")
    _add_theta(p)
    _add_common(p)

    p = sub.add_parser("oracle", help="kernel/cokernel of a finite section")
    _add_symbol(p)
    p.add_argument("--truncation", type=int, default=32, help="column window size M")
    p.add_argument("--tol", type=float, default=1e-8, help="relative rank tolerance")
    _add_common(p)

    p = sub.add_parser("trace-verify", help="winding via trace and partial inverse")
    _add_symbol(p)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--truncation", type=int, default=32)
    p.add_argument("--window", type=int, default=32)
    _add_common(p)

    p = sub.add_parser("tensor-verify", help="product-symbol index identity")
    p.add_argument("expr_a")
    p.add_argument("expr_b")
    _add_theta(p)
    p.add_argument("--points", help="character points, e.g. 0.7,1.9")
    _add_common(p)

    p = sub.add_parser("demos", help="cokernel growth, witness, weak residuals")
    p.add_argument("--growth-sizes", default="4,8,16")
    p.add_argument("--witness-size", type=int, default=8)
    _add_common(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8641)

    return parser


def _symbol_in(args) -> SymbolIn:
    if getattr(args, "file", None):
        with open(args.file) as fh:
            obj = json.load(fh)
        return SymbolIn(dim=obj.get("dim"), terms=obj.get("terms"))
    if getattr(args, "expr", None) is None:
        raise QidxUsageError("give a symbol expression or --file")
    return SymbolIn(expr=args.expr)


def _theta_in(args) -> ThetaIn:
    spec = None
    if getattr(args, "theta", None):
        spec = [s for s in args.theta.split(",") if s.strip()]
    return ThetaIn(spec=spec, assert_irrational=getattr(args, "assert_irrational", False))


def _grid(args) -> tuple[int, int]:
    raw = getattr(args, "grid", None)
    if not raw:
        return (256, 256)
    parts = [int(s) for s in raw.split(",")]
    return (parts[0], parts[0]) if len(parts) == 1 else (parts[0], parts[1])


def _matrix_in(path: str) -> MatrixIn:
    with open(path) as fh:
        obj = json.load(fh)
    rows = obj.get("entries")
    if not rows:
        raise QidxUsageError("matrix file needs a nonempty 'entries' array")
    conv = []
    for row in rows:
        conv_row = []
        for e in row:
            if isinstance(e, str):
                conv_row.append(SymbolIn(expr=e))
            else:
                conv_row.append(SymbolIn(dim=e.get("dim"), terms=e.get("terms")))
        conv.append(conv_row)
    return MatrixIn(entries=conv)


def _build_request(args):
    cmd = args.command
    if cmd == "wind":
        return WindRequest(symbol=_symbol_in(args))
    if cmd == "index2d":
        return Index2DRequest(symbol=_symbol_in(args), theta=_theta_in(args), grid=_grid(args))
    if cmd == "indexnd":
        return IndexNDRequest(symbol=_symbol_in(args), theta=_theta_in(args), dim=args.dim)
    if cmd == "decompose":
        return DecomposeRequest(symbol=_symbol_in(args), grid=_grid(args))
    if cmd == "fredholm":
        return FredholmRequest(symbol=_symbol_in(args))
    if cmd == "matindex":
        return MatIndexRequest(matrix=_matrix_in(args.file), theta=_theta_in(args))
    if cmd == "oracle":
        return OracleRequest(symbol=_symbol_in(args), truncation=args.truncation, rank_tol=args.tol)
    if cmd == "trace-verify":
        return TraceVerifyRequest(
            symbol=_symbol_in(args), tol=args.tol,
            truncation=args.truncation, window=args.window,
        )
    if cmd == "tensor-verify":
        points = (0.7, 1.9)
        if args.points:
            vals = [float(s) for s in args.points.split(",")]
            points = (vals[0], vals[1])
        return TensorVerifyRequest(
            symbol_a=SymbolIn(expr=args.expr_a),
            symbol_b=SymbolIn(expr=args.expr_b),
            theta=_theta_in(args),
            char_points=points,
        )
    if cmd == "demos":
        return DemosRequest(
            growth_sizes=[int(s) for s in args.growth_sizes.split(",")],
            witness_size=args.witness_size,
        )
    raise QidxUsageError(f"unknown command {cmd!r}")


class _RemoteMathError(QidxMathError):
    """Math failure reported by a remote server; keeps its payload."""

    def __init__(self, payload: dict):
        self._payload = payload
        super().__init__(payload.get("detail", ""))

    def payload(self) -> dict:
        return self._payload


def _dispatch_remote(server: str, path: str, req) -> dict:
    resp = httpx.post(server.rstrip("/") + path, json=req.model_dump(), timeout=120.0)
    if resp.status_code == 200:
        return resp.json()
    if resp.status_code == 422:
        raise _RemoteMathError(resp.json())
    raise QidxUsageError(resp.text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage problems
        return 0 if exc.code in (0, None) else 1

    if args.command == "serve":
        import uvicorn

        uvicorn.run(service.app, host=args.host, port=args.port)
        return 0

    if getattr(args, "format", "json") != "json":
        print(f"unsupported format {args.format!r}", file=sys.stderr)
        return 1

    path, do = _COMMANDS[args.command]
    try:
        req = _build_request(args)
        if getattr(args, "server", None):
            report = _dispatch_remote(args.server, path, req)
        else:
            report = do(req).model_dump()
    except QidxMathError as exc:
        emit_report(exc.payload(), getattr(args, "out", None))
        return 2
    except QidxUsageError as exc:
        print(json.dumps(exc.payload()), file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    emit_report(report, getattr(args, "out", None))
    return 0


if __name__ == "__main__":
    sys.exit(main())
