"""FastAPI service exposing the index computations.

Each endpoint wraps one operation of the core package behind a pydantic
request/response pair.  Math failures surface as HTTP 422 with a stable
machine-readable payload, malformed symbols as HTTP 400.  The CLI calls the
same ``do_*`` functions in process, so the two front ends cannot drift.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import hardy, indicial, index, winding
from .errors import QidxMathError, QidxUsageError
from .schemas import (
    DecomposeRequest,
    DecomposeResponse,
    DemosRequest,
    DemosResponse,
    ErrorPayload,
    FredholmRequest,
    FredholmResponse,
    Index2DRequest,
    IndexNDRequest,
    IndexReport,
    MatIndexRequest,
    OracleRequest,
    OracleResponse,
    TensorVerifyRequest,
    TensorVerifyResponse,
    TraceVerifyRequest,
    TraceVerifyResponse,
    WindRequest,
    WindResponse,
)
from .symbol import LaurentPoly


def _report(idx: index.IndexValue) -> IndexReport:
    return IndexReport(
        fredholm=True,
        m=list(idx.m),
        theta=list(idx.theta.values),
        topological_index=idx.value,
        fredholm_index=-idx.value,
    )


def do_wind(req: WindRequest) -> WindResponse:
    return WindResponse(wn=winding.winding_exact(req.symbol.to_poly(dim=1)))


def do_index2d(req: Index2DRequest) -> IndexReport:
    poly = req.symbol.to_poly(dim=2)
    theta = req.theta.to_weights(2)
    return _report(index.topological_index_T2(poly, theta, grid=tuple(req.grid)))


def do_indexnd(req: IndexNDRequest) -> IndexReport:
    poly = req.symbol.to_poly(dim=req.dim)
    n = poly.dim
    if req.theta.spec is not None:
        n = max(n, len(req.theta.spec))
        poly = poly.promote(n)
    return _report(index.index_TN(poly, req.theta.to_weights(n)))


def do_decompose(req: DecomposeRequest) -> DecomposeResponse:
    poly = req.symbol.to_poly(dim=2)
    dec = winding.decompose_torus2(poly, grid=tuple(req.grid))
    return DecomposeResponse(
        m=dec.m,
        n=dec.n,
        grid=dec.psi_grid.shape,
        psi_tail=dec.psi_tail,
        recon_error=dec.recon_error,
    )


def do_fredholm(req: FredholmRequest) -> FredholmResponse:
    return FredholmResponse(fredholm=index.is_fredholm_T2(req.symbol.to_poly(dim=2)))


def do_matindex(req: MatIndexRequest) -> IndexReport:
    phi = req.matrix.to_matrix()
    theta = req.theta.to_weights(2)
    return _report(index.fredholm_index_matrix(phi, theta).negated())


def do_oracle(req: OracleRequest) -> OracleResponse:
    poly = req.symbol.to_poly()
    if poly.dim == 1:
        section = hardy.toeplitz_section_1d(poly, req.truncation)
    elif poly.dim == 2:
        section = hardy.toeplitz_section_2d(poly, req.truncation)
    else:
        raise QidxUsageError(f"oracle supports dim 1 or 2, got {poly.dim}")
    rep = hardy.kernel_cokernel_oracle(section, rank_tol=req.rank_tol)
    gap = None if math.isinf(rep.sigma_gap) else rep.sigma_gap
    return OracleResponse(ker_dim=rep.ker_dim, coker_dim=rep.coker_dim, sigma_gap=gap)


def do_trace_verify(req: TraceVerifyRequest) -> TraceVerifyResponse:
    poly = req.symbol.to_poly(dim=1)
    wn = winding.winding_exact(poly)
    trace_val = indicial.trace_winding_1d(poly, tol=req.tol)
    partial = hardy.partial_inverse_index_1d(poly, M=req.truncation, W=req.window)
    consistent = abs(trace_val - wn) <= req.tol and abs(partial + wn) <= 1e-6
    return TraceVerifyResponse(
        wn_exact=wn,
        trace_formula=trace_val,
        partial_inverse=partial,
        consistent=consistent,
    )


def do_tensor_verify(req: TensorVerifyRequest) -> TensorVerifyResponse:
    a = req.symbol_a.to_poly(dim=1)
    b = req.symbol_b.to_poly(dim=1)
    theta = req.theta.to_weights(2)
    lhs, rhs = indicial.tensor_index_verify(
        a, b, theta.values, lams=tuple(req.char_points)
    )
    return TensorVerifyResponse(
        lhs=lhs, rhs=rhs, difference=abs(lhs - rhs), theta=list(theta.values)
    )


def do_demos(req: DemosRequest) -> DemosResponse:
    z1 = LaurentPoly.monomial((1, 0))
    growth = hardy.cokernel_growth_demo(z1, req.growth_sizes)
    sv = hardy.noncompact_witness(req.witness_size)
    unit_count = int((abs(sv - 1.0) < 1e-12).sum())
    psi = LaurentPoly.monomial((1, 0), 0.3)
    weak = hardy.weak_invertibility_check(psi, req.weak_truncation, req.weak_ks)
    return DemosResponse(
        growth_sizes=list(req.growth_sizes),
        cokernel_dims=growth,
        witness_size=req.witness_size,
        unit_singular_values=unit_count,
        weak_ks=list(req.weak_ks),
        weak_residuals=weak,
    )


app = FastAPI(
    title="qidx",
    description="Winding numbers and weighted Toeplitz indices on the torus",
    version="0.1.0",
)


@app.exception_handler(QidxMathError)
async def _math_error(request: Request, exc: QidxMathError):
    return JSONResponse(status_code=422, content=exc.payload())


@app.exception_handler(QidxUsageError)
async def _usage_error(request: Request, exc: QidxUsageError):
    return JSONResponse(status_code=400, content=exc.payload())


@app.get("/healthz")
def healthz():
    return {"status": "ok", "sqrt2": math.sqrt(2.0)}


_RESPONSES = {
    422: {"model": ErrorPayload, "description": "mathematical failure"},
    400: {"model": ErrorPayload, "description": "malformed symbol"},
}


@app.post("/wind", response_model=WindResponse, responses=_RESPONSES)
def wind(req: WindRequest):
    return do_wind(req)


@app.post("/index2d", response_model=IndexReport, responses=_RESPONSES)
def index2d(req: Index2DRequest):
    return do_index2d(req)


@app.post("/indexnd", response_model=IndexReport, responses=_RESPONSES)
def indexnd(req: IndexNDRequest):
    return do_indexnd(req)


@app.post("/decompose", response_model=DecomposeResponse, responses=_RESPONSES)
def decompose(req: DecomposeRequest):
    return do_decompose(req)


@app.post("/fredholm", response_model=FredholmResponse, responses=_RESPONSES)
def fredholm(req: FredholmRequest):
    return do_fredholm(req)


@app.post("/matindex", response_model=IndexReport, responses=_RESPONSES)
def matindex(req: MatIndexRequest):
    return do_matindex(req)


@app.post("/oracle", response_model=OracleResponse, responses=_RESPONSES)
def oracle(req: OracleRequest):
    return do_oracle(req)


@app.post("/trace-verify", response_model=TraceVerifyResponse, responses=_RESPONSES)
def trace_verify(req: TraceVerifyRequest):
    return do_trace_verify(req)


@app.post("/tensor-verify", response_model=TensorVerifyResponse, responses=_RESPONSES)
def tensor_verify(req: TensorVerifyRequest):
    return do_tensor_verify(req)


@app.post("/demos", response_model=DemosResponse, responses=_RESPONSES)
def demos(req: DemosRequest):
    return do_demos(req)
