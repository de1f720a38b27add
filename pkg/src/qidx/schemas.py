"""Pydantic request/response models shared by the HTTP service and the CLI."""

from __future__ import annotations

from pydantic import BaseModel, Field

from .errors import SymbolFormatError
from .index import ThetaWeights
from .parser import parse_expression
from .symbol import LaurentPoly, MatrixSymbol, poly_from_json_dict


class TermIn(BaseModel):
    k: list[int]
    re: float = 0.0
    im: float = 0.0


class SymbolIn(BaseModel):
    """A symbol, either as an expression or as an explicit coefficient map."""

    expr: str | None = None
    dim: int | None = None
    terms: list[TermIn] | None = None

    def to_poly(self, dim: int | None = None) -> LaurentPoly:
        if self.expr is not None:
            return parse_expression(self.expr, dim=dim)
        if self.terms is None:
            raise SymbolFormatError("symbol needs either 'expr' or 'terms'")
        if self.dim is None:
            raise SymbolFormatError("'terms' form needs an explicit 'dim'")
        poly = poly_from_json_dict(
            {"dim": self.dim, "terms": [t.model_dump() for t in self.terms]}
        )
        if dim is not None:
            poly = poly.promote(dim)
        return poly


class ThetaIn(BaseModel):
    """Weight spec: symbolic names (sqrt2, sqrt3, golden) or decimals."""

    spec: list[str] | None = None
    assert_irrational: bool = False

    def to_weights(self, n: int) -> ThetaWeights:
        return ThetaWeights.from_spec(self.spec, n, self.assert_irrational)


class MatrixIn(BaseModel):
    entries: list[list[SymbolIn]]

    def to_matrix(self) -> MatrixSymbol:
        return MatrixSymbol(
            [[e.to_poly(dim=2) for e in row] for row in self.entries]
        )


# -- requests ---------------------------------------------------------------


class WindRequest(BaseModel):
    symbol: SymbolIn


class Index2DRequest(BaseModel):
    symbol: SymbolIn
    theta: ThetaIn = Field(default_factory=ThetaIn)
    grid: tuple[int, int] = (256, 256)


class IndexNDRequest(BaseModel):
    symbol: SymbolIn
    theta: ThetaIn = Field(default_factory=ThetaIn)
    dim: int | None = None


class DecomposeRequest(BaseModel):
    symbol: SymbolIn
    grid: tuple[int, int] = (256, 256)


class FredholmRequest(BaseModel):
    symbol: SymbolIn


class MatIndexRequest(BaseModel):
    matrix: MatrixIn
    theta: ThetaIn = Field(default_factory=ThetaIn)


class OracleRequest(BaseModel):
    symbol: SymbolIn
    truncation: int = 32
    rank_tol: float = 1e-8


class TraceVerifyRequest(BaseModel):
    symbol: SymbolIn
    tol: float = 1e-8
    truncation: int = 32
    window: int = 32


class TensorVerifyRequest(BaseModel):
    symbol_a: SymbolIn
    symbol_b: SymbolIn
    theta: ThetaIn = Field(default_factory=ThetaIn)
    char_points: tuple[float, float] = (0.7, 1.9)


class DemosRequest(BaseModel):
    growth_sizes: list[int] = Field(default_factory=lambda: [4, 8, 16])
    witness_size: int = 8
    weak_truncation: int = 24
    weak_ks: list[int] = Field(default_factory=lambda: [4, 8, 16, 20])


# -- responses ----------------------------------------------------------------


class WindResponse(BaseModel):
    wn: int


class IndexReport(BaseModel):
    fredholm: bool
    m: list[int]
    theta: list[float]
    topological_index: float
    fredholm_index: float


class DecomposeResponse(BaseModel):
    m: int
    n: int
    grid: tuple[int, int]
    psi_tail: float
    recon_error: float


class FredholmResponse(BaseModel):
    fredholm: bool


class OracleResponse(BaseModel):
    ker_dim: int
    coker_dim: int
    sigma_gap: float | None = None  # None: nothing was dropped, gap unbounded


class TraceVerifyResponse(BaseModel):
    wn_exact: int
    trace_formula: float
    partial_inverse: float
    consistent: bool


class TensorVerifyResponse(BaseModel):
    lhs: float
    rhs: float
    difference: float
    theta: list[float]


class DemosResponse(BaseModel):
    growth_sizes: list[int]
    cokernel_dims: list[int]
    witness_size: int
    unit_singular_values: int
    weak_ks: list[int]
    weak_residuals: list[float]


class ErrorPayload(BaseModel):
    error: str
    detail: str
