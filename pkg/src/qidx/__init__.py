"""qidx: winding numbers, torus symbol decomposition, and weighted Fredholm
indices of quarter-plane Toeplitz operators, computed at desk scale."""

from .errors import QidxError, QidxMathError, QidxUsageError
from .index import IndexValue, ThetaWeights
from .symbol import GridSamples, LaurentPoly, MatrixSymbol

__all__ = [
    "GridSamples",
    "IndexValue",
    "LaurentPoly",
    "MatrixSymbol",
    "QidxError",
    "QidxMathError",
    "QidxUsageError",
    "ThetaWeights",
]

__version__ = "0.1.0"
