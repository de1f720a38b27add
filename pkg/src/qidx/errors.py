"""Exception hierarchy.

Math errors (symbol degenerate, algorithm cannot certify a result) are kept
separate from usage errors (malformed input) so that front ends can map them
to distinct exit codes / HTTP statuses.
"""


class QidxError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "error"

    def payload(self) -> dict:
        return {"error": self.code, "detail": str(self)}


class QidxMathError(QidxError):
    code = "math_error"


class QidxUsageError(QidxError):
    code = "usage_error"


class DimMismatch(QidxMathError):
    code = "dim_mismatch"


class NotInvertibleOnTorus(QidxMathError):
    code = "not_invertible_on_torus"


class NoConvergence(QidxMathError):
    code = "no_convergence"


class RootOnCircle(QidxMathError):
    code = "root_on_circle"


class PhaseStepTooLarge(QidxMathError):
    code = "phase_step_too_large"


class ResidualTooLarge(QidxMathError):
    code = "residual_too_large"


class UnwrapClosureFailure(QidxMathError):
    code = "unwrap_closure_failure"


class NonIntegerTrace(QidxMathError):
    code = "non_integer_trace"


class Unclassifiable(QidxMathError):
    code = "unclassifiable"


class LengthMismatch(QidxMathError):
    code = "length_mismatch"


class AmbiguousRank(QidxMathError):
    code = "ambiguous_rank"


class SizeLimit(QidxMathError):
    code = "size_limit"


class SeriesDivergence(QidxMathError):
    code = "series_divergence"


class ThetaNotIrrational(QidxMathError):
    code = "theta_not_irrational"


class ParseError(QidxUsageError):
    code = "parse_error"

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class DimError(QidxUsageError):
    code = "dim_error"


class SymbolFormatError(QidxUsageError):
    code = "symbol_format_error"
