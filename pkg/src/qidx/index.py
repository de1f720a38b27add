"""Weighted Fredholm indices of Toeplitz operators on the torus.

On the 2-torus an invertible symbol a = z1^m z2^n exp(psi) has topological
index theta*m + n and Fredholm index -(theta*m + n); the index lives in the
group Z*theta + Z, not in Z.  The integers (m, n) are carried exactly and
the weights separately: floats cannot be irrational, so the zero-index
characterization (index 0 iff a is an exponential) is gated on an explicit
``rationally_independent`` flag rather than on a numerical test.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    NotInvertibleOnTorus,
    SizeLimit,
    ThetaNotIrrational,
)
from .symbol import VANISH_TOL, LaurentPoly, MatrixSymbol, min_modulus
from .winding import decompose_torus2, winding_vector_n

_NAMED_WEIGHTS = {
    "sqrt2": math.sqrt(2.0),
    "sqrt3": math.sqrt(3.0),
    "sqrt5": math.sqrt(5.0),
    "sqrt7": math.sqrt(7.0),
    "golden": (1.0 + math.sqrt(5.0)) / 2.0,
    "1": 1.0,
}

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


@dataclass(frozen=True)
class ThetaWeights:
    """Positive index weights, with a flag asserting rational independence."""

    values: tuple
    rationally_independent: bool = False
    tags: tuple | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals or any(v <= 0 for v in vals):
            raise ValueError("theta weights must be positive")
        object.__setattr__(self, "values", vals)

    @classmethod
    def default_t2(cls) -> "ThetaWeights":
        return cls((math.sqrt(2.0), 1.0), rationally_independent=True,
                   tags=("sqrt2", "1"))

    @classmethod
    def default_tn(cls, n: int) -> "ThetaWeights":
        if n < 1:
            raise ValueError("need at least one weight")
        if n - 1 > len(_PRIMES):
            raise ValueError(f"no default weights for dimension {n}")
        tags = tuple(f"sqrt{p}" for p in _PRIMES[: n - 1]) + ("1",)
        vals = tuple(math.sqrt(p) for p in _PRIMES[: n - 1]) + (1.0,)
        return cls(vals, rationally_independent=True, tags=tags)

    @classmethod
    def from_spec(cls, spec, n: int, assert_irrational: bool = False) -> "ThetaWeights":
        """Build weights from symbolic names and/or decimal literals.

        ``spec`` lists the first weights; a trailing 1.0 is appended when
        fewer than n are given (the usual (theta, 1) convention).  All-name
        specs are flagged rationally independent; any decimal clears the
        flag unless the caller asserts it.
        """
        if spec is None:
            return cls.default_t2() if n == 2 else cls.default_tn(n)
        if isinstance(spec, str):
            spec = [s for s in spec.split(",") if s.strip()]
        items = [str(s).strip() for s in spec]
        if len(items) == n - 1:
            items.append("1")
        if len(items) != n:
            raise ValueError(f"need {n} weights, got {len(items)}")
        vals, tags, symbolic = [], [], True
        for s in items:
            if s in _NAMED_WEIGHTS:
                vals.append(_NAMED_WEIGHTS[s])
                tags.append(s)
            else:
                vals.append(float(s))
                tags.append(s)
                if float(s) != 1.0:
                    symbolic = False
        independent = assert_irrational or (symbolic and len(set(tags)) == len(tags))
        return cls(tuple(vals), rationally_independent=independent, tags=tuple(tags))


@dataclass(frozen=True)
class IndexValue:
    """Integer exponent vector with its weighted value sum(theta_i * m_i)."""

    m: tuple
    theta: ThetaWeights
    value: float

    @classmethod
    def of(cls, m, theta: ThetaWeights) -> "IndexValue":
        m = tuple(int(x) for x in m)
        if len(m) != len(theta.values):
            raise DimMismatch(
                f"{len(m)} exponents vs {len(theta.values)} weights"
            )
        value = float(sum(t * x for t, x in zip(theta.values, m)))
        return cls(m=m, theta=theta, value=value)

    def negated(self) -> "IndexValue":
        return IndexValue.of(tuple(-x for x in self.m), self.theta)

    def __add__(self, other: "IndexValue") -> "IndexValue":
        if self.theta.values != other.theta.values:
            raise DimMismatch("cannot add indices with different weights")
        return IndexValue.of(
            tuple(a + b for a, b in zip(self.m, other.m)), self.theta
        )


def is_fredholm_T2(a: LaurentPoly, vanish_tol: float = VANISH_TOL) -> bool:
    """A quarter-plane Toeplitz operator is (weighted) Fredholm iff its
    symbol is non-vanishing on the 2-torus."""
    if a.dim != 2:
        raise DimMismatch("is_fredholm_T2 needs a dim-2 symbol")
    return min_modulus(a) > vanish_tol


def topological_index_T2(
    a: LaurentPoly,
    theta: ThetaWeights | None = None,
    grid: tuple[int, int] = (256, 256),
) -> IndexValue:
    """theta*m + n for the decomposition a = z1^m z2^n exp(psi).

    Raises NotInvertibleOnTorus (the operator is not Fredholm) when the
    symbol vanishes; the check happens inside the decomposition.
    """
    theta = theta or ThetaWeights.default_t2()
    dec = decompose_torus2(a, grid=grid)
    return IndexValue.of((dec.m, dec.n), theta)


def fredholm_index_T2(
    a: LaurentPoly,
    theta: ThetaWeights | None = None,
    grid: tuple[int, int] = (256, 256),
) -> IndexValue:
    """-(theta*m + n): the operator index is minus the symbol index."""
    return topological_index_T2(a, theta, grid).negated()


def zero_index_iff_exponential(
    a: LaurentPoly, theta: ThetaWeights | None = None
) -> bool:
    """True iff (m, n) = (0, 0), i.e. iff a = exp(psi) for continuous psi.

    Zero weighted index is equivalent to m = n = 0 only when the weights
    are rationally independent, so the flag is required.
    """
    theta = theta or ThetaWeights.default_t2()
    if not theta.rationally_independent:
        raise ThetaNotIrrational(
            "zero-index characterization needs rationally independent weights"
        )
    idx = topological_index_T2(a, theta)
    return idx.m == (0,) * len(idx.m)


def index_TN(a: LaurentPoly, theta: ThetaWeights | None = None) -> IndexValue:
    """Slice-winding index on the N-torus: value = sum(theta_i * m_i)."""
    theta = theta or ThetaWeights.default_tn(a.dim)
    if len(theta.values) != a.dim:
        raise DimMismatch(f"{len(theta.values)} weights for dim {a.dim}")
    m = winding_vector_n(a)
    return IndexValue.of(m, theta)


def matrix_det(phi: MatrixSymbol, max_points: int = 1 << 22) -> LaurentPoly:
    """Determinant over the Laurent-polynomial ring.

    Cofactor expansion (exact) up to size 6; larger matrices go through
    evaluation on an alias-free FFT grid sized by the per-coordinate degree
    bounds, which is exact up to roundoff of the pointwise determinants.
    """
    n = phi.size
    if n <= 6:
        return _det_cofactor([list(row) for row in phi.entries])

    ranges = []
    for axis in range(2):
        lo = sum(min(e.degree_range(axis)[0] for e in row) for row in phi.entries)
        hi = sum(max(e.degree_range(axis)[1] for e in row) for row in phi.entries)
        ranges.append((lo, hi))
    k1 = 1 << max(1, (ranges[0][1] - ranges[0][0] + 1).bit_length())
    k2 = 1 << max(1, (ranges[1][1] - ranges[1][0] + 1).bit_length())
    if k1 * k2 > max_points:
        raise SizeLimit(f"interpolation grid {k1}x{k2} exceeds {max_points} points")
    grid_vals = np.empty((k1, k2, n, n), dtype=complex)
    for i, row in enumerate(phi.entries):
        for j, e in enumerate(row):
            grid_vals[:, :, i, j] = e.sample((k1, k2)).values
    det_vals = np.linalg.det(grid_vals)
    coeffs = np.fft.fftn(det_vals) / (k1 * k2)
    f1 = np.fft.fftfreq(k1, d=1.0 / k1).astype(int)
    f2 = np.fft.fftfreq(k2, d=1.0 / k2).astype(int)
    scale = float(np.max(np.abs(coeffs))) or 1.0
    terms = {}
    for i1, i2 in itertools.product(range(k1), range(k2)):
        c = coeffs[i1, i2]
        if abs(c) <= 1e-10 * scale:
            continue
        e1 = _unalias(int(f1[i1]), k1, ranges[0])
        e2 = _unalias(int(f2[i2]), k2, ranges[1])
        terms[(e1, e2)] = c
    return LaurentPoly(2, terms)


def _unalias(f: int, k: int, lohi: tuple[int, int]) -> int:
    lo, hi = lohi
    e = f
    while e < lo:
        e += k
    while e > hi:
        e -= k
    return e


def _det_cofactor(rows: list) -> LaurentPoly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = LaurentPoly.zero(2)
    for j, pivot in enumerate(rows[0]):
        if pivot.is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in rows[1:]]
        term = pivot * _det_cofactor(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def fredholm_index_matrix(
    phi: MatrixSymbol,
    theta: ThetaWeights | None = None,
    vanish_tol: float = VANISH_TOL,
) -> IndexValue:
    """Index of a matrix-symbol Toeplitz operator via its determinant.

    Fredholm iff det(phi) is non-vanishing on the 2-torus, in which case the
    index equals the (negated) weighted index of the determinant symbol.
    """
    det = matrix_det(phi)
    if min_modulus(det) <= vanish_tol:
        raise NotInvertibleOnTorus(
            "determinant vanishes on the torus: operator is not Fredholm"
        )
    return topological_index_T2(det, theta).negated()
