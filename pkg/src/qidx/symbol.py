"""Laurent-polynomial symbols on the d-torus.

A symbol is a finitely supported coefficient map k -> c_k on Z^d,
representing the function

    a(lam_1, ..., lam_d) = sum_k c_k * exp(i <k, lam>).

The coefficient map is the computable dense class everything else is built
on: products are exact convolutions, conjugation reflects and conjugates
coefficients, and grid evaluation is an (exact) inverse FFT.  Coefficients
that are exactly zero are never stored, so two symbols are equal iff their
term maps are equal.  Instances are immutable after construction and safe
to share between threads.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    NoConvergence,
    NotInvertibleOnTorus,
    SeriesDivergence,
    SymbolFormatError,
)

Exponent = tuple[int, ...]

#: below this modulus a sampled minimum counts as a zero of the symbol
VANISH_TOL = 1e-9

#: relative stopping criterion for the min-modulus grid refinement
_MIN_MODULUS_RTOL = 1e-6


@dataclass(frozen=True)
class GridSamples:
    """Values of a function at the equispaced torus grid lam_j = 2*pi*j/K."""

    shape: tuple[int, ...]
    values: np.ndarray

    def angles(self, axis: int) -> np.ndarray:
        k = self.shape[axis]
        return 2.0 * math.pi * np.arange(k) / k


class LaurentPoly:
    """Finitely supported Fourier-coefficient map on Z^d.

    >>> z = LaurentPoly.monomial(1)
    >>> (z * z.conj()).terms
    {(0,): (1+0j)}
    """

    __slots__ = ("dim", "terms")

    def __init__(self, dim: int, terms=None):
        if dim < 1:
            raise DimMismatch(f"dim must be >= 1, got {dim}")
        canon: dict[Exponent, complex] = {}
        for k, c in (terms or {}).items():
            k = tuple(int(x) for x in k)
            if len(k) != dim:
                raise DimMismatch(f"exponent {k} does not have dim {dim}")
            c = complex(c)
            if c != 0:
                canon[k] = canon.get(k, 0) + c
                if canon[k] == 0:
                    del canon[k]
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "terms", canon)

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, dim: int = 1) -> "LaurentPoly":
        return cls(dim, {})

    @classmethod
    def one(cls, dim: int = 1) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: 1.0})

    @classmethod
    def constant(cls, c, dim: int = 1) -> "LaurentPoly":
        return cls(dim, {(0,) * dim: complex(c)})

    @classmethod
    def monomial(cls, k, c=1.0) -> "LaurentPoly":
        """c * z^k;  k may be an int (dim 1) or an exponent tuple."""
        if isinstance(k, int):
            k = (k,)
        return cls(len(k), {tuple(k): complex(c)})

    @classmethod
    def variable(cls, axis: int, dim: int) -> "LaurentPoly":
        k = [0] * dim
        k[axis] = 1
        return cls(dim, {tuple(k): 1.0})

    # -- algebra -----------------------------------------------------------

    def _check_dim(self, other: "LaurentPoly"):
        if self.dim != other.dim:
            raise DimMismatch(f"dim {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.dim)
        self._check_dim(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.dim, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other, self.dim)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LaurentPoly):
            return LaurentPoly(
                self.dim, {k: c * complex(other) for k, c in self.terms.items()}
            )
        self._check_dim(other)
        out: dict[Exponent, complex] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out.get(k, 0) + ca * cb
        return LaurentPoly(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = LaurentPoly.one(self.dim)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        return (
            isinstance(other, LaurentPoly)
            and self.dim == other.dim
            and self.terms == other.terms
        )

    def __repr__(self):
        items = ", ".join(f"{k}: {c}" for k, c in sorted(self.terms.items()))
        return f"LaurentPoly(dim={self.dim}, {{{items}}})"

    def conj(self) -> "LaurentPoly":
        """Pointwise complex conjugate: coeff at k becomes conj(coeff at -k)."""
        return LaurentPoly(
            self.dim,
            {tuple(-x for x in k): c.conjugate() for k, c in self.terms.items()},
        )

    def prune(self, eps: float) -> "LaurentPoly":
        """Drop coefficients with modulus <= eps.  Never done implicitly."""
        return LaurentPoly(
            self.dim, {k: c for k, c in self.terms.items() if abs(c) > eps}
        )

    # -- structure ---------------------------------------------------------

    @property
    def support(self) -> list[Exponent]:
        return list(self.terms.keys())

    def is_zero(self) -> bool:
        return not self.terms

    def degree_range(self, axis: int = 0) -> tuple[int, int]:
        """(min, max) exponent in the given coordinate; (0, 0) for 0."""
        if not self.terms:
            return (0, 0)
        exps = [k[axis] for k in self.terms]
        return (min(exps), max(exps))

    def bandwidth(self, axis: int = 0) -> int:
        """Largest |exponent| in the given coordinate."""
        lo, hi = self.degree_range(axis)
        return max(abs(lo), abs(hi))

    def coeff_max(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def promote(self, dim: int) -> "LaurentPoly":
        """Right-pad exponents with zeros, embedding into more variables."""
        if dim < self.dim:
            raise DimMismatch(f"cannot demote dim {self.dim} to {dim}")
        if dim == self.dim:
            return self
        pad = (0,) * (dim - self.dim)
        return LaurentPoly(dim, {k + pad: c for k, c in self.terms.items()})

    def collapse(self, axis: int, fixed_angles) -> "LaurentPoly":
        """Restrict to the 1-D slice where the remaining coordinates are held
        at ``fixed_angles`` (listed in coordinate order, skipping ``axis``)."""
        fixed = list(fixed_angles)
        if len(fixed) != self.dim - 1:
            raise DimMismatch("need one fixed angle per remaining coordinate")
        out: dict[Exponent, complex] = {}
        for k, c in self.terms.items():
            rest = [k[i] for i in range(self.dim) if i != axis]
            phase = cmath.exp(1j * sum(e * a for e, a in zip(rest, fixed)))
            key = (k[axis],)
            out[key] = out.get(key, 0) + c * phase
        return LaurentPoly(1, out)

    # -- evaluation --------------------------------------------------------

    def evaluate(self, point) -> complex:
        """Value at a point of the torus, given as d angles in [0, 2*pi)."""
        if isinstance(point, (int, float)):
            point = (point,)
        point = tuple(point)
        if len(point) != self.dim:
            raise DimMismatch(f"point has {len(point)} angles, dim is {self.dim}")
        total = 0j
        for k, c in self.terms.items():
            total += c * cmath.exp(1j * sum(e * a for e, a in zip(k, point)))
        return total

    def sample(self, shape) -> GridSamples:
        """Values on the equispaced grid, exact at the grid points.

        Coefficients are folded mod K_i before the inverse FFT; the folding
        is harmless because exp(2*pi*i*j*k/K) only sees k mod K.
        """
        if isinstance(shape, int):
            shape = (shape,)
        shape = tuple(int(s) for s in shape)
        if len(shape) != self.dim:
            raise DimMismatch(f"grid shape {shape} does not match dim {self.dim}")
        arr = np.zeros(shape, dtype=complex)
        for k, c in self.terms.items():
            arr[tuple(ki % si for ki, si in zip(k, shape))] += c
        values = np.fft.ifftn(arr) * math.prod(shape)
        return GridSamples(shape, values)


# -- invertibility and reciprocal -----------------------------------------


def min_modulus(a: LaurentPoly, init_grid: int | None = None) -> float:
    """Estimated min over the torus of |a|, by grid refinement.

    The grid is doubled until two successive minima differ by less than
    1e-6 * (1 + |min|).  Deciding invertibility from the estimate (against
    ``VANISH_TOL``) is the caller's job.
    """
    if a.is_zero():
        return 0.0
    caps = {1: 1 << 16, 2: 2048, 3: 128}
    cap = caps.get(a.dim, 32)
    g = max(int(init_grid), 8) if init_grid else (64 if a.dim <= 2 else 16)
    prev = None
    while True:
        cur = float(np.min(np.abs(a.sample((g,) * a.dim).values)))
        if prev is not None and abs(cur - prev) < _MIN_MODULUS_RTOL * (1 + abs(cur)):
            return cur
        prev = cur
        if g >= cap:
            return cur
        g *= 2


def is_invertible(a: LaurentPoly, vanish_tol: float = VANISH_TOL) -> bool:
    return min_modulus(a) > vanish_tol


def reciprocal_coeffs(
    a: LaurentPoly,
    window: int,
    tol: float = 1e-10,
    vanish_tol: float = VANISH_TOL,
) -> LaurentPoly:
    """Fourier coefficients of 1/a on exponents [-window, window].

    1/a is sampled on a grid and inverse-transformed; the grid is doubled
    until the far band of the computed spectrum (|k| >= grid/4, which is
    what aliases back into the window) drops below ``tol``, so the returned
    coefficients are each accurate to about ``tol``.  Requires a
    nowhere-vanishing 1-D symbol.
    """
    if a.dim != 1:
        raise DimMismatch("reciprocal_coeffs needs a 1-D symbol")
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the torus (or nearly)")
    window = int(window)
    lo, hi = a.degree_range()
    spread = hi - lo
    n = 1 << max(6, (4 * (window + spread + 1)).bit_length())
    while True:
        vals = a.sample((n,)).values
        spectrum = np.fft.fft(1.0 / vals) / n
        freqs = np.fft.fftfreq(n, d=1.0 / n).astype(int)
        far = np.abs(freqs) >= max(n // 4, window + 1)
        tail = float(np.max(np.abs(spectrum[far]))) if far.any() else 0.0
        if tail < tol:
            terms = {
                (int(k),): spectrum[i]
                for i, k in enumerate(freqs)
                if abs(k) <= window and spectrum[i] != 0
            }
            return LaurentPoly(1, terms)
        if n >= 1 << 20:
            raise NoConvergence(
                f"reciprocal tail {tail:.3e} above {tol:.3e} at grid {n}"
            )
        n *= 2


def exp_poly(a: LaurentPoly, atol: float = 1e-16, max_terms: int = 400) -> LaurentPoly:
    """exp(a) as a Laurent polynomial, by the power series.

    Terms are accumulated with the recurrence t_{n} = t_{n-1} * a / n and the
    series stops once max|coeff(t_n)| <= atol.  Intended for small ||a||; the
    bandwidth of the result grows linearly with the number of terms.
    """
    acc = LaurentPoly.one(a.dim)
    term = LaurentPoly.one(a.dim)
    for n in range(1, max_terms + 1):
        term = term * a
        term = term * (1.0 / n)
        acc = acc + term
        m = term.coeff_max()
        if m <= atol:
            return acc
        if m > 1e12:
            raise SeriesDivergence(f"exp series term grew to {m:.3e}")
    raise SeriesDivergence(f"exp series did not reach {atol:.1e} in {max_terms} terms")


# -- point-evaluable wrappers (for words in the character algebra) ----------


class ReciprocalSymbol:
    """Point evaluation of 1/a; no coefficient expansion is performed."""

    __slots__ = ("base",)

    def __init__(self, base: LaurentPoly):
        self.base = base

    @property
    def dim(self) -> int:
        return self.base.dim

    def evaluate(self, point) -> complex:
        v = self.base.evaluate(point)
        if abs(v) < 1e-14:
            raise NotInvertibleOnTorus("reciprocal evaluated at a zero of the symbol")
        return 1.0 / v


class ExpSymbol:
    """Point evaluation of exp(a)."""

    __slots__ = ("base",)

    def __init__(self, base: LaurentPoly):
        self.base = base

    @property
    def dim(self) -> int:
        return self.base.dim

    def evaluate(self, point) -> complex:
        return cmath.exp(self.base.evaluate(point))


# -- matrix symbols ----------------------------------------------------------


class MatrixSymbol:
    """Square matrix of dim-2 Laurent symbols."""

    __slots__ = ("size", "entries")

    def __init__(self, entries):
        rows = [tuple(row) for row in entries]
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise DimMismatch("matrix symbol must be square and nonempty")
        for row in rows:
            for e in row:
                if not isinstance(e, LaurentPoly) or e.dim != 2:
                    raise DimMismatch("matrix entries must be dim-2 Laurent symbols")
        object.__setattr__(self, "size", n)
        object.__setattr__(self, "entries", tuple(rows))

    def __setattr__(self, *a):  # pragma: no cover
        raise AttributeError("MatrixSymbol is immutable")

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


# -- JSON interchange --------------------------------------------------------


def poly_to_json_dict(a: LaurentPoly) -> dict:
    return {
        "dim": a.dim,
        "terms": [
            {"k": list(k), "re": c.real, "im": c.imag}
            for k, c in sorted(a.terms.items())
        ],
    }


def poly_from_json_dict(obj: dict) -> LaurentPoly:
    try:
        dim = int(obj["dim"])
        raw = obj["terms"]
    except (KeyError, TypeError, ValueError) as exc:
        raise SymbolFormatError(f"bad symbol object: {exc}") from exc
    seen: set[Exponent] = set()
    terms: dict[Exponent, complex] = {}
    for t in raw:
        try:
            k = tuple(int(x) for x in t["k"])
            c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise SymbolFormatError(f"bad term {t!r}") from exc
        if len(k) != dim:
            raise SymbolFormatError(f"term exponent {k} does not have dim {dim}")
        if k in seen:
            raise SymbolFormatError(f"duplicate exponent {k}")
        seen.add(k)
        terms[k] = c
    return LaurentPoly(dim, terms)


def save_poly(a: LaurentPoly, path: str):
    with open(path, "w") as fh:
        json.dump(poly_to_json_dict(a), fh, indent=2)


def load_poly(path: str) -> LaurentPoly:
    with open(path) as fh:
        return poly_from_json_dict(json.load(fh))
