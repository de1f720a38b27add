"""Commutators with the Hardy projection, the trace route to the winding
number, point characters on the word algebra, and the composite trace.

For a 1-D symbol a the commutator [P, a] is an exact finite matrix: entry
(j, k) is coeff(j-k) * (1_{j>=0} - 1_{k>=0}), nonzero only where row and
column sit on opposite sides of 0.  Pairing it against the reciprocal
coefficients gives

    tr(a^-1 [P, a]) = winding number of a,

an analytic route that is independent of root counting.

A word is an alternating product  f_0 P f_1 P ... P f_n  of point-evaluable
symbols.  The point character tau_lam sends each symbol factor to its value
at lam and P to 1; it is multiplicative by construction and kills every
commutator of words.  The composite trace pairs a weighted trace with the
character on each tensor leg:

    theta_1 * (tr (x) tau) + theta_2 * (tau (x) tr),

evaluated on classified sums of elementary tensors where each leg either
carries an exact finite trace or is a tau-evaluable word.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    LengthMismatch,
    NonIntegerTrace,
    NotInvertibleOnTorus,
    Unclassifiable,
)
from .symbol import (
    VANISH_TOL,
    LaurentPoly,
    ReciprocalSymbol,
    min_modulus,
    reciprocal_coeffs,
)

#: |tau(b)| below this counts as membership in ker(tau)
TAU_ZERO_TOL = 1e-12


# -- commutator matrices -----------------------------------------------------


@dataclass(frozen=True)
class CommutatorMatrix:
    """Sparse exact matrix of [P, a] over Z x Z."""

    entries: dict

    def trace(self) -> complex:
        return sum(c for (j, k), c in self.entries.items() if j == k)

    def window(self) -> tuple[int, int, int, int]:
        """(row_min, row_max, col_min, col_max) of the support."""
        rows = [j for j, _ in self.entries]
        cols = [k for _, k in self.entries]
        return min(rows), max(rows), min(cols), max(cols)

    def to_dense(self) -> np.ndarray:
        """Dense block over the bounding box of the support."""
        if not self.entries:
            return np.zeros((0, 0), dtype=complex)
        r0, r1, c0, c1 = self.window()
        out = np.zeros((r1 - r0 + 1, c1 - c0 + 1), dtype=complex)
        for (j, k), c in self.entries.items():
            out[j - r0, k - c0] = c
        return out


def commutator_P(a: LaurentPoly) -> CommutatorMatrix:
    """[P, a] for a 1-D symbol: entry (j,k) = coeff(j-k)(1_{j>=0} - 1_{k>=0}).

    Only index pairs straddling 0 survive, so the support is finite with at
    most |s| entries per coefficient at offset s.
    """
    if a.dim != 1:
        raise DimMismatch("commutator_P needs a 1-D symbol")
    entries: dict = {}
    for (s,), c in a.terms.items():
        if s > 0:
            # j = k + s >= 0 > k  ->  indicator difference +1
            for k in range(-s, 0):
                entries[(k + s, k)] = c
        elif s < 0:
            # j = k + s < 0 <= k  ->  indicator difference -1
            for k in range(0, -s):
                entries[(k + s, k)] = -c
    return CommutatorMatrix(entries)


def trace_winding_1d(
    a: LaurentPoly, tol: float = 1e-8, vanish_tol: float = VANISH_TOL
) -> float:
    """tr(a^-1 [P, a]), which equals the winding number of a.

    Reciprocal coefficients are computed to tol / (10 * #entries) so the
    summed trace lands within tol of an integer; if it does not, the
    tolerance bookkeeping failed and NonIntegerTrace is raised.
    """
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the circle (or nearly)")
    comm = commutator_P(a)
    if not comm.entries:
        return 0.0
    n_entries = len(comm.entries)
    window = a.bandwidth()
    recip = reciprocal_coeffs(a, window, tol=tol / (10.0 * n_entries))
    total = 0j
    for (j, k), c in comm.entries.items():
        total += recip.terms.get((k - j,), 0j) * c
    value = total.real
    if abs(total.imag) > tol or abs(value - round(value)) > tol:
        raise NonIntegerTrace(f"trace {total} is not within {tol:.1e} of an integer")
    return value


# -- words and the point character -------------------------------------------


class ProductSymbol:
    """Pointwise product of evaluable factors (used when words are glued)."""

    __slots__ = ("factors",)

    def __init__(self, *factors):
        self.factors = tuple(factors)

    @property
    def dim(self) -> int:
        return self.factors[0].dim if self.factors else 1

    def evaluate(self, point) -> complex:
        out = 1 + 0j
        for f in self.factors:
            out *= f.evaluate(point)
        return out


@dataclass(frozen=True)
class Word:
    """Alternating product f_0 P f_1 P ... P f_n (n >= 0).

    Only the symbol factors are stored; a P separates each consecutive pair.
    """

    factors: tuple

    def __post_init__(self):
        if len(self.factors) < 1:
            raise ValueError("a word needs at least one symbol factor")

    @classmethod
    def projection(cls) -> "Word":
        """The bare projection P, written as 1*P*1."""
        one = LaurentPoly.one(1)
        return cls((one, one))

    @classmethod
    def of(cls, *factors) -> "Word":
        return cls(tuple(factors))

    def __mul__(self, other: "Word") -> "Word":
        glued = ProductSymbol(self.factors[-1], other.factors[0])
        return Word(self.factors[:-1] + (glued,) + other.factors[1:])


@dataclass(frozen=True)
class FormalSum:
    """Finite weighted sum of words."""

    terms: tuple  # of (complex weight, Word)

    @classmethod
    def of(cls, *terms) -> "FormalSum":
        return cls(tuple((complex(w), word) for w, word in terms))

    def __add__(self, other: "FormalSum") -> "FormalSum":
        return FormalSum(self.terms + other.terms)

    def scaled(self, c) -> "FormalSum":
        return FormalSum(tuple((complex(c) * w, word) for w, word in self.terms))


def char_eval(w, lam: float) -> complex:
    """Point character: each symbol factor contributes its value at lam,
    each P contributes 1.  Extends linearly to formal sums."""
    if isinstance(w, FormalSum):
        return sum((weight * char_eval(word, lam) for weight, word in w.terms), 0j)
    out = 1 + 0j
    for f in w.factors:
        out *= f.evaluate((lam,))
    return out


def commutator_sum(x: Word, y: Word) -> FormalSum:
    """xy - yx as a formal sum (always in the kernel of every character)."""
    return FormalSum.of((1.0, x * y), (-1.0, y * x))


# -- classified tensors and the composite trace ------------------------------


@dataclass(frozen=True)
class TensorFactor:
    """One leg of an elementary tensor.

    ``trace`` is the exact finite trace when the leg is trace class (else
    None); ``tau_form`` is a Word or FormalSum used to evaluate the point
    character on the leg.  Commutator-type legs keep a formal-sum form whose
    character value vanishes identically.
    """

    trace: complex | None
    tau_form: object  # Word | FormalSum
    matrix: CommutatorMatrix | None = None

    @property
    def is_trace_class(self) -> bool:
        return self.trace is not None

    def tau(self, lam: float) -> complex:
        return char_eval(self.tau_form, lam)


def bounded_word(*factors) -> TensorFactor:
    return TensorFactor(trace=None, tau_form=Word.of(*factors))


def projection_factor() -> TensorFactor:
    return TensorFactor(trace=None, tau_form=Word.projection())


def commutator_factor(a: LaurentPoly) -> TensorFactor:
    """[P, a]: exact matrix, trace 0 on the diagonal, character value 0."""
    one = LaurentPoly.one(1)
    comm = commutator_P(a)
    form = FormalSum.of((1.0, Word.of(one, a)), (-1.0, Word.of(a, one)))
    return TensorFactor(trace=comm.trace(), tau_form=form, matrix=comm)


def normalized_commutator_factor(a: LaurentPoly, tol: float = 1e-8) -> TensorFactor:
    """a^-1 [P, a]: trace class with trace = winding of a, character value 0."""
    recip = ReciprocalSymbol(a)
    one = LaurentPoly.one(1)
    form = FormalSum.of((1.0, Word.of(recip, a)), (-1.0, Word.of(one, one)))
    return TensorFactor(trace=trace_winding_1d(a, tol=tol), tau_form=form)


@dataclass(frozen=True)
class ClassifiedTensor:
    left: TensorFactor
    right: TensorFactor


def composite_trace(t, theta, lams, tau_zero_tol: float = TAU_ZERO_TOL) -> complex:
    """theta_1 (tr (x) tau) + theta_2 (tau (x) tr) on classified tensors.

    For each summand, (tr (x) tau) is trace(left) * tau(right) when the left
    leg is trace class; when the left leg is merely bounded, the term still
    vanishes provided the right leg is trace class with tau(right) = 0.
    Anything else is outside the computable domain and raises.  The rules
    for (tau (x) tr) mirror these.  Linear over lists of (weight, tensor).
    """
    if isinstance(t, ClassifiedTensor):
        t = [(1.0, t)]
    elif isinstance(t, tuple) and len(t) == 2 and isinstance(t[0], TensorFactor):
        t = [(1.0, ClassifiedTensor(*t))]
    theta1, theta2 = float(theta[0]), float(theta[1])
    lam1, lam2 = float(lams[0]), float(lams[1])
    total = 0j
    for weight, tensor in t:
        if isinstance(tensor, tuple):
            tensor = ClassifiedTensor(*tensor)
        left, right = tensor.left, tensor.right

        if left.is_trace_class:
            term1 = left.trace * right.tau(lam2)
        elif right.is_trace_class and abs(right.tau(lam2)) <= tau_zero_tol:
            term1 = 0j
        else:
            raise Unclassifiable("(tr x tau) undefined on this summand")

        if right.is_trace_class:
            term2 = left.tau(lam1) * right.trace
        elif left.is_trace_class and abs(left.tau(lam1)) <= tau_zero_tol:
            term2 = 0j
        else:
            raise Unclassifiable("(tau x tr) undefined on this summand")

        total += complex(weight) * (theta1 * term1 + theta2 * term2)
    return total


def tensor_index_verify(
    a: LaurentPoly,
    b: LaurentPoly,
    theta,
    lams=(0.7, 1.9),
    tol: float = 1e-9,
) -> tuple[float, float]:
    """Both sides of the product-symbol index identity.

    lhs applies the composite trace to the two-term expansion of
    (a (x) b)^-1 d(a (x) b) / 2, namely

        a^-1[P,a] (x) b^-1 P b  +  P (x) b^-1[P,b];

    rhs is theta_1 * wn(a) + theta_2 * wn(b) from the root-counting route.
    """
    from .winding import winding_exact

    recip_b = ReciprocalSymbol(b)
    expansion = [
        (1.0, ClassifiedTensor(
            normalized_commutator_factor(a, tol=tol),
            bounded_word(recip_b, b),
        )),
        (1.0, ClassifiedTensor(
            projection_factor(),
            normalized_commutator_factor(b, tol=tol),
        )),
    ]
    lhs = composite_trace(expansion, theta, lams).real
    rhs = float(theta[0]) * winding_exact(a) + float(theta[1]) * winding_exact(b)
    return lhs, rhs


def tensor_index_n(omegas, thetas) -> float:
    """Weighted sum sum_i theta_i * omega_i for the n-fold tensor index."""
    omegas = list(omegas)
    thetas = list(thetas)
    if len(omegas) != len(thetas):
        raise LengthMismatch(f"{len(omegas)} windings vs {len(thetas)} weights")
    return float(sum(t * w for t, w in zip(thetas, omegas)))
