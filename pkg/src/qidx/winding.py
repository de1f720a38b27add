"""Winding numbers and the monomial-times-exponential decomposition.

Two independent routes to the winding number of a nowhere-zero loop:

  * ``winding_exact``  — factor a = z^k_min * p(z) and count the roots of p
    inside the open unit disk (companion-matrix eigenvalues), so the answer
    is a certified integer whenever no root sits in the guard band around
    the circle;
  * ``winding_sampled`` — accumulate principal-branch phase increments
    around the sampled loop and divide by 2*pi.

On the 2-torus an invertible symbol factors uniquely as

    a = z1^m * z2^n * exp(psi),   psi continuous,

and ``decompose_torus2`` recovers (m, n) from slice windings and psi by
2-D phase unwrapping of log(a * z1^-m * z2^-n), with plaquette and
periodic-wrap closure checks guarding against hidden zeros.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DimMismatch,
    NotInvertibleOnTorus,
    PhaseStepTooLarge,
    ResidualTooLarge,
    RootOnCircle,
    UnwrapClosureFailure,
)
from .symbol import VANISH_TOL, GridSamples, LaurentPoly, min_modulus

#: roots closer than this to the unit circle make the exact count ambiguous
CIRCLE_GUARD = 1e-7

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DecompositionResult:
    """Exponents (m, n) and the grid of psi with its Fourier tail estimate."""

    m: int
    n: int
    psi_grid: GridSamples
    psi_tail: float
    recon_error: float


def winding_exact(a: LaurentPoly, vanish_tol: float = VANISH_TOL) -> int:
    """Winding number of a 1-D Laurent symbol via polynomial roots.

    Writes a = z^k_min * p(z) with p(0) != 0 and returns k_min plus the
    number of roots of p in the open unit disk (with multiplicity).
    """
    if a.dim != 1:
        raise DimMismatch("winding_exact needs a 1-D symbol")
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the circle (or nearly)")
    lo, hi = a.degree_range()
    if lo == hi:
        return lo
    # coefficients of p, ascending in z, p[0] = coeff at z^lo != 0
    coeffs = np.zeros(hi - lo + 1, dtype=complex)
    for (k,), c in a.terms.items():
        coeffs[k - lo] = c
    roots = np.roots(coeffs[::-1])
    radii = np.abs(roots)
    if np.any(np.abs(radii - 1.0) < CIRCLE_GUARD):
        raise RootOnCircle(
            "a root lies within the guard band around the unit circle"
        )
    return lo + int(np.sum(radii < 1.0))


def winding_sampled(samples) -> int:
    """Winding number from 1-D loop samples by phase-increment summation.

    Every principal-branch step must stay below pi/2, otherwise the loop is
    undersampled and the caller has to resample at double density.  The
    accumulated phase must land within 0.1 turns of an integer.
    """
    values = samples.values if isinstance(samples, GridSamples) else np.asarray(samples)
    values = values.ravel()
    if values.size < 4:
        raise PhaseStepTooLarge("need at least 4 samples around the loop")
    if np.any(np.abs(values) == 0.0):
        raise ResidualTooLarge("a sample is exactly zero")
    phases = np.angle(values)
    steps = _wrap(np.diff(phases, append=phases[:1]))
    if float(np.max(np.abs(steps))) >= math.pi / 2:
        raise PhaseStepTooLarge("phase step >= pi/2, resample at double density")
    turns = float(np.sum(steps)) / _TWO_PI
    wn = round(turns)
    if abs(turns - wn) >= 0.1:
        raise ResidualTooLarge(
            f"accumulated phase {turns:.4f} turns is not close to an integer"
        )
    return int(wn)


def _wrap(x: np.ndarray) -> np.ndarray:
    """Reduce angles to the principal branch (-pi, pi]."""
    return x - _TWO_PI * np.round(x / _TWO_PI)


def winding_of_slice(a: LaurentPoly, n0: int = 64, n_max: int = 1 << 16) -> int:
    """Sampled winding of a 1-D symbol with automatic grid doubling."""
    n = max(n0, 8 * (a.bandwidth() + 1))
    while True:
        try:
            return winding_sampled(a.sample((n,)))
        except PhaseStepTooLarge:
            if n >= n_max:
                raise
            n *= 2


def winding_vector_n(a: LaurentPoly, vanish_tol: float = VANISH_TOL) -> tuple[int, ...]:
    """Slice windings (one per coordinate, other angles held at 0)."""
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the torus (or nearly)")
    zeros = (0.0,) * (a.dim - 1)
    return tuple(winding_of_slice(a.collapse(axis, zeros)) for axis in range(a.dim))


def decompose_torus2(
    a: LaurentPoly,
    grid: tuple[int, int] = (256, 256),
    grid_max: int = 4096,
    vanish_tol: float = VANISH_TOL,
) -> DecompositionResult:
    """Split an invertible dim-2 symbol as z1^m z2^n exp(psi).

    m and n are the windings of the coordinate slices lam1 -> a(lam1, 0)
    and lam2 -> a(0, lam2).  psi is the 2-D unwrapped logarithm of
    g = a * z1^-m * z2^-n: the phase is unwrapped along the first row and
    then down each column, and the result is accepted only if every
    elementary plaquette and both periodic wraps close to zero.
    """
    if a.dim != 2:
        raise DimMismatch("decompose_torus2 needs a dim-2 symbol")
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the torus (or nearly)")
    m = winding_of_slice(a.collapse(0, (0.0,)))
    n = winding_of_slice(a.collapse(1, (0.0,)))
    g = a * LaurentPoly.monomial((-m, -n))

    k1, k2 = (int(x) for x in grid)
    failure: Exception = PhaseStepTooLarge("grid refinement exhausted")
    while True:
        vals = g.sample((k1, k2)).values
        w = np.angle(vals)
        d1 = _wrap(np.roll(w, -1, axis=0) - w)   # step in lam1
        d2 = _wrap(np.roll(w, -1, axis=1) - w)   # step in lam2
        step = max(float(np.max(np.abs(d1))), float(np.max(np.abs(d2))))
        if step >= math.pi / 2:
            failure = PhaseStepTooLarge(
                f"phase step {step:.3f} >= pi/2 on {k1}x{k2} grid"
            )
        else:
            # plaquette closure: the wrapped gradient field must be curl-free
            curl = d1 + np.roll(d2, -1, axis=0) - np.roll(d1, -1, axis=1) - d2
            wrap1 = np.abs(d1.sum(axis=0))   # every vertical periodic loop
            wrap2 = np.abs(d2.sum(axis=1))   # every horizontal periodic loop
            worst = max(
                float(np.max(np.abs(curl))),
                float(np.max(wrap1)),
                float(np.max(wrap2)),
            )
            if worst > math.pi:
                failure = UnwrapClosureFailure(
                    f"plaquette/wrap residual {worst:.3f} on {k1}x{k2} grid"
                )
            else:
                break
        if 2 * max(k1, k2) > grid_max:
            raise failure
        k1 *= 2
        k2 *= 2

    # unwrap: first row by cumulative wrapped steps, then down each column
    u = np.empty((k1, k2))
    u[0, 0] = w[0, 0]
    u[0, 1:] = w[0, 0] + np.cumsum(d2[0, :-1])
    u[1:, :] = u[0, :][None, :] + np.cumsum(d1[:-1, :], axis=0)
    psi = np.log(np.abs(vals)) + 1j * u

    lam1 = _TWO_PI * np.arange(k1) / k1
    lam2 = _TWO_PI * np.arange(k2) / k2
    chi = np.exp(1j * m * lam1)[:, None] * np.exp(1j * n * lam2)[None, :]
    recon = float(np.max(np.abs(np.exp(psi) * chi - a.sample((k1, k2)).values)))
    if recon > 1e-8:
        raise UnwrapClosureFailure(f"reconstruction error {recon:.3e} exceeds 1e-8")

    return DecompositionResult(
        m=int(m),
        n=int(n),
        psi_grid=GridSamples((k1, k2), psi),
        psi_tail=_fourier_tail(psi),
        recon_error=recon,
    )


def _fourier_tail(values: np.ndarray) -> float:
    """Sum of |Fourier coefficients| outside the inner half band: an upper
    estimate for the sup error of the degree-(K/4) trigonometric fit."""
    k1, k2 = values.shape
    coeffs = np.fft.fft2(values) / (k1 * k2)
    f1 = np.abs(np.fft.fftfreq(k1, d=1.0 / k1).astype(int))
    f2 = np.abs(np.fft.fftfreq(k2, d=1.0 / k2).astype(int))
    outer = (f1[:, None] > k1 // 4) | (f2[None, :] > k2 // 4)
    return float(np.sum(np.abs(coeffs[outer])))
