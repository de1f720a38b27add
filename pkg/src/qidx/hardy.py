"""Exact rectangular finite sections of Toeplitz operators on the Hardy
spaces of the circle and the 2-torus, with numerical Fredholm oracles.

Sections are rectangular, not square: the row set always contains every
index reachable from the column set through the symbol's support, so the
matrix reproduces the infinite operator exactly on vectors supported in the
column window.  Kernel and cokernel counts read off such sections are the
true ones once the window clears the symbol bandwidth; square sections of
a nonzero-winding symbol would show artifact kernels instead.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousRank,
    DimMismatch,
    NoConvergence,
    NotInvertibleOnTorus,
    SeriesDivergence,
    SizeLimit,
)
from .symbol import (
    VANISH_TOL,
    LaurentPoly,
    exp_poly,
    min_modulus,
    reciprocal_coeffs,
)

#: default cap on the number of columns of a 2-D section
MAX_COLS_DEFAULT = 4096

#: coefficient threshold for the exponential series used by the weak check;
#: deep enough that the residual tail stays resolvable in doubles
WEAK_SERIES_ATOL = 1e-40


def _max_cols() -> int:
    return int(os.environ.get("QIDX_MAX_COLS", MAX_COLS_DEFAULT))


@dataclass(frozen=True)
class ToeplitzSection:
    """Rectangular window of a Toeplitz matrix; entry((j),(k)) = coeff(j-k).

    ``symbol`` keeps the generating coefficient map so oracles can form the
    adjoint section; hand-built sections may leave it None.
    """

    row_index: tuple
    col_index: tuple
    data: np.ndarray
    symbol_band: tuple
    symbol: LaurentPoly | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def dump(self, path: str):
        """Dense text dump, one row per line of whitespace-separated
        're imag' pairs."""
        with open(path, "w") as fh:
            for row in self.data:
                fh.write(" ".join(f"{c.real:.17g} {c.imag:.17g}" for c in row))
                fh.write("\n")


@dataclass(frozen=True)
class KernelReport:
    ker_dim: int
    coker_dim: int
    sigma_gap: float


def _dense_toeplitz_1d(a: LaurentPoly, rows: range, cols: range) -> np.ndarray:
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    r0 = rows.start
    for (s,), c in a.terms.items():
        for pos, k in enumerate(cols):
            j = k + s
            if rows.start <= j < rows.stop:
                out[j - r0, pos] = c
    return out


def toeplitz_section_1d(a: LaurentPoly, M: int) -> ToeplitzSection:
    """Columns 0..M, rows 0..M+deg_max: exact on vectors supported in [0, M]."""
    if a.dim != 1:
        raise DimMismatch("toeplitz_section_1d needs a 1-D symbol")
    M = int(M)
    band = a.bandwidth()
    if M < band:
        raise ValueError(f"M = {M} is below the symbol bandwidth {band}")
    return _rect_section_1d(a, M)


def _rect_section_1d(a: LaurentPoly, M: int) -> ToeplitzSection:
    _, hi = a.degree_range()
    rows = range(0, max(M + hi, -1) + 1)
    cols = range(0, M + 1)
    return ToeplitzSection(
        row_index=tuple(rows),
        col_index=tuple(cols),
        data=_dense_toeplitz_1d(a, rows, cols),
        symbol_band=(a.bandwidth(),),
        symbol=a,
    )


def toeplitz_section_2d(a: LaurentPoly, M: int, max_cols: int | None = None) -> ToeplitzSection:
    """Columns {0..M}^2, rows enlarged per coordinate to cover the image."""
    if a.dim != 2:
        raise DimMismatch("toeplitz_section_2d needs a dim-2 symbol")
    M = int(M)
    band = (a.bandwidth(0), a.bandwidth(1))
    if M < max(band):
        raise ValueError(f"M = {M} is below the symbol bandwidth {max(band)}")
    cap = _max_cols() if max_cols is None else int(max_cols)
    if (M + 1) ** 2 > cap:
        raise SizeLimit(f"(M+1)^2 = {(M + 1) ** 2} exceeds the column cap {cap}")
    return _rect_section_2d(a, M)


def _rect_section_2d(a: LaurentPoly, M: int) -> ToeplitzSection:
    hi1 = a.degree_range(0)[1]
    hi2 = a.degree_range(1)[1]
    band = (a.bandwidth(0), a.bandwidth(1))
    r1 = max(M + hi1, -1) + 1
    r2 = max(M + hi2, -1) + 1
    rows = tuple(itertools.product(range(r1), range(r2)))
    cols = tuple(itertools.product(range(M + 1), range(M + 1)))
    row_pos = {rc: i for i, rc in enumerate(rows)}
    out = np.zeros((len(rows), len(cols)), dtype=complex)
    for (s1, s2), c in a.terms.items():
        for pos, (k1, k2) in enumerate(cols):
            j = (k1 + s1, k2 + s2)
            i = row_pos.get(j)
            if i is not None:
                out[i, pos] = c
    return ToeplitzSection(
        row_index=rows, col_index=cols, data=out, symbol_band=band, symbol=a
    )


def _rank_and_gap(data: np.ndarray, rank_tol: float) -> tuple[int, float]:
    """Numerical rank plus the kept/dropped singular value ratio.

    Singular values are padded with zeros up to the column count, so a wide
    matrix reports its full null space.
    """
    n_rows, n_cols = data.shape
    sigma = np.zeros(max(n_cols, 1))
    if n_rows and n_cols:
        sv = np.linalg.svd(data, compute_uv=False)
        sigma[: sv.size] = sv
    sigma_max = float(sigma[0]) if sigma.size else 0.0
    if sigma_max == 0.0:
        return 0, float("inf")
    rank = int(np.sum(sigma > rank_tol * sigma_max))
    dropped = float(sigma[rank]) if rank < sigma.size else 0.0
    gap = float("inf") if dropped == 0.0 else float(sigma[rank - 1]) / dropped
    return rank, gap


def kernel_cokernel_oracle(s: ToeplitzSection, rank_tol: float = 1e-8) -> KernelReport:
    """Numerical Fredholm data of the operator behind a finite section.

    The kernel count is the section's column count minus its numerical rank.
    The cokernel of the operator equals the kernel of its adjoint, whose
    symbol is the pointwise conjugate, so it is read off the rank of the
    conjugate symbol's section over the same column window (a plain row
    count would charge the rectangular row surplus to the cokernel).  The
    report is refused unless kept and dropped singular values are separated
    by a factor of 10 on both sides.
    """
    rank, gap = _rank_and_gap(s.data, rank_tol)
    ker_dim = s.data.shape[1] - rank
    if s.symbol is None:
        coker_dim = s.data.shape[0] - rank
    else:
        conj = s.symbol.conj()
        if conj.dim == 1:
            m = int(s.col_index[-1])
            adj = _rect_section_1d(conj, m)
        else:
            m = int(s.col_index[-1][0])
            adj = _rect_section_2d(conj, m)
        rank_adj, gap_adj = _rank_and_gap(adj.data, rank_tol)
        coker_dim = adj.data.shape[1] - rank_adj
        gap = min(gap, gap_adj)
    if gap < 10.0:
        raise AmbiguousRank(
            f"singular gap {gap:.2f} < 10 (tol {rank_tol:.1e})"
        )
    return KernelReport(ker_dim=ker_dim, coker_dim=coker_dim, sigma_gap=gap)


def partial_inverse_index_1d(
    a: LaurentPoly,
    M: int = 32,
    W: int = 32,
    agree_tol: float = 1e-8,
    M_cap: int = 1024,
    vanish_tol: float = VANISH_TOL,
) -> float:
    """Trace of the [0..M]^2 block of T_a T_b - T_b T_a with b = 1/a.

    The block trace is computed exactly for the windowed reciprocal; M and W
    are doubled together until two successive values agree to agree_tol.
    The limit is minus the winding number of a.
    """
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the circle (or nearly)")
    M, W = int(M), int(W)
    prev = _block_trace_defect(a, M, W)
    while True:
        if 2 * M > M_cap:
            raise NoConvergence(
                f"block traces did not stabilize to {agree_tol:.1e} by M = {M}"
            )
        M *= 2
        W *= 2
        cur = _block_trace_defect(a, M, W)
        if abs(cur - prev) < agree_tol:
            if abs(cur.imag) > 1e-8:
                raise NoConvergence(f"trace has imaginary part {cur.imag:.3e}")
            return float(cur.real)
        prev = cur


def _block_trace_defect(a: LaurentPoly, M: int, W: int) -> complex:
    b = reciprocal_coeffs(a, W, tol=1e-12)
    band = a.bandwidth()
    K = M + W + band
    rows_m, rows_k = range(0, M + 1), range(0, K + 1)
    A_top = _dense_toeplitz_1d(a, rows_m, rows_k)    # (M+1) x (K+1)
    B_side = _dense_toeplitz_1d(b, rows_k, rows_m)   # (K+1) x (M+1)
    B_top = _dense_toeplitz_1d(b, rows_m, rows_k)
    A_side = _dense_toeplitz_1d(a, rows_k, rows_m)
    t_ab = np.einsum("ij,ji->", A_top, B_side)
    t_ba = np.einsum("ij,ji->", B_top, A_side)
    return complex(t_ab - t_ba)


def noncompact_witness(M: int) -> np.ndarray:
    """Singular values of the section of [P, z] (x) P on [-1..M] x [0..M].

    Exactly M+1 of them equal 1: the multiplicity grows without bound with
    the window, so the operator cannot be compact and the plain product
    trace cannot see tensor symbols like z (x) 1.
    """
    M = int(M)
    if M < 0:
        raise ValueError("M must be >= 0")
    left = np.zeros((M + 2, M + 2), dtype=complex)  # indices -1..M
    left[1, 0] = 1.0  # entry (0, -1) of [P, z]
    right = np.eye(M + 1, dtype=complex)            # P on 0..M
    sv = np.linalg.svd(np.kron(left, right), compute_uv=False)
    return np.sort(sv)[::-1]


def weak_invertibility_check(
    psi: LaurentPoly,
    M: int,
    ks,
    series_atol: float = WEAK_SERIES_ATOL,
) -> list[float]:
    """Residuals of T_{exp(psi)} against exp(T_psi) on the diagonal basis.

    Both exponentials use the same term recurrence (t_n = t_{n-1} * x / n,
    stop once max|t_n| <= series_atol), so wherever the finite section
    represents the infinite operator exactly the two columns cancel without
    rounding noise.  r_k is the norm of the difference applied to the
    diagonal basis vector k steps inside the truncation edge, at site
    (M-k, M-k); the residuals decay as the site recedes from the edge,
    witnessing that the two exponentials agree modulo an operator that
    vanishes along the tail of the diagonal.
    """
    if psi.dim != 2:
        raise DimMismatch("weak_invertibility_check needs a dim-2 symbol")
    M = int(M)
    band = max(psi.bandwidth(0), psi.bandwidth(1))
    ks = [int(k) for k in ks]
    for k in ks:
        if not 0 <= k <= M - band:
            raise ValueError(f"k = {k} outside [0, M - bandwidth] = [0, {M - band}]")

    symbol_exp = exp_poly(psi, atol=series_atol)
    section = _rect_section_2d(symbol_exp, M)
    col_pos = {kc: i for i, kc in enumerate(section.col_index)}

    square = _dense_square_2d(psi, M)
    exp_square = _exp_series_matrix(square, series_atol)

    # exp_square lives on the square {0..M}^2 block, ordered like col_index
    residuals = []
    for k in ks:
        d = M - k
        pos = col_pos[(d, d)]
        diff = dict(zip(section.row_index, section.data[:, pos]))
        for rc, v in zip(section.col_index, exp_square[:, pos]):
            diff[rc] = diff.get(rc, 0j) - v
        residuals.append(float(np.linalg.norm(list(diff.values()))))
    return residuals


def _dense_square_2d(a: LaurentPoly, M: int) -> np.ndarray:
    index = tuple(itertools.product(range(M + 1), range(M + 1)))
    pos = {rc: i for i, rc in enumerate(index)}
    out = np.zeros((len(index), len(index)), dtype=complex)
    for (s1, s2), c in a.terms.items():
        for p, (k1, k2) in enumerate(index):
            q = pos.get((k1 + s1, k2 + s2))
            if q is not None:
                out[q, p] = c
    return out


def _exp_series_matrix(x: np.ndarray, atol: float, max_terms: int = 400) -> np.ndarray:
    # same term recurrence (and the same scaling operation) as exp_poly, so
    # entries match the symbol-series coefficients bit for bit
    acc = np.eye(x.shape[0], dtype=complex)
    term = np.eye(x.shape[0], dtype=complex)
    for n in range(1, max_terms + 1):
        term = term @ x
        term = term * (1.0 / n)
        acc = acc + term
        m = float(np.max(np.abs(term)))
        if m <= atol:
            return acc
        if m > 1e12:
            raise SeriesDivergence(f"matrix exp series term grew to {m:.3e}")
    raise SeriesDivergence(
        f"matrix exp series did not reach {atol:.1e} in {max_terms} terms"
    )


def cokernel_growth_demo(a: LaurentPoly, Ms, vanish_tol: float = VANISH_TOL) -> list[int]:
    """Cokernel dimensions of the 2-D sections at each truncation size.

    For an invertible symbol with nonzero exponents (such as z1) the counts
    grow without bound: the operator is not Fredholm in the classical sense
    even though the weighted index theory assigns it a finite index.
    """
    if min_modulus(a) <= vanish_tol:
        raise NotInvertibleOnTorus("symbol vanishes on the torus (or nearly)")
    return [
        kernel_cokernel_oracle(toeplitz_section_2d(a, int(M))).coker_dim for M in Ms
    ]
