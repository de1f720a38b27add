import numpy as np

from qidx.symbol import LaurentPoly, exp_poly


def random_invertible_poly(rng, max_inside=3, max_outside=3, kmin_range=(-2, 2),
                           margin=0.05):
    """Random 1-D Laurent symbol with all roots at least ``margin`` away from
    the unit circle.

    Returns (poly, winding): the winding number equals (# roots placed inside
    the disk) + k_min by construction, which is the independent oracle the
    winding tests are checked against.
    """
    n_in = int(rng.integers(0, max_inside + 1))
    n_out = int(rng.integers(0, max_outside + 1))
    kmin = int(rng.integers(kmin_range[0], kmin_range[1] + 1))
    radii = np.concatenate([
        rng.uniform(0.05, 1.0 - margin, n_in),
        rng.uniform(1.0 + margin, 3.0, n_out),
    ])
    angles = rng.uniform(0.0, 2.0 * np.pi, n_in + n_out)
    roots = radii * np.exp(1j * angles)
    coeffs = np.array([1.0 + 0j])
    for r in roots:
        coeffs = np.convolve(coeffs, np.array([-r, 1.0]))  # (z - r), ascending
    coeffs = coeffs / np.max(np.abs(coeffs))
    terms = {(kmin + i,): c for i, c in enumerate(coeffs) if c != 0}
    return LaurentPoly(1, terms), n_in + kmin


def random_integer_poly(rng, dim=1, n_terms=4, max_exp=3, max_coeff=5):
    """Random symbol with small Gaussian-integer coefficients (exact in
    doubles, so algebra identities can be asserted exactly)."""
    terms = {}
    for _ in range(n_terms):
        k = tuple(int(rng.integers(-max_exp, max_exp + 1)) for _ in range(dim))
        c = complex(int(rng.integers(-max_coeff, max_coeff + 1)),
                    int(rng.integers(-max_coeff, max_coeff + 1)))
        terms[k] = terms.get(k, 0) + c
    return LaurentPoly(dim, terms)


def random_torus2_invertible(rng, max_exp=3, psi_scale=0.2, psi_terms=3):
    """Random invertible dim-2 symbol z1^m z2^n exp(psi) with small psi.

    Returns (poly, m, n): the exponents are the construction oracle.
    """
    m = int(rng.integers(-max_exp, max_exp + 1))
    n = int(rng.integers(-max_exp, max_exp + 1))
    psi_map = {}
    for _ in range(psi_terms):
        k = (int(rng.integers(-2, 3)), int(rng.integers(-2, 3)))
        c = psi_scale * (rng.normal() + 1j * rng.normal())
        psi_map[k] = psi_map.get(k, 0) + c
    psi = LaurentPoly(2, psi_map)
    poly = LaurentPoly.monomial((m, n)) * exp_poly(psi, atol=1e-12)
    return poly, m, n
