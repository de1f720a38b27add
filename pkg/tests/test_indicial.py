import math

import numpy as np
import pytest

from qidx.errors import LengthMismatch, Unclassifiable
from qidx.indicial import (
    ClassifiedTensor,
    FormalSum,
    Word,
    bounded_word,
    char_eval,
    commutator_P,
    commutator_factor,
    commutator_sum,
    composite_trace,
    normalized_commutator_factor,
    projection_factor,
    tensor_index_n,
    tensor_index_verify,
    trace_winding_1d,
)
from qidx.symbol import ExpSymbol, LaurentPoly, ReciprocalSymbol
from qidx.winding import winding_exact

from conftest import random_integer_poly, random_invertible_poly

Z = LaurentPoly.monomial(1)
ONE = LaurentPoly.one()
SQRT2 = math.sqrt(2.0)


def _indicator_oracle(a, lo=-12, hi=12):
    """Direct evaluation of coeff(j-k) * (1_{j>=0} - 1_{k>=0})."""
    out = {}
    for j in range(lo, hi + 1):
        for k in range(lo, hi + 1):
            c = a.terms.get((j - k,), 0)
            w = (1 if j >= 0 else 0) - (1 if k >= 0 else 0)
            if c and w:
                out[(j, k)] = c * w
    return out


def test_commutator_constant_is_zero():
    assert commutator_P(ONE).entries == {}


def test_commutator_of_z():
    assert commutator_P(Z).entries == {(0, -1): 1 + 0j}


def test_commutator_of_z_plus_zbar():
    c = commutator_P(Z + LaurentPoly.monomial(-1))
    assert c.entries == {(0, -1): 1 + 0j, (-1, 0): -1 + 0j}


def test_commutator_matches_indicator_oracle():
    rng = np.random.default_rng(211)
    for _ in range(10):
        a = random_integer_poly(rng, max_exp=4)
        assert commutator_P(a).entries == _indicator_oracle(a)


def test_commutator_rank_bound():
    rng = np.random.default_rng(223)
    for _ in range(10):
        a = random_integer_poly(rng, max_exp=4)
        dense = commutator_P(a).to_dense()
        if dense.size == 0:
            continue
        sv = np.linalg.svd(dense, compute_uv=False)
        rank = int(np.sum(sv > 1e-10))
        lo, hi = a.degree_range()
        assert rank <= max(hi, 0) + max(-lo, 0)


def test_trace_winding_examples():
    assert trace_winding_1d(ONE) == 0.0
    # a = z: a^-1 [P, a] is the rank-one projection onto e_{-1}
    assert abs(trace_winding_1d(Z) - 1.0) < 1e-10
    assert abs(trace_winding_1d(ONE + 2 * Z) - winding_exact(ONE + 2 * Z)) < 1e-8


def test_trace_winding_log_additive():
    rng = np.random.default_rng(227)
    for _ in range(10):
        a, _ = random_invertible_poly(rng, margin=0.1)
        b, _ = random_invertible_poly(rng, margin=0.1)
        lhs = trace_winding_1d(a * b)
        assert abs(lhs - trace_winding_1d(a) - trace_winding_1d(b)) < 1e-8


def test_trace_winding_matches_exact_on_corpus():
    rng = np.random.default_rng(229)
    for _ in range(25):
        a, oracle = random_invertible_poly(rng)
        assert abs(trace_winding_1d(a) - oracle) < 1e-8


def test_char_projection_is_one():
    assert char_eval(Word.projection(), 0.37) == 1


def test_char_word_product_of_values():
    w = Word.of(Z, Z)
    assert abs(char_eval(w, math.pi / 2) - (-1)) < 1e-12


def test_char_cancellation():
    phi = LaurentPoly.constant(2) + Z
    w = Word.of(ReciprocalSymbol(phi), phi)
    for lam in (0.0, 1.1, 4.4):
        assert abs(char_eval(w, lam) - 1) < 1e-14


def test_char_multiplicative_on_concatenation():
    rng = np.random.default_rng(233)
    for _ in range(20):
        f1 = [random_integer_poly(rng) + LaurentPoly.constant(4)
              for _ in range(int(rng.integers(1, 4)))]
        f2 = [random_integer_poly(rng) + LaurentPoly.constant(4)
              for _ in range(int(rng.integers(1, 4)))]
        w1, w2 = Word.of(*f1), Word.of(*f2)
        lam = rng.uniform(0, 2 * math.pi)
        prod = char_eval(w1 * w2, lam)
        split = char_eval(w1, lam) * char_eval(w2, lam)
        assert abs(prod - split) <= 1e-12 * (1 + abs(split))


def test_char_exponential_factor():
    import cmath
    w = Word.of(ExpSymbol(Z), Z)
    lam = 0.8
    expected = cmath.exp(cmath.exp(1j * lam)) * cmath.exp(1j * lam)
    assert abs(char_eval(w, lam) - expected) < 1e-12


def test_char_kills_word_commutators():
    rng = np.random.default_rng(239)
    for _ in range(20):
        w1 = Word.of(random_integer_poly(rng), random_integer_poly(rng))
        w2 = Word.of(random_integer_poly(rng))
        lam = rng.uniform(0, 2 * math.pi)
        assert abs(char_eval(commutator_sum(w1, w2), lam)) < 1e-10


def test_composite_trace_normalized_commutator():
    phi = LaurentPoly.constant(2) + Z
    t = ClassifiedTensor(
        normalized_commutator_factor(Z),
        bounded_word(ReciprocalSymbol(phi), phi),
    )
    val = composite_trace(t, (1.0, 1.0), (0.5, 1.5))
    assert abs(val - 1.0) < 1e-10


def test_composite_trace_zero_commutator():
    t = ClassifiedTensor(projection_factor(), commutator_factor(ONE))
    assert composite_trace(t, (2.0, 3.0), (0.5, 1.5)) == 0


def test_composite_trace_projection_times_commutator():
    t = ClassifiedTensor(projection_factor(), normalized_commutator_factor(Z))
    theta = (SQRT2, 5.0)
    val = composite_trace(t, theta, (0.5, 1.5))
    assert abs(val - theta[1]) < 1e-10


def test_composite_trace_unclassifiable():
    t = ClassifiedTensor(bounded_word(Z), bounded_word(Z))
    with pytest.raises(Unclassifiable):
        composite_trace(t, (1.0, 1.0), (0.5, 1.5))


def test_tensor_verify_shift_pair():
    lhs, rhs = tensor_index_verify(Z, Z, (SQRT2, 1.0))
    assert abs(rhs - (SQRT2 + 1)) < 1e-12
    assert abs(lhs - rhs) < 1e-8


def test_tensor_verify_constant_first_factor():
    lhs, rhs = tensor_index_verify(ONE, Z, (SQRT2, 1.0))
    assert abs(rhs - 1.0) < 1e-12
    assert abs(lhs - rhs) < 1e-8


def test_tensor_verify_mixed_windings():
    lhs, rhs = tensor_index_verify(ONE + 2 * Z, LaurentPoly.monomial(-1), (SQRT2, 1.0))
    assert abs(rhs - (SQRT2 - 1)) < 1e-12
    assert abs(lhs - rhs) < 1e-8


def test_tensor_verify_character_independence():
    rng = np.random.default_rng(241)
    a, _ = random_invertible_poly(rng, margin=0.1)
    b, _ = random_invertible_poly(rng, margin=0.1)
    values = []
    for _ in range(5):
        lams = tuple(rng.uniform(0, 2 * math.pi, size=2))
        lhs, _ = tensor_index_verify(a, b, (SQRT2, 1.0), lams=lams)
        values.append(lhs)
    assert max(values) - min(values) < 1e-10


def test_tensor_index_n_formula():
    thetas = (SQRT2, math.sqrt(3.0), 1.0)
    assert abs(tensor_index_n((1, 1, 1), thetas) - sum(thetas)) < 1e-12
    assert tensor_index_n((0, 0, 0), thetas) == 0.0
    assert abs(tensor_index_n((2, -3), (SQRT2, 1.0)) - (2 * SQRT2 - 3)) < 1e-12


def test_tensor_index_n_length_mismatch():
    with pytest.raises(LengthMismatch):
        tensor_index_n((1, 2), (1.0,))


def test_formal_sum_linear():
    s = FormalSum.of((2.0, Word.of(Z)), (1j, Word.projection()))
    lam = 0.9
    expected = 2.0 * Z.evaluate(lam) + 1j
    assert abs(char_eval(s, lam) - expected) < 1e-14
