import numpy as np
import pytest

from qidx.errors import AmbiguousRank, NotInvertibleOnTorus, SizeLimit
from qidx.hardy import (
    KernelReport,
    ToeplitzSection,
    cokernel_growth_demo,
    kernel_cokernel_oracle,
    noncompact_witness,
    partial_inverse_index_1d,
    toeplitz_section_1d,
    toeplitz_section_2d,
    weak_invertibility_check,
)
from qidx.indicial import trace_winding_1d
from qidx.symbol import LaurentPoly, exp_poly
from qidx.winding import winding_exact

from conftest import random_integer_poly, random_invertible_poly

Z = LaurentPoly.monomial(1)
ONE = LaurentPoly.one()


def test_section_shift_squared():
    s = toeplitz_section_1d(LaurentPoly.monomial(2), 4)
    assert s.shape == (7, 5)
    expected = np.zeros((7, 5))
    for k in range(5):
        expected[k + 2, k] = 1.0
    assert np.array_equal(s.data, expected)


def test_section_identity():
    s = toeplitz_section_1d(ONE, 3)
    assert np.array_equal(s.data, np.eye(4))


def test_section_one_plus_2z():
    s = toeplitz_section_1d(ONE + 2 * Z, 2)
    expected = np.array([[1, 0, 0], [2, 1, 0], [0, 2, 1], [0, 0, 2]], dtype=complex)
    assert np.array_equal(s.data, expected)


def test_section_entries_are_coefficients():
    rng = np.random.default_rng(307)
    a = random_integer_poly(rng, max_exp=3)
    s = toeplitz_section_1d(a, 6)
    for i, j in enumerate(s.row_index):
        for p, k in enumerate(s.col_index):
            assert s.data[i, p] == a.terms.get((j - k,), 0)


def test_section_rectangular_exactness():
    # section @ v must equal the nonnegative part of the product symbol a * v
    rng = np.random.default_rng(311)
    for _ in range(10):
        a = random_integer_poly(rng, max_exp=3)
        M = 6
        s = toeplitz_section_1d(a, M)
        v = rng.integers(-4, 5, size=M + 1).astype(complex)
        v_poly = LaurentPoly(1, {(k,): v[k] for k in range(M + 1)})
        prod = a * v_poly
        got = s.data @ v
        for i, j in enumerate(s.row_index):
            assert abs(got[i] - prod.terms.get((j,), 0)) < 1e-12


def test_section_2d_shift_first_coordinate():
    s = toeplitz_section_2d(LaurentPoly.monomial((1, 0)), 2)
    assert s.shape == ((2 + 2) * (2 + 1), (2 + 1) ** 2)
    rep = kernel_cokernel_oracle(s)
    assert rep.ker_dim == 0


def test_section_2d_identity():
    s = toeplitz_section_2d(LaurentPoly.one(2), 2)
    assert np.array_equal(s.data, np.eye(9))


def test_section_2d_double_shift():
    s = toeplitz_section_2d(LaurentPoly.monomial((1, 1)), 1)
    col = {kc: p for p, kc in enumerate(s.col_index)}
    row = {rc: i for i, rc in enumerate(s.row_index)}
    for k1, k2 in s.col_index:
        i = row[(k1 + 1, k2 + 1)]
        assert s.data[i, col[(k1, k2)]] == 1
    assert int(np.count_nonzero(s.data)) == len(s.col_index)


def test_section_2d_size_limit(monkeypatch):
    with pytest.raises(SizeLimit):
        toeplitz_section_2d(LaurentPoly.one(2), 64)
    monkeypatch.setenv("QIDX_MAX_COLS", "8000")
    toeplitz_section_2d(LaurentPoly.one(2), 64)


def test_oracle_shift_squared():
    rep = kernel_cokernel_oracle(toeplitz_section_1d(LaurentPoly.monomial(2), 32))
    assert (rep.ker_dim, rep.coker_dim) == (0, 2)


def test_oracle_adjoint_shift():
    rep = kernel_cokernel_oracle(toeplitz_section_1d(LaurentPoly.monomial(-1), 32))
    assert (rep.ker_dim, rep.coker_dim) == (1, 0)


def test_oracle_winding_one():
    rep = kernel_cokernel_oracle(toeplitz_section_1d(ONE + 2 * Z, 32))
    assert (rep.ker_dim, rep.coker_dim) == (0, 1)


def test_oracle_matches_winding_signs():
    # kernel vectors decay like (root margin)^-M, so the window must be
    # large enough that the truncated tail drops below rank_tol
    rng = np.random.default_rng(313)
    for _ in range(8):
        a, wn = random_invertible_poly(rng, margin=0.5)
        rep = kernel_cokernel_oracle(toeplitz_section_1d(a, 96))
        assert rep.ker_dim == max(-wn, 0)
        assert rep.coker_dim == max(wn, 0)


def test_oracle_stabilizes_under_doubling():
    rng = np.random.default_rng(317)
    for _ in range(5):
        a, _ = random_invertible_poly(rng, margin=0.1)
        r1 = kernel_cokernel_oracle(toeplitz_section_1d(a, 256))
        r2 = kernel_cokernel_oracle(toeplitz_section_1d(a, 512))
        assert (r1.ker_dim, r1.coker_dim) == (r2.ker_dim, r2.coker_dim)


def test_oracle_ambiguous_rank():
    data = np.diag([1.0, 2e-8, 3e-9]).astype(complex)
    s = ToeplitzSection(row_index=(0, 1, 2), col_index=(0, 1, 2),
                        data=data, symbol_band=(0,))
    with pytest.raises(AmbiguousRank):
        kernel_cokernel_oracle(s)


def test_oracle_zero_matrix():
    s = ToeplitzSection(row_index=(0, 1), col_index=(0,),
                        data=np.zeros((2, 1), dtype=complex), symbol_band=(0,))
    rep = kernel_cokernel_oracle(s)
    assert rep == KernelReport(ker_dim=1, coker_dim=2, sigma_gap=float("inf"))


def test_partial_inverse_shift():
    # T_z T_{1/z} = I minus the rank-one at e_0, so the defect trace is -1
    assert abs(partial_inverse_index_1d(Z) + 1) < 1e-9


def test_partial_inverse_identity():
    assert partial_inverse_index_1d(ONE) == 0.0


def test_partial_inverse_winding_zero():
    a = LaurentPoly(1, {(-1,): 1.5, (0,): -3.5, (1,): 1.0})
    assert abs(partial_inverse_index_1d(a)) < 1e-6


def test_partial_inverse_rejects_vanishing():
    with pytest.raises(NotInvertibleOnTorus):
        partial_inverse_index_1d(Z - ONE)


def test_three_routes_agree():
    rng = np.random.default_rng(331)
    for _ in range(5):
        a, wn = random_invertible_poly(rng, margin=0.1)
        assert winding_exact(a) == wn
        assert abs(trace_winding_1d(a) - wn) < 1e-8
        assert abs(partial_inverse_index_1d(a, M=16, W=16) + wn) < 1e-6


def test_noncompact_witness_counts():
    for M in (0, 1, 8):
        sv = noncompact_witness(M)
        assert sv.size == (M + 2) * (M + 1)
        assert int(np.sum(np.abs(sv - 1.0) < 1e-12)) == M + 1
        assert float(np.max(sv[M + 1:], initial=0.0)) < 1e-12


def test_weak_check_zero_symbol():
    r = weak_invertibility_check(LaurentPoly.zero(2), 24, [4, 8, 16, 20])
    assert r == [0.0, 0.0, 0.0, 0.0]


def test_weak_check_first_coordinate():
    psi = LaurentPoly.monomial((1, 0), 0.3)
    r = weak_invertibility_check(psi, 24, [4, 8, 16, 20])
    assert all(a > b for a, b in zip(r, r[1:]))
    assert r[-1] < 1e-3


def test_weak_check_second_coordinate_symmetric():
    psi = LaurentPoly.monomial((0, 1), 0.2)
    r = weak_invertibility_check(psi, 24, [4, 8, 16, 20])
    assert all(a > b for a, b in zip(r, r[1:]))
    assert r[-1] < 1e-3


def test_weak_check_rejects_bad_sites():
    psi = LaurentPoly.monomial((1, 0), 0.3)
    with pytest.raises(ValueError):
        weak_invertibility_check(psi, 24, [24])


def test_cokernel_growth_pure_shift():
    z1 = LaurentPoly.monomial((1, 0))
    assert cokernel_growth_demo(z1, (4, 8, 16)) == [5, 9, 17]


def test_cokernel_growth_identity():
    assert cokernel_growth_demo(LaurentPoly.one(2), (4, 8, 16)) == [0, 0, 0]


def test_cokernel_growth_exponential():
    e = exp_poly(LaurentPoly.monomial((1, 0), 0.3), atol=1e-12)
    assert cokernel_growth_demo(e, (16, 20)) == [0, 0]


def test_section_dump_round_trip(tmp_path):
    s = toeplitz_section_1d(ONE + 2 * Z, 2)
    path = tmp_path / "section.txt"
    s.dump(str(path))
    rows = []
    for line in path.read_text().splitlines():
        nums = [float(x) for x in line.split()]
        rows.append([complex(a, b) for a, b in zip(nums[::2], nums[1::2])])
    assert np.array_equal(np.array(rows), s.data)
