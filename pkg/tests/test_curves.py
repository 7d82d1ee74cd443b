import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecfamily import arith, curves
from ecfamily.curves import CurveParams

E11 = CurveParams(1, 1)


def count_ap(a: int, b: int, p: int) -> int:
    """p - #{(x, y) mod p : y^2 = x^3 + a x + b}, by counting squares directly."""
    squares = [0] * p
    for y in range(p):
        squares[y * y % p] += 1
    return p - sum(squares[(x**3 + a * x + b) % p] for x in range(p))


@pytest.mark.parametrize("a,b,expected", [(1, 1, True), (4, 8, False), (9, 27, False)])
def test_in_family(a, b, expected):
    assert curves.in_family_S(CurveParams(a, b)) is expected


def test_family_mask_matches_scalar():
    a, b = np.meshgrid(np.arange(1, 40), np.arange(1, 60), indexing="ij")
    mask = curves.family_mask(a.ravel(), b.ravel())
    ref = [curves.in_family_S(CurveParams(int(x), int(y))) for x, y in zip(a.ravel(), b.ravel())]
    assert mask.tolist() == ref


@pytest.mark.parametrize("p,expected", [(5, -3), (31, -1), (2, 0)])
def test_ap_examples(p, expected):
    assert curves.a_p(E11, p) == expected


@settings(max_examples=60)
@given(st.integers(1, 80), st.integers(1, 80), st.sampled_from([3, 5, 7, 11, 13, 17, 19, 23, 29, 31]))
def test_ap_matches_point_count(a, b, p):
    c = CurveParams(a, b)
    if (4 * a**3 + 27 * b**2) % p:
        assert curves.a_p(c, p) == count_ap(a, b, p)


def test_prime_power_examples():
    assert curves.a_pk(E11, 5, 2) == 4
    assert curves.a_pk(E11, 31, 3) == -1
    assert curves.a_pk(E11, 7, 0) == 1


def test_hecke_recursion():
    for p in (3, 5, 7, 11):
        ap = curves.a_p(E11, p)
        for k in range(2, 6):
            assert curves.a_pk(E11, p, k) == ap * curves.a_pk(E11, p, k - 1) - p * curves.a_pk(E11, p, k - 2)


def test_a_n_examples():
    assert curves.a_n(E11, 1) == 1
    assert curves.a_n(E11, 10) == 0
    assert curves.a_n(E11, 155) == 3


def test_coefficient_block_matches_scalar():
    a = np.array([1, 2, 5, 7, 3])
    b = np.array([1, 3, 9, 11, 25])
    block = curves.coefficient_block(a, b, 200)
    for i in range(a.size):
        c = CurveParams(int(a[i]), int(b[i]))
        assert [curves.a_n(c, n) for n in range(1, 201)] == block[i, 1:].tolist()


def test_coeff_series_exports():
    s = curves.CoeffSeries.build(E11, 10)
    assert s.to_csv().splitlines()[0] == "a,b,n,a_n"
    assert s[5] == -3 and math.isclose(s.lam(5), -3 / math.sqrt(5))


def test_rho_examples():
    assert float(curves.rho_m(E11, 1)) == 1
    assert math.isclose(float(curves.rho_m(E11, 5)), 3 / math.sqrt(5))
    for p in (3, 5, 7):
        assert float(curves.rho_m(E11, p**3)) == 0


def test_rho_is_dirichlet_inverse():
    """sum_{d m = n} (a(d)/d) (rho(m)/sqrt(m)) = [n = 1]."""
    for c in (E11, CurveParams(2, 3), CurveParams(3, 5)):
        for n in range(1, 300):
            total = sum(Fraction(curves.a_n(c, d), d) * curves.rational_rho_over_sqrt(c, n // d)
                        for d in range(1, n + 1) if n % d == 0)
            assert total == (1 if n == 1 else 0)


def test_rho_block_matches_rational():
    a, b = np.array([1, 4, 10]), np.array([1, 7, 21])
    coef = curves.coefficient_block(a, b, 120)
    block = curves.rho_over_sqrt_block(coef, 120, a, b)
    for i in range(3):
        c = CurveParams(int(a[i]), int(b[i]))
        ref = [float(curves.rational_rho_over_sqrt(c, m)) for m in range(1, 121)]
        assert np.allclose(block[i, 1:], ref, atol=1e-14)


def test_root_number_identity_on_samples():
    for a, b in [(1, 1), (2, 3), (4, 5), (1, 7)]:
        c = CurveParams(a, b)
        if arith.is_squarefree(c.D):
            lhs, rhs = curves.root_number_identity(c)
            assert lhs == rhs


def test_root_number_identity_precondition():
    c = next(CurveParams(a, b) for a in range(1, 30) for b in range(1, 30, 2)
             if not arith.is_squarefree(4 * a**3 + 27 * b**2))
    with pytest.raises(curves.PreconditionError):
        curves.root_number_identity(c)


def test_partial_sum_direct_and_small_T():
    T = 100.0
    val = curves.partial_sum_L(E11, T)
    nmax = curves.CutoffKernel().nmax_for(T)
    direct = math.fsum(curves.a_n(E11, n) / n * math.exp(-2 * math.pi * n / T) for n in range(1, nmax + 1))
    assert abs(val - direct) < 1e-8
    assert abs(curves.partial_sum_L(E11, 0.05)) < 1e-50


def test_partial_sum_truncation_invariance():
    T = 60.0
    k = curves.CutoffKernel()
    assert abs(curves.partial_sum_L(E11, T) - curves.partial_sum_L(E11, T, nmax=3 * k.nmax_for(T))) < 1e-8


def test_partial_sum_truncation_error():
    with pytest.raises(curves.TruncationError):
        curves.partial_sum_L(E11, 100.0, nmax=50)


def test_afe_search_unique_and_stable():
    res = curves.afe_consistency_search(E11)
    assert res.separation >= 10
    assert np.ptp(res.candidates[0]["values"]) < 1e-6


def test_afe_rejects_bad_candidate():
    with pytest.raises(curves.PreconditionError):
        curves.afe_consistency_search(E11, [1])


def test_mollifier_spec_and_values():
    with pytest.raises(ValueError):
        curves.MollifierSpec(10.0, (1.0, 1.0))
    spec = curves.MollifierSpec(30.0)
    assert spec.check_normalized()
    a, b = np.array([1, 2]), np.array([1, 3])
    coef = curves.coefficient_block(a, b, 31)
    block = curves.mollifier_block(coef, a, b, spec)
    for i in range(2):
        assert abs(block[i] - curves.mollifier_value(CurveParams(int(a[i]), int(b[i])), spec)) < 1e-12
    assert curves.mollifier_value(E11, curves.MollifierSpec(1.0)) == 1.0
