import math
from fractions import Fraction

import numpy as np
import pytest

from ecfamily import arith, charsums, curves


def _ap_bad_or_good(al: int, be: int, p: int) -> tuple[int, bool]:
    """a(p) by point counting; the count formula also covers p | Delta."""
    sq = [0] * p
    for y in range(p):
        sq[y * y % p] += 1
    ap = p - sum(sq[(x**3 + al * x + be) % p] for x in range(p))
    return ap, (4 * al**3 + 27 * be**2) % p != 0


def _apk(ap: int, good: bool, p: int, k: int) -> int:
    prev, cur = 1, ap
    if k == 0:
        return 1
    for _ in range(k - 1):
        prev, cur = cur, ap * cur - (p * prev if good else 0)
    return cur


def brute_scaled_Q(r: int) -> int:
    """sum over (alpha, beta) mod r* of the integer a(r), from point counts."""
    rstar = arith.radical(r)
    total = 0
    for al in range(rstar):
        for be in range(rstar):
            v = 1
            for p, k in arith.factorize(r):
                ap, good = _ap_bad_or_good(al % p, be % p, p)
                v *= _apk(ap, good, p, k)
            total += v
    return total


@pytest.mark.parametrize("r", [5, 25, 9, 45, 27])
def test_Q_against_scalar_oracle(r):
    assert charsums.Q(r).scaled_value == brute_scaled_Q(r)


@pytest.mark.parametrize("r,t", [(5, 1), (25, 1), (5, 5)])
def test_Q_spec_zeros(r, t):
    assert charsums.Q_t(r, t).scaled_value == 0


def test_Q_prime_exact_integer():
    q = charsums.Q_prime(3, 81)
    assert isinstance(q.scaled_value, int)


@pytest.mark.parametrize("r,t", [(15, 1), (15, 3), (45, 5), (63, 1), (75, 3), (225, 15)])
def test_Q_multiplicative(r, t):
    assert charsums.Q_factorized(r, t).scaled_value == charsums.Q_t(r, t).scaled_value


def test_Q_odd_powers_and_squares_vanish_small():
    for p in (3, 5, 7, 11, 13):
        for k in (1, 2, 3):
            assert charsums.Q(p**k).scaled_value == 0


def test_cost_guard():
    with pytest.raises(charsums.CostError):
        charsums.Q(3 * 5 * 7 * 11 * 13 * 17 * 19 * 23, max_evaluations=10**6)


def test_maincharsum_examples():
    for h in range(3):
        for k in range(3):
            c = charsums.verify_maincharsum(1, h % 1, k % 1)
            assert c and abs(c.lhs - 1) < 1e-12
    assert charsums.verify_maincharsum(5, 1, 2)
    for h in range(15):
        for k in (0, 3, 6, 9, 12):
            c = charsums.verify_maincharsum(15, h, k)
            assert c and abs(c.lhs) < 1e-6


def test_parameterization_examples():
    for r in (3, 5, 35):
        assert charsums.verify_parameterization(r)
    assert charsums.verify_parameterization(5).lhs == 5


def test_degenerate_examples():
    for h in range(3):
        for k in range(3):
            assert abs(charsums.degenerate_char_sides(3, h, k)[0]) < 1e-9
    assert abs(charsums.degenerate_exp_sides(5, 0, 0)[0] - 5) < 1e-9
    assert charsums.verify_degenerate(7, 2, 3)


def test_maincompletesum_consistency():
    assert charsums.verify_maincompletesum(15, 3, 1, 1)
    for h, k in [(1, 2), (3, 4), (0, 0)]:
        assert abs(charsums.maincompletesum_lhs(5, 1, h, k) - charsums.maincharsum_lhs(5, h, k)) < 1e-9
        assert abs(charsums.maincompletesum_lhs(5, 5, h, k) - charsums.degenerate_char_sides(5, h, k)[0]) < 1e-9


def test_lemma_domain_errors():
    with pytest.raises(arith.ArithmeticDomainError):
        charsums.verify_maincharsum(9, 1, 1)


def test_c_S_degenerate_and_converged():
    assert charsums.c_S(47, 1).exact == Fraction(1)
    low, high = charsums.c_S(47, 3), charsums.c_S(47, 12)
    assert abs(low.value - high.value) <= low.tail_bound
    assert high.tail_bound < 1e-4


def test_c_S_local_term_only_three_at_low_depth():
    for p in (5, 7, 11):
        assert charsums.c_S_local_term(p, 4) == 0
    assert charsums.c_S_local_term(3, 4) != 0


@pytest.mark.parametrize("r,c", [(1, 1), (5, 1), (7, 3)])
def test_poisson_identity(r, c):
    rep = charsums.poisson_identity_check(r, c)
    assert rep.relative_error < 1e-3 and rep.truncation_ok


def test_poisson_rejects_bad_input():
    with pytest.raises(ValueError):
        charsums.poisson_identity_check(4)
    with pytest.raises(ValueError):
        charsums.poisson_identity_check(5, g=5)
