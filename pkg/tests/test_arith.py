import math

import pytest
from hypothesis import given, strategies as st

from ecfamily import arith


def euler_criterion(a: int, p: int) -> int:
    v = pow(a % p, (p - 1) // 2, p)
    return -1 if v == p - 1 else v


@pytest.mark.parametrize("a,n,expected", [(1, 9, 1), (3, 9, 0), (6, 31, -1)])
def test_jacobi_examples(a, n, expected):
    assert arith.jacobi(a, n) == expected


def test_jacobi_rejects_even_modulus():
    with pytest.raises(arith.ArithmeticDomainError):
        arith.jacobi(3, 10)
    with pytest.raises(arith.ArithmeticDomainError):
        arith.jacobi(3, 0)


@given(st.integers(-10**6, 10**6), st.sampled_from([3, 5, 7, 11, 13, 101, 997, 7919]))
def test_jacobi_matches_euler_criterion(a, p):
    assert arith.jacobi(a, p) == euler_criterion(a, p)


@given(st.integers(-1000, 1000), st.integers(0, 200), st.integers(0, 200))
def test_jacobi_multiplicative_in_modulus(a, i, j):
    m, n = 2 * i + 1, 2 * j + 1
    assert arith.jacobi(a, m * n) == arith.jacobi(a, m) * arith.jacobi(a, n)


@pytest.mark.parametrize("a,n,expected", [(3, 5, 2), (1, 7, 1), (10, 31, 28)])
def test_mod_inverse_examples(a, n, expected):
    assert arith.mod_inverse(a, n) == expected


def test_mod_inverse_errors_and_zero_convention():
    with pytest.raises(arith.NoInverseError):
        arith.mod_inverse(6, 9)
    assert arith.inverse_or_zero(6, 9) == 0


@given(st.integers(1, 10**6), st.integers(2, 10**4))
def test_mod_inverse_property(a, n):
    if math.gcd(a, n) == 1:
        assert a * arith.mod_inverse(a, n) % n == 1


@pytest.mark.parametrize("n,expected", [(12, 6), (1, 1), (360, 30)])
def test_radical(n, expected):
    assert arith.radical(n) == expected


@pytest.mark.parametrize("n,expected", [(12, (3, 4)), (30, (30, 1)), (8, (1, 8))])
def test_split_exact_part(n, expected):
    assert arith.split_exact_part(n) == expected


@pytest.mark.parametrize("n,expected", [(1, 1), (8, 2), (12, 6)])
def test_cube_radical_examples(n, expected):
    assert arith.cube_radical(n) == expected


@given(st.integers(1, 5000))
def test_cube_radical_minimal_scan(e):
    t = next(t for t in range(1, e + 1) if t**3 % e == 0)
    assert arith.cube_radical(e) == t


@given(st.integers(1, 10**7))
def test_split_and_radical_consistent(n):
    n1, n2 = arith.split_exact_part(n)
    assert n1 * n2 == n and math.gcd(n1, n2) == 1
    assert arith.is_squarefree(n1)
    assert all(e >= 2 for _, e in arith.factorize(n2))
    assert n % arith.radical(n) == 0 and arith.is_squarefree(arith.radical(n))


def test_mobius_table_matches_pointwise():
    mu = arith.mobius_table(500)
    assert all(mu[n] == arith.mobius(n) for n in range(1, 501))


def test_gauss_sum_examples():
    assert abs(arith.gauss_sum(5, 1) - math.sqrt(5)) < 1e-9
    assert abs(arith.gauss_sum(3, 1) - 1j * math.sqrt(3)) < 1e-9
    for r in (3, 5, 15, 21):
        assert abs(arith.gauss_sum(r, 0)) < 1e-9


def test_gauss_sum_domain():
    with pytest.raises(arith.ArithmeticDomainError):
        arith.gauss_sum(9, 1)
    with pytest.raises(arith.ArithmeticDomainError):
        arith.gauss_sum(4, 1)


def test_character_table_orthogonality():
    for n in (5, 8, 15):
        chi = arith.character_table(n)
        gram = chi @ chi.conj().T
        assert gram.shape[0] == arith.euler_phi(n)
        assert abs(gram - arith.euler_phi(n) * __import__("numpy").eye(gram.shape[0])).max() < 1e-9
