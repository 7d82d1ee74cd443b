"""Exact modular and multiplicative arithmetic shared by the rest of the package.

Integers are plain Python ints throughout (arbitrary precision); numpy is used
only for the sieve tables. Complex values are double precision.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

DEFAULT_SIEVE_BOUND = 10**6


class ArithmeticDomainError(ValueError):
    """An argument lies outside the domain of an arithmetic function."""


class NoInverseError(ArithmeticDomainError):
    pass


# ---------------------------------------------------------------------------
# sieves and factorization
# ---------------------------------------------------------------------------


def smallest_prime_factor_table(bound: int) -> np.ndarray:
    """spf[n] for 0 <= n <= bound (spf[0] = spf[1] = 0)."""
    spf = np.zeros(bound + 1, dtype=np.int64)
    if bound < 2:
        return spf
    spf[2::2] = 2
    for p in range(3, math.isqrt(bound) + 1, 2):
        if spf[p] == 0:
            block = spf[p * p :: 2 * p]
            block[block == 0] = p
            spf[p * p :: 2 * p] = block
    rest = np.nonzero(spf == 0)[0]
    spf[rest[rest >= 2]] = rest[rest >= 2]
    return spf


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


class _FactorCache:
    """Lazily built smallest-prime-factor table; immutable once built."""

    def __init__(self, bound: int = DEFAULT_SIEVE_BOUND):
        self.bound = bound
        self._spf: np.ndarray | None = None

    @property
    def spf(self) -> np.ndarray:
        if self._spf is None:
            self._spf = smallest_prime_factor_table(self.bound)
        return self._spf

    def resize(self, bound: int) -> None:
        if bound != self.bound:
            self.bound = bound
            self._spf = None


_CACHE = _FactorCache()


def set_sieve_bound(bound: int) -> None:
    """Change the bound below which factorizations come from the cached sieve."""
    _CACHE.resize(bound)


@dataclass(frozen=True)
class Factorization:
    """Prime-exponent pairs sorted by prime."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.pairs]
        if any(e < 1 for _, e in self.pairs) or primes != sorted(set(primes)):
            raise ValueError(f"malformed factorization {self.pairs}")

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.pairs)

    def value(self) -> int:
        n = 1
        for p, e in self.pairs:
            n *= p**e
        return n


def _trial_division(n: int) -> list[tuple[int, int]]:
    pairs = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
    p, step = 5, 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        pairs.append((n, 1))
    return pairs


def factorize(n: int) -> Factorization:
    if n < 1:
        raise ArithmeticDomainError(f"cannot factor {n}")
    if n <= _CACHE.bound:
        spf = _CACHE.spf
        pairs: list[tuple[int, int]] = []
        while n > 1:
            p = int(spf[n])
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            pairs.append((p, e))
        return Factorization(tuple(pairs))
    return Factorization(tuple(_trial_division(n)))


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 3.3e24; trial-division table below the sieve bound."""
    if n < 2:
        return False
    if n <= _CACHE.bound:
        return int(_CACHE.spf[n]) == n
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for p in small:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def radical(n: int) -> int:
    """Product of the distinct primes dividing n; radical(1) = 1."""
    r = 1
    for p, _ in factorize(n):
        r *= p
    return r


def split_exact_part(n: int) -> tuple[int, int]:
    """Return (n1, n2): n1 the product of primes dividing n exactly once, n2 = n // n1."""
    n1 = 1
    for p, e in factorize(n):
        if e == 1:
            n1 *= p
    return n1, n // n1


def cube_radical(e: int) -> int:
    """Least t >= 1 with e | t**3."""
    t = 1
    for p, k in factorize(e):
        t *= p ** (-(-k // 3))
    return t


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    phi = n
    for p, _ in factorize(n):
        phi -= phi // p
    return phi


def is_squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n))


def mobius_table(bound: int) -> np.ndarray:
    """mu[n] for 0 <= n <= bound (mu[0] = 0)."""
    mu = np.ones(bound + 1, dtype=np.int8)
    mu[0] = 0
    for p in primes_up_to(bound):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


# ---------------------------------------------------------------------------
# residues
# ---------------------------------------------------------------------------


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1, with (a/1) = 1 for every a."""
    if n <= 0 or n % 2 == 0:
        raise ArithmeticDomainError(f"Jacobi symbol needs odd positive modulus, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def mod_inverse(a: int, n: int) -> int:
    if n < 1:
        raise ArithmeticDomainError(f"modulus must be positive, got {n}")
    if math.gcd(a, n) != 1:
        raise NoInverseError(f"{a} is not invertible mod {n}")
    return pow(a, -1, n) if n > 1 else 0


def inverse_or_zero(a: int, n: int) -> int:
    """The overline convention: the inverse when it exists, else 0."""
    try:
        return mod_inverse(a, n)
    except NoInverseError:
        return 0


def e(x: float) -> complex:
    """The additive character e(x) = exp(2 pi i x)."""
    return cmath.exp(2j * math.pi * x)


def epsilon_r(r: int) -> complex:
    """1 if r = 1 mod 4, i if r = 3 mod 4."""
    if r % 2 == 0:
        raise ArithmeticDomainError(f"epsilon_r needs odd r, got {r}")
    return 1 if r % 4 == 1 else 1j


def chi4(n: int) -> int:
    """Primitive character mod 4."""
    return (0, 1, 0, -1)[n % 4]


def _check_odd_squarefree(r: int) -> None:
    if r < 1 or r % 2 == 0 or not is_squarefree(r):
        raise ArithmeticDomainError(f"modulus must be odd and squarefree, got {r}")


def gauss_sum(r: int, k: int) -> complex:
    """sum_{y mod r} (y/r) e(ky/r) by direct summation."""
    _check_odd_squarefree(r)
    ys = np.arange(r)
    symbols = np.array([jacobi(int(y), r) for y in ys], dtype=float)
    return complex(np.sum(symbols * np.exp(2j * np.pi * ((k * ys) % r) / r)))


def gauss_sum_closed(r: int, k: int) -> complex:
    """Closed form epsilon_r sqrt(r) (k/r)."""
    _check_odd_squarefree(r)
    return epsilon_r(r) * math.sqrt(r) * jacobi(k, r)


# ---------------------------------------------------------------------------
# Dirichlet characters as explicit tables (tiny moduli only)
# ---------------------------------------------------------------------------


def _cyclic_generator(m: int, order: int) -> int:
    for g in range(2, m):
        if math.gcd(g, m) != 1:
            continue
        if all(pow(g, order // q, m) != 1 for q in factorize(order).primes):
            return g
    return 1


def _unit_group_generators(n: int) -> list[tuple[int, int, int]]:
    """Generators of (Z/nZ)^* as (prime power modulus, local generator, order)."""
    gens = []
    for p, k in factorize(n):
        q = p**k
        if p == 2:
            if k == 1:
                continue
            gens.append((q, q - 1, 2))  # -1
            if k >= 3:
                gens.append((q, 5, q // 4))
        else:
            order = q - q // p
            gens.append((q, _cyclic_generator(q, order), order))
    return gens


@lru_cache(maxsize=64)
def character_table(n: int) -> np.ndarray:
    """All Dirichlet characters mod n as a (phi(n), n) complex table.

    Row 0 is the principal character. Built from a CRT decomposition of the unit
    group into cyclic pieces; discrete logs are found by enumeration.
    """
    if n < 1:
        raise ArithmeticDomainError(f"modulus must be positive, got {n}")
    units = [a for a in range(n) if math.gcd(a, n) == 1]
    gens = _unit_group_generators(n)
    # exponent vector of each unit w.r.t. the generators
    logs = {}
    for a in units:
        vec = []
        for q, g, order in gens:
            target = a % q
            if q % 4 == 0 and g == q - 1:
                # the {+-1} factor of (Z/2^k)^*
                vec.append(0 if target % 4 == 1 else 1)
                continue
            if q % 8 == 0 and g == 5:
                t = target if target % 4 == 1 else (-target) % q
                x, j = 1, 0
                while x != t:
                    x = x * 5 % q
                    j += 1
                vec.append(j)
                continue
            x, j = 1, 0
            while x != target:
                x = x * g % q
                j += 1
            vec.append(j)
        logs[a] = vec
    orders = [order for _, _, order in gens]
    rows = []
    for idx in np.ndindex(*orders) if orders else [()]:
        row = np.zeros(n, dtype=complex)
        for a in units:
            phase = sum(i * l / o for i, l, o in zip(idx, logs[a], orders))
            row[a] = cmath.exp(2j * math.pi * phase)
        rows.append(row)
    if n == 1:
        return np.ones((1, 1), dtype=complex)
    return np.array(rows)


def character_gauss_sum(chi: np.ndarray) -> complex:
    """tau(chi) = sum_a chi(a) e(a/n) for a character given as a length-n table."""
    n = len(chi)
    return complex(np.sum(chi * np.exp(2j * np.pi * np.arange(n) / n)))
