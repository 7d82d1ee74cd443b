"""Complete character sums over residue pairs (alpha, beta) and the constants built from them.

Everything that can be exact is exact: a sum of lambda_{alpha,beta}(r) over
residue pairs is stored as the integer sum of a_{alpha,beta}(r) =
sqrt(r) lambda_{alpha,beta}(r), so "vanishes" means an integer zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import arith
from .curves import ap_full_table, legendre_table, prime_power_values
from .weights import Weight

DEFAULT_MAX_EVALUATIONS = 10**8


class CostError(RuntimeError):
    """A brute-force sum would exceed the evaluation budget."""


@dataclass(frozen=True)
class CompleteSumResult:
    """value = scaled_value / sqrt(modulus)."""

    modulus: int
    scaled_value: int
    float_value: float

    @classmethod
    def from_scaled(cls, r: int, scaled: int) -> "CompleteSumResult":
        return cls(r, int(scaled), int(scaled) / math.sqrt(r))


@dataclass
class Check:
    """Outcome of comparing two routes to the same quantity."""

    ok: bool
    lhs: complex
    rhs: complex
    error: float
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


# ---------------------------------------------------------------------------
# residue tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=512)
def prime_power_table(p: int, k: int) -> np.ndarray:
    """a_{alpha,beta}(p^k) for all (alpha, beta) mod p, shape (p, p), exact.

    int64 while |a(p^k)| <= (k+1) p^{k/2} fits comfortably, Python ints otherwise.
    """
    if p == 2:
        return np.zeros((2, 2), dtype=np.int64) if k else np.ones((2, 2), dtype=np.int64)
    ap = ap_full_table(p).ravel()
    al, be = np.divmod(np.arange(p * p, dtype=np.int64), p)
    good = (4 * al**3 + 27 * be**2) % p != 0
    if (k + 2) * p ** (k / 2 + 1) < 2.0**60:
        return prime_power_values(p, ap, good, k)[:, k].reshape(p, p)
    ap = ap.astype(object)
    prev, cur = np.ones(p * p, dtype=object), ap
    for _ in range(2, k + 1):
        prev, cur = cur, np.where(good, ap * cur - p * prev, ap * cur)
    return cur.reshape(p, p)


@lru_cache(maxsize=256)
def discriminant_zero_mask(p: int) -> np.ndarray:
    al = np.arange(p, dtype=np.int64)[:, None]
    be = np.arange(p, dtype=np.int64)[None, :]
    return (4 * al**3 + 27 * be**2) % p == 0


def _guard(rstar: int, nprimes: int, max_evaluations: int) -> None:
    cost = rstar * rstar * max(nprimes, 1)
    if cost > max_evaluations:
        raise CostError(f"{cost} evaluations over residues mod {rstar} exceeds {max_evaluations}")


def scaled_lambda_grid(r: int, modulus: int | None = None,
                       max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> np.ndarray:
    """a_{alpha,beta}(r) on the grid alpha, beta mod `modulus` (default r*).

    Uses periodicity mod p of each prime-power factor and assembles the grid by
    CRT broadcasting. Entries are exact integers.
    """
    f = arith.factorize(r) if r > 1 else arith.Factorization(())
    if modulus is None:
        modulus = 1
        for p, _ in f:
            modulus *= p
    _guard(modulus, len(f), max_evaluations)
    res = np.arange(modulus, dtype=np.int64)
    grid = np.ones((modulus, modulus), dtype=np.int64)
    for p, k in f:
        tab = prime_power_table(p, k)
        if tab.dtype == object:
            grid = grid.astype(object)
        grid = grid * tab[np.ix_(res % p, res % p)]
    return grid


def discriminant_grid(modulus: int, m: int) -> np.ndarray:
    """Boolean grid over (alpha, beta) mod `modulus`: 4 alpha^3 + 27 beta^2 = 0 mod m."""
    res = np.arange(modulus, dtype=np.int64)
    al = (res % m)[:, None]
    be = (res % m)[None, :]
    return (4 * al**3 + 27 * be**2) % m == 0


def _exact_sum(grid: np.ndarray) -> int:
    if grid.dtype == object:
        return int(sum(grid.ravel().tolist()))
    return int(grid.sum(dtype=np.int64))


# ---------------------------------------------------------------------------
# Q-type sums
# ---------------------------------------------------------------------------


def Q_t(r: int, t: int = 1, max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> CompleteSumResult:
    """Sum of lambda_{alpha,beta}(r) over alpha, beta mod r* with Delta = 0 mod (r*, t).

    Brute force over all r*^2 residue pairs. lambda(2^k) = 0 makes every even r
    give zero.
    """
    if r < 1 or t < 1:
        raise ValueError("r and t must be positive")
    if r % 2 == 0:
        return CompleteSumResult.from_scaled(r, 0)
    rstar = arith.radical(r)
    grid = scaled_lambda_grid(r, rstar, max_evaluations)
    g = math.gcd(rstar, t)
    if g > 1:
        grid = np.where(discriminant_grid(rstar, g), grid, 0)
    return CompleteSumResult.from_scaled(r, _exact_sum(grid))


def Q(r: int, max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> CompleteSumResult:
    return Q_t(r, 1, max_evaluations)


def Q_prime(k: int, r: int, max_evaluations: int = DEFAULT_MAX_EVALUATIONS) -> CompleteSumResult:
    """Sum of psi_Delta((k, r)) lambda_{alpha,beta}(r) over alpha, beta mod r*."""
    if r % 2 == 0:
        return CompleteSumResult.from_scaled(r, 0)
    rstar = arith.radical(r)
    grid = scaled_lambda_grid(r, rstar, max_evaluations)
    g = math.gcd(k, r)
    if g > 1:
        # psi_Delta(g) = 0 as soon as some prime of g divides Delta
        bad = np.zeros((rstar, rstar), dtype=bool)
        for p in arith.factorize(g).primes:
            bad |= discriminant_grid(rstar, p)
        grid = np.where(bad, 0, grid)
    return CompleteSumResult.from_scaled(r, _exact_sum(grid))


def Q_factorized(r: int, t: int = 1) -> CompleteSumResult:
    """Q_t(r) as the product of its local factors (the multiplicativity route)."""
    if r % 2 == 0:
        return CompleteSumResult.from_scaled(r, 0)
    scaled = 1
    for p, k in arith.factorize(r) if r > 1 else ():
        scaled *= Q_t(p**k, math.gcd(p, t)).scaled_value
    return CompleteSumResult.from_scaled(r, scaled)


# ---------------------------------------------------------------------------
# lemma verifications
# ---------------------------------------------------------------------------


def _odd_squarefree(r: int) -> None:
    if r < 1 or r % 2 == 0 or not arith.is_squarefree(r):
        raise arith.ArithmeticDomainError(f"r must be odd and squarefree, got {r}")


def _twisted_sum(weights: np.ndarray, r: int, h: int, k: int) -> complex:
    res = np.arange(r, dtype=np.int64)
    phase = ((res[:, None] * h + res[None, :] * k) % r) / r
    return complex(np.sum(weights * np.exp(2j * np.pi * phase)))


def maincharsum_lhs(r: int, h: int, k: int) -> complex:
    """sum_{alpha, beta mod r} lambda_{alpha,beta}(r) e((alpha h + beta k)/r), by brute force."""
    grid = scaled_lambda_grid(r, r).astype(float) / math.sqrt(r)
    return _twisted_sum(grid, r, h, k)


def maincharsum_rhs(r: int, h: int, k: int) -> complex:
    """epsilon_r mu(r) r (k/r) e(-h^3 kbar^2 / r), kbar = 0 when (k, r) > 1."""
    kbar = arith.inverse_or_zero(k, r)
    return (arith.epsilon_r(r) * arith.mobius(r) * r * arith.jacobi(k, r)
            * arith.e((-(h**3) * kbar * kbar % r) / r))


def verify_maincharsum(r: int, h: int, k: int, tol: float = 1e-6) -> Check:
    _odd_squarefree(r)
    lhs, rhs = maincharsum_lhs(r, h, k), maincharsum_rhs(r, h, k)
    err = abs(lhs - rhs)
    return Check(err < tol, lhs, rhs, err)


def verify_parameterization(r: int) -> Check:
    """Solutions of 4 alpha^3 + 27 beta^2 = 0 mod r are exactly (-3g^2, 2g^3), each once."""
    _odd_squarefree(r)
    al, be = np.nonzero(discriminant_grid(r, r))
    solutions = set(zip(al.tolist(), be.tolist()))
    gam = np.arange(r, dtype=np.int64)
    images = list(zip(((-3 * gam * gam) % r).tolist(), ((2 * gam**3) % r).tolist()))
    ok = solutions == set(images) and len(set(images)) == r
    return Check(ok, len(solutions), len(set(images)), 0.0 if ok else 1.0)


def degenerate_exp_sides(r: int, h: int, k: int) -> tuple[complex, complex]:
    mask = discriminant_grid(r, r).astype(float)
    lhs = _twisted_sum(mask, r, h, k)
    g = np.arange(r, dtype=np.int64)
    rhs = complex(np.sum(np.exp(2j * np.pi * ((-3 * g * g * h + 2 * g**3 * k) % r) / r)))
    return lhs, rhs


def degenerate_char_sides(r: int, h: int, k: int) -> tuple[complex, complex]:
    mask = discriminant_grid(r, r)
    grid = np.where(mask, scaled_lambda_grid(r, r), 0).astype(float) / math.sqrt(r)
    lhs = _twisted_sum(grid, r, h, k)
    g = np.arange(r, dtype=np.int64)
    sym = np.array([arith.jacobi(int(x), r) for x in g], dtype=float)
    rhs = (arith.jacobi(3, r) / math.sqrt(r)) * complex(
        np.sum(sym * np.exp(2j * np.pi * ((-3 * g * g * h + 2 * g**3 * k) % r) / r)))
    return lhs, rhs


def verify_degenerate(r: int, h: int, k: int, tol: float = 1e-6) -> Check:
    """Both degenerate identities (plain exponential and lambda-twisted)."""
    _odd_squarefree(r)
    e_l, e_r = degenerate_exp_sides(r, h, k)
    c_l, c_r = degenerate_char_sides(r, h, k)
    err = max(abs(e_l - e_r), abs(c_l - c_r))
    ok = err < tol
    if r % 3 == 0:
        ok = ok and abs(c_l) < tol
    return Check(ok, c_l, c_r, err, {"exp_lhs": e_l, "exp_rhs": e_r})


def maincompletesum_lhs(r: int, t: int, h: int, k: int) -> complex:
    mask = discriminant_grid(r, t)
    grid = np.where(mask, scaled_lambda_grid(r, r), 0).astype(float) / math.sqrt(r)
    return _twisted_sum(grid, r, h, k)


def maincompletesum_rhs(r: int, t: int, h: int, k: int) -> complex:
    r0 = r // t
    kbar = arith.inverse_or_zero(k, r0)
    tbar = arith.inverse_or_zero(t, r0)
    r0bar = arith.inverse_or_zero(r0, t)
    front = (arith.epsilon_r(r0) * arith.mobius(r0) * r0 / math.sqrt(t) * arith.jacobi(3, t)
             * arith.jacobi(k * t, r0) * arith.e((-(h**3) * kbar * kbar * tbar % r0) / r0))
    g = np.arange(t, dtype=np.int64)
    sym = np.array([arith.jacobi(int(x), t) for x in g], dtype=float)
    inner = complex(np.sum(sym * np.exp(2j * np.pi * (((-3 * g * g * h + 2 * g**3 * k) * r0bar) % t) / t)))
    return front * inner


def verify_maincompletesum(r: int, t: int, h: int, k: int, tol: float = 1e-6) -> Check:
    _odd_squarefree(r)
    if r % t:
        raise ValueError(f"t={t} does not divide r={r}")
    lhs, rhs = maincompletesum_lhs(r, t, h, k), maincompletesum_rhs(r, t, h, k)
    err = abs(lhs - rhs)
    return Check(err < tol, lhs, rhs, err)


def verify_gauss(r: int, k: int, tol: float = 1e-9) -> Check:
    lhs, rhs = arith.gauss_sum(r, k), arith.gauss_sum_closed(r, k)
    err = abs(lhs - rhs)
    return Check(err < tol, lhs, rhs, err)


# ---------------------------------------------------------------------------
# the constant c_S
# ---------------------------------------------------------------------------


@dataclass
class CSResult:
    value: float
    exact: Fraction
    tail_bound: float
    pmax: int
    kmax: int
    local_terms: dict[int, float]
    raw_tail: float

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "tail_bound": self.tail_bound,
            "pmax": self.pmax,
            "kmax": self.kmax,
            "raw_tail": self.raw_tail,
            "local_terms": {str(p): v for p, v in self.local_terms.items()},
        }


def c_S_local_term(p: int, kmax: int) -> Fraction:
    """(1 - p^-5)^-1 sum_{k=1}^{kmax} Q(p^{2k}) / p^{k+2}, exactly."""
    total = Fraction(0)
    for k in range(1, kmax + 1):
        scaled = Q(p ** (2 * k)).scaled_value  # = p^k Q(p^{2k})
        total += Fraction(scaled, p ** (2 * k + 2))
    return total * Fraction(p**5, p**5 - 1)


# Q(p^{2k}) vanishes for p >= 5 and 1 <= k <= VANISHING_DEPTH: the sum over all
# curves mod p of a(p^{2k}) is a trace on level-one cusp forms of weight 2k + 2,
# and that space is zero up to weight 10. c_S checks this for every p <= pmax.
VANISHING_DEPTH = 4


def _exponent_tail(x: float, k0: int) -> float:
    """sum_{k >= k0} (2k+1) x^k for 0 < x < 1."""
    return x**k0 * ((2 * k0 + 1) / (1 - x) + 2 * x / (1 - x) ** 2)


def c_S(pmax: int = 47, kmax: int = 12) -> CSResult:
    """Truncated Euler product for the first-moment constant, with a tail bound.

    The bound on |log c_S - log(truncation)| has two parts: exponents k > kmax at
    primes p <= pmax, and primes p > pmax, where only k > VANISHING_DEPTH can
    contribute. Both use the trivial bound (2k+1) p^-k per term, i.e.
    |a(p^{2k})| <= (2k+1) p^k summed over the p^2 residue pairs.
    """
    if pmax < 3 or kmax < 1:
        raise ValueError("need pmax >= 3 and kmax >= 1")
    exact = Fraction(1)
    terms: dict[int, float] = {}
    tail = 0.0
    for p in arith.primes_up_to(pmax)[1:]:
        p = int(p)
        if p >= 5:
            for k in range(2, min(kmax, VANISHING_DEPTH) + 1):
                if Q(p ** (2 * k)).scaled_value != 0:
                    raise AssertionError(f"Q({p}^{2 * k}) does not vanish")
        term = c_S_local_term(p, kmax)
        terms[p] = float(term)
        exact *= 1 + term
        tail += _exponent_tail(1 / p, kmax + 1) / (1 - p**-5.0)
    # primes beyond pmax: only k >= k0 survive; sum over n > pmax by an integral
    k0 = max(kmax, VANISHING_DEPTH) + 1
    x = 1 / (pmax + 1)
    lead = ((2 * k0 + 1) / (1 - x) + 2 * x / (1 - x) ** 2) / (1 - x**5)
    tail += lead * pmax ** (1 - k0) / (k0 - 1)
    worst = max(abs(t) for t in terms.values()) if terms else 0.0
    log_tail = tail / max(1e-300, 1 - min(0.5, worst + tail))
    value = float(exact)
    return CSResult(value, exact, value * math.expm1(log_tail), pmax, kmax, terms, tail)


# ---------------------------------------------------------------------------
# Poisson summation in the family variables
# ---------------------------------------------------------------------------


@dataclass
class PoissonReport:
    r: int
    c: int
    g: int
    A: float
    B: float
    lhs: float
    rhs: float
    relative_error: float
    zero_frequency: float
    main_term: float
    hmax: int
    kmax: int
    truncation_ok: bool

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _family_lambda(r: int, modulus: int, g: int, c: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """lambda_{a g^2, b g^3}(r) * [c | Delta(a g^2, b g^3)] for integer arrays a, b."""
    rstar = arith.radical(r) if r > 1 else 1
    grid = scaled_lambda_grid(r, rstar) if rstar > 1 else np.ones((1, 1), dtype=np.int64)
    ag, bg = a * g * g, b * g**3
    vals = grid[ag % rstar, bg % rstar].astype(float) / math.sqrt(r)
    if c > 1:
        vals = np.where((4 * (ag % c) ** 3 + 27 * (bg % c) ** 2) % c == 0, vals, 0.0)
    return vals


def poisson_identity_check(
    r: int,
    c: int = 1,
    g: int = 1,
    A: float = 50.0,
    B: float = 50.0,
    weight: Weight = Weight(),
    tol: float = 1e-13,
) -> PoissonReport:
    """Compare the direct weighted sum over (a, b odd) with its Poisson dual.

    LHS = sum_{a, b odd, c | Delta} lambda_{a g^2, b g^3}(r) w(a g^2/A, b g^3/B)
    RHS = AB/(2 g^5 q^2) sum_{h,k} S(h, k) w_hat(hA/(g^2 q), kB/(2 g^3 q)), with
    S the complete sum over alpha mod q, beta odd mod 2q and q = lcm(r*, c).
    The frequency truncation is where |eta_hat| drops below tol * eta_hat(0).
    """
    if r % 2 == 0 or c % 2 == 0 or not arith.is_squarefree(c):
        raise ValueError("r must be odd and c odd squarefree")
    if math.gcd(g, 2 * r) != 1:
        raise ValueError("need (g, 2r) = 1")
    rstar = arith.radical(r) if r > 1 else 1
    q = rstar * c // math.gcd(rstar, c)
    if q > 15 * 15:
        raise CostError("modulus too large for the Poisson check")

    # direct side
    arange = np.arange(math.ceil(weight.lo * A / g**2), math.floor(weight.hi * A / g**2) + 1)
    brange = np.arange(math.ceil(weight.lo * B / g**3), math.floor(weight.hi * B / g**3) + 1)
    brange = brange[brange % 2 == 1]
    aa, bb = np.meshgrid(arange, brange, indexing="ij")
    lam = _family_lambda(r, q, g, c, aa, bb)
    lhs = float(np.sum(lam * weight(aa * g * g / A, bb * g**3 / B)))

    # dual side
    al, be = np.meshgrid(np.arange(q), np.arange(2 * q), indexing="ij")
    f = _family_lambda(r, q, g, c, al, be) * (be % 2 == 1)
    S = np.fft.ifft2(f) * f.size  # S[h, k] = sum f e(alpha h/q + beta k/(2q))
    sa, sb = A / (g * g * q), B / (2 * g**3 * q)
    H = weight.decay_cutoff(sa, tol)
    K = weight.decay_cutoff(sb, tol)
    hs, ks = np.arange(-H, H + 1), np.arange(-K, K + 1)
    eh, ek = weight.eta_hat(hs * sa), weight.eta_hat(ks * sb)
    Sext = S[np.ix_(hs % q, ks % (2 * q))]
    pref = A * B / (2 * g**5 * q * q)
    rhs_c = pref * (eh @ Sext @ ek)
    rhs = float(rhs_c.real)
    w00 = weight.w_hat00()
    zero = float((pref * S[0, 0] * w00).real)

    r1, _ = arith.split_exact_part(r)
    c0 = c // math.gcd(c, rstar)
    mt = 0.0
    if r1 == 1:
        mt = 0.5 * A * B * w00 * Q_t(r, c).float_value / (c0 * rstar * rstar) / g**5
    return PoissonReport(
        r=r, c=c, g=g, A=A, B=B, lhs=lhs, rhs=rhs,
        relative_error=abs(lhs - rhs) / (1 + abs(lhs)),
        zero_frequency=zero, main_term=mt, hmax=H, kmax=K,
        truncation_ok=abs(rhs_c.imag) < 1e-6 * (1 + abs(rhs)),
    )


def legendre(p: int) -> np.ndarray:
    return legendre_table(p)
