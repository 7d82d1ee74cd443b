"""Per-curve data for E_{a,b}: y^2 = x^3 + a x + b.

Hecke coefficients are kept as exact integers a(n) = sqrt(n) * lambda(n); the
analytic normalisation only appears where a cutoff kernel is applied.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import arith

TAIL_TOLERANCE = 1e-12


class TruncationError(ValueError):
    """A partial sum was asked for with too few terms for the kernel to have decayed."""


class PreconditionError(ValueError):
    pass


class AmbiguousConductorError(RuntimeError):
    """No conductor/sign candidate makes the functional-equation residual flat."""

    def __init__(self, result: "AFEResult"):
        super().__init__(
            f"no (N, eps) candidate reaches relative variance {result.threshold:g}; "
            f"best was N={result.N}, eps={result.epsilon:+d} with {result.variance:.3g}"
        )
        self.result = result


# ---------------------------------------------------------------------------
# curve parameters
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class CurveParams:
    a: int
    b: int

    def __post_init__(self):
        if self.a < 1 or self.b < 1:
            raise ValueError(f"family curves need a, b >= 1, got ({self.a}, {self.b})")

    @property
    def D(self) -> int:
        return 4 * self.a**3 + 27 * self.b**2

    @property
    def discriminant(self) -> int:
        return -16 * self.D

    def label(self) -> str:
        return f"{self.a},{self.b}"


@dataclass(frozen=True)
class CurveInvariants:
    D: int
    in_S: bool
    D_squarefree: bool
    gcd_ab: int


def in_family_S(c: CurveParams) -> bool:
    """b odd and no prime p with p^2 | a and p^3 | b."""
    if c.b % 2 == 0:
        return False
    g = math.gcd(c.a, c.b)
    for p, _ in arith.factorize(g) if g > 1 else ():
        if c.a % (p * p) == 0 and c.b % (p**3) == 0:
            return False
    return True


def invariants(c: CurveParams) -> CurveInvariants:
    return CurveInvariants(
        D=c.D,
        in_S=in_family_S(c),
        D_squarefree=arith.is_squarefree(c.D),
        gcd_ab=math.gcd(c.a, c.b),
    )


def family_mask(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Vectorised membership in S for arrays of (a, b)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    mask = (b % 2) == 1
    if b.size == 0:
        return mask
    pmax = int(round(float(b.max()) ** (1 / 3))) + 2
    for p in arith.primes_up_to(pmax):
        p = int(p)
        mask &= ~((a % (p * p) == 0) & (b % (p**3) == 0))
    return mask


# ---------------------------------------------------------------------------
# a(p) by character sums
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4096)
def legendre_table(p: int) -> np.ndarray:
    """chi[y] = (y/p) for 0 <= y < p, as int8."""
    chi = -np.ones(p, dtype=np.int8)
    chi[0] = 0
    squares = (np.arange(1, p, dtype=np.int64) ** 2) % p
    chi[squares] = 1
    return chi


def a_p(c: CurveParams, p: int) -> int:
    """a(p) = -sum_x ((x^3 + a x + b)/p) for odd p; 0 at p = 2."""
    if p == 2:
        return 0
    if p < 2 or not arith.is_prime(p):
        raise ValueError(f"{p} is not prime")
    return int(_ap_pairs(p, np.array([c.a]), np.array([c.b]))[0])


def _ap_direct(p: int, alphas: np.ndarray, betas: np.ndarray) -> np.ndarray:
    chi = legendre_table(p).astype(np.int64)
    x = np.arange(p, dtype=np.int64)
    cubic = (x**3)[None, :] + alphas[:, None] * x[None, :] + betas[:, None]
    return -chi[cubic % p].sum(axis=1)


def ap_rows(p: int, alphas: Sequence[int]) -> np.ndarray:
    """Rows a_p(alpha, beta) for the given alpha residues and every beta mod p.

    Each row is a cyclic correlation of the value-count vector of x^3 + alpha x
    with the Legendre symbol, done by FFT and rounded; the rounding residue is
    checked so the result is exact.
    """
    alphas = np.asarray(alphas, dtype=np.int64) % p
    x = np.arange(p, dtype=np.int64)
    if p < 64:
        beta = np.arange(p, dtype=np.int64)
        aa = np.repeat(alphas, p)
        bb = np.tile(beta, len(alphas))
        return _ap_direct(p, aa, bb).reshape(len(alphas), p)
    vals = ((x**3)[None, :] + alphas[:, None] * x[None, :]) % p
    counts = np.zeros((len(alphas), p), dtype=np.float64)
    rows = np.repeat(np.arange(len(alphas)), p)
    np.add.at(counts, (rows, vals.ravel()), 1.0)
    chi_hat = np.fft.fft(legendre_table(p).astype(np.float64))
    corr = np.fft.ifft(np.conj(np.fft.fft(counts, axis=1)) * chi_hat[None, :], axis=1).real
    out = np.rint(corr)
    if np.max(np.abs(corr - out)) > 0.25:
        raise ArithmeticError(f"FFT rounding failure at p={p}")
    return -out.astype(np.int64)


@lru_cache(maxsize=256)
def ap_full_table(p: int) -> np.ndarray:
    """a_p(alpha, beta) for all residue pairs mod p, shape (p, p)."""
    if p == 2:
        return np.zeros((2, 2), dtype=np.int64)
    return ap_rows(p, np.arange(p))


def _ap_pairs(p: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if p == 2:
        return np.zeros(a.shape, dtype=np.int64)
    if a.size <= 4:
        return _ap_direct(p, a % p, b % p)
    uniq, inv = np.unique(a % p, return_inverse=True)
    rows = ap_rows(p, uniq)
    return rows[inv, b % p]


def ap_for_pairs(p: int, a: Iterable[int], b: Iterable[int]) -> np.ndarray:
    """a(p) for many curves at once."""
    return _ap_pairs(p, np.asarray(list(a) if not isinstance(a, np.ndarray) else a),
                     np.asarray(list(b) if not isinstance(b, np.ndarray) else b))


def _good_at(c: CurveParams, p: int) -> bool:
    return p != 2 and c.D % p != 0


def a_pk(c: CurveParams, p: int, k: int) -> int:
    """a(p^k): Euler-factor recurrence at good p, a(p)^k at bad p."""
    if k == 0:
        return 1
    ap = a_p(c, p)
    if not _good_at(c, p):
        return ap**k
    prev, cur = 1, ap
    for _ in range(k - 1):
        prev, cur = cur, ap * cur - p * prev
    return cur


def a_n(c: CurveParams, n: int) -> int:
    value = 1
    for p, k in arith.factorize(n):
        value *= a_pk(c, p, k)
        if value == 0:
            break
    return value


def psi_delta(c: CurveParams, d: int) -> int:
    """Principal character attached to the prime support of the discriminant."""
    return 1 if math.gcd(d, 2 * c.D) == 1 else 0


# ---------------------------------------------------------------------------
# batched coefficient tables
# ---------------------------------------------------------------------------


def prime_power_values(
    p: int, ap: np.ndarray, good: np.ndarray, kmax: int
) -> np.ndarray:
    """Columns k = 0..kmax of a(p^k) for vectors of a(p) and good-reduction flags."""
    ap = ap.astype(np.int64)
    out = np.empty((ap.size, kmax + 1), dtype=np.int64)
    out[:, 0] = 1
    if kmax == 0:
        return out
    out[:, 1] = ap
    for k in range(2, kmax + 1):
        out[:, k] = np.where(good, ap * out[:, k - 1] - p * out[:, k - 2], ap * out[:, k - 1])
    return out


def _exponent_index(nmax: int, p: int) -> list[np.ndarray]:
    """idx[k] = {n <= nmax : v_p(n) = k} for k >= 1."""
    out = [np.zeros(0, dtype=np.int64)]
    q = p
    while q <= nmax:
        n = np.arange(q, nmax + 1, q, dtype=np.int64)
        out.append(n[n % (q * p) != 0])
        q *= p
    return out


@lru_cache(maxsize=16)
def _exponent_plan(nmax: int) -> tuple[tuple[int, tuple[np.ndarray, ...]], ...]:
    return tuple((int(p), tuple(_exponent_index(nmax, int(p)))) for p in arith.primes_up_to(nmax))


def coefficient_block(a: np.ndarray, b: np.ndarray, nmax: int) -> np.ndarray:
    """Exact a(n), 0 <= n <= nmax, for every curve (a[i], b[i]); shape (len(a), nmax + 1).

    Column 0 is zero. Built prime by prime: a(p) from the residue tables, prime
    powers from the Euler factor, then the multiplicative extension via the
    cached exponent plan.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    m = a.size
    coef = np.ones((m, nmax + 1), dtype=np.int64)
    coef[:, 0] = 0
    for p, idx in _exponent_plan(nmax):
        kmax = len(idx) - 1
        if p == 2:
            coef[:, 2::2] = 0
            continue
        ap = _ap_pairs(p, a, b)
        ar, br = a % p, b % p
        good = (4 * ar**3 + 27 * br**2) % p != 0
        pk = prime_power_values(p, ap, good, kmax)
        for k in range(1, kmax + 1):
            coef[:, idx[k]] *= pk[:, k : k + 1]
    return coef


@dataclass
class CoeffSeries:
    """Exact Hecke coefficients a(n) of one curve, 1 <= n <= nmax."""

    owner: CurveParams
    table: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, c: CurveParams, nmax: int) -> "CoeffSeries":
        return cls(c, coefficient_block(np.array([c.a]), np.array([c.b]), nmax)[0])

    @property
    def nmax(self) -> int:
        return len(self.table) - 1

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.nmax:
            raise IndexError(n)
        return int(self.table[n])

    def lam(self, n: int) -> float:
        return self[n] / math.sqrt(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["a", "b", "n", "a_n"])
        for n in range(1, self.nmax + 1):
            w.writerow([self.owner.a, self.owner.b, n, int(self.table[n])])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {
                "curve": {"a": self.owner.a, "b": self.owner.b},
                "nmax": self.nmax,
                "a_n": [int(v) for v in self.table[1:]],
            }
        )


# ---------------------------------------------------------------------------
# Dirichlet inverse and root number
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SqrtScaled:
    """The real number num / sqrt(radicand)."""

    num: int
    radicand: int

    def __float__(self) -> float:
        return self.num / math.sqrt(self.radicand)


def rho_m(c: CurveParams, m: int) -> SqrtScaled:
    """Coefficient of m^{-s} in 1/L(s, E).

    Nonzero only for m = k l^2 with k l squarefree and (l, Delta) = 1, where it
    equals mu(k) lambda(k) = mu(k) a(k) / sqrt(k). Returned with the sqrt kept
    symbolic in the radicand m.
    """
    k, l = 1, 1
    for p, e in arith.factorize(m):
        if e == 1:
            k *= p
        elif e == 2:
            l *= p
        else:
            return SqrtScaled(0, m)
    if psi_delta(c, l) == 0:
        return SqrtScaled(0, m)
    # mu(k) a(k)/sqrt(k) = mu(k) a(k) l / sqrt(m)
    return SqrtScaled(arith.mobius(k) * a_n(c, k) * l, m)


def rho_over_sqrt_block(coef: np.ndarray, mmax: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """rho(m)/sqrt(m) for 1 <= m <= mmax for every curve in a coefficient block.

    rho(k l^2)/sqrt(k l^2) = mu(k) a(k) / (k l). Returns float64 of shape
    (ncurves, mmax + 1) with column 0 zero.
    """
    ncurves = coef.shape[0]
    out = np.zeros((ncurves, mmax + 1), dtype=np.float64)
    for m in range(1, mmax + 1):
        k, l, ok = 1, 1, True
        for p, e in arith.factorize(m):
            if e == 1:
                k *= p
            elif e == 2:
                l *= p
            else:
                ok = False
                break
        if not ok:
            continue
        col = arith.mobius(k) * coef[:, k].astype(np.float64) / (k * l)
        if l > 1:
            for p in arith.factorize(l).primes:
                if p == 2:
                    col = col * 0
                else:
                    bad = (4 * (a % p) ** 3 + 27 * (b % p) ** 2) % p == 0
                    col = np.where(bad, 0.0, col)
        out[:, m] = col
    return out


def root_number_identity(c: CurveParams) -> tuple[int, int]:
    """Both sides of prod_{p | D} a(p) = chi_4(b) (-1)^a (a / 3b), for squarefree D.

    The left side uses brute-force character sums at each p | D; the right side
    is the closed Jacobi-symbol expression.
    """
    if not arith.is_squarefree(c.D):
        raise PreconditionError(f"D = {c.D} is not squarefree")
    lhs = 1
    for p in arith.factorize(c.D).primes:
        lhs *= a_p(c, p)
    rhs = arith.chi4(c.b) * (-1) ** c.a * arith.jacobi(c.a, 3 * c.b)
    return lhs, rhs


# ---------------------------------------------------------------------------
# approximate functional equation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CutoffKernel:
    """Y(u) = exp(-u), the kernel attached to G(t) = 1."""

    kind: str = "exponential"

    def __post_init__(self):
        if self.kind != "exponential":
            raise ValueError(f"unsupported kernel {self.kind!r}")

    def Y(self, u):
        return np.exp(-np.asarray(u, dtype=float))

    def tail_bound(self, T: float, nmax: int) -> float:
        """Bound on sum_{n > nmax} |a(n)|/n Y(2 pi n / T), using |a(n)|/n <= d(n)/sqrt(n) <= 2."""
        q = math.exp(-2 * math.pi / T)
        return 2 * q ** (nmax + 1) / (1 - q)

    def nmax_for(self, T: float, tol: float = TAIL_TOLERANCE) -> int:
        q = 2 * math.pi / T
        # smallest N with 2 e^{-q(N+1)} / (1 - e^{-q}) <= tol
        n = math.ceil((math.log(2 / tol) - math.log1p(-math.exp(-q))) / q) - 1
        return max(n, 1)


def kernel_weights(T: float, nmax: int, kernel: CutoffKernel = CutoffKernel()) -> np.ndarray:
    """w[n] = Y(2 pi n / T) / n for 0 <= n <= nmax (w[0] = 0)."""
    n = np.arange(nmax + 1, dtype=np.float64)
    w = np.zeros(nmax + 1)
    w[1:] = kernel.Y(2 * np.pi * n[1:] / T) / n[1:]
    return w


def partial_sum_L(
    c: CurveParams,
    T: float,
    kernel: CutoffKernel = CutoffKernel(),
    nmax: int | None = None,
    coeffs: CoeffSeries | None = None,
) -> float:
    """L_T = sum_n lambda(n)/sqrt(n) Y(2 pi n/T) = sum_n a(n)/n Y(2 pi n / T).

    Raises TruncationError unless Y(2 pi nmax / T) < 1e-12; the neglected tail
    is then at most kernel.tail_bound(T, nmax).
    """
    if nmax is None:
        nmax = kernel.nmax_for(T)
    if float(kernel.Y(2 * math.pi * nmax / T)) >= TAIL_TOLERANCE:
        raise TruncationError(f"nmax={nmax} too small for T={T}")
    if coeffs is None or coeffs.nmax < nmax:
        coeffs = CoeffSeries.build(c, nmax)
    return float(np.dot(coeffs.table[: nmax + 1].astype(np.float64), kernel_weights(T, nmax, kernel)))


@dataclass
class AFEResult:
    N: int
    epsilon: int
    central_value: float
    variance: float
    threshold: float
    separation: float
    candidates: list[dict]

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "epsilon": self.epsilon,
            "central_value": self.central_value,
            "variance": self.variance,
            "threshold": self.threshold,
            "separation": self.separation,
            "candidates": self.candidates,
        }


def conductor_candidates(c: CurveParams, alphas: Iterable[int] = range(1, 9)) -> list[int]:
    """N = 2^alpha 3^beta prod_{p | D, p > 3} p; beta > 0 only when 3 | D."""
    odd = 1
    for p in arith.factorize(c.D).primes:
        if p > 3:
            odd *= p
    betas = range(0, 6) if c.D % 3 == 0 else (0,)
    return sorted(2**al * 3**be * odd for al in alphas for be in betas)


def afe_consistency_search(
    c: CurveParams,
    N_candidates: Sequence[int] | None = None,
    threshold: float = 1e-6,
    kernel: CutoffKernel = CutoffKernel(),
) -> AFEResult:
    """Find (N, eps) making L_U + eps L_{N/U} independent of U.

    For each candidate the residual R(U) is evaluated on
    U in {sqrt(N)/4, sqrt(N)/2, sqrt(N), 2 sqrt(N), 4 sqrt(N)}; the pair with the
    smallest relative variance var(R) / (1 + mean(R)^2) wins. This is a
    heuristic: it does not compute the conductor.
    """
    if math.gcd(c.a, c.b) != 1 or not arith.is_squarefree(c.D):
        raise PreconditionError("needs gcd(a, b) = 1 and squarefree D")
    if N_candidates is None:
        N_candidates = conductor_candidates(c)
    odd_core = 1
    for p in arith.factorize(c.D).primes:
        if p > 3:
            odd_core *= p
    for N in N_candidates:
        if N < 1 or N % odd_core:
            raise PreconditionError(f"candidate N={N} is not divisible by {odd_core}")
    grid = (0.25, 0.5, 1.0, 2.0, 4.0)
    Tmax = 4 * math.sqrt(max(N_candidates))
    nmax = kernel.nmax_for(Tmax)
    coeffs = CoeffSeries.build(c, nmax).table.astype(np.float64)

    def L(T: float) -> float:
        nm = kernel.nmax_for(T)
        return float(np.dot(coeffs[: nm + 1], kernel_weights(T, nm, kernel)))

    rows = []
    for N in N_candidates:
        r = math.sqrt(N)
        LU = np.array([L(g * r) for g in grid])
        LV = np.array([L(N / (g * r)) for g in grid])
        for eps in (1, -1):
            R = LU + eps * LV
            mean = float(R.mean())
            var = float(R.var())
            rows.append(
                {"N": int(N), "epsilon": eps, "mean": mean, "variance": var,
                 "relative_variance": var / (1 + mean * mean), "values": R.tolist()}
            )
    rows.sort(key=lambda row: row["relative_variance"])
    best = rows[0]
    runner = rows[1]["relative_variance"] if len(rows) > 1 else math.inf
    sep = runner / best["relative_variance"] if best["relative_variance"] > 0 else math.inf
    result = AFEResult(
        N=best["N"],
        epsilon=best["epsilon"],
        central_value=best["mean"],
        variance=best["relative_variance"],
        threshold=threshold,
        separation=sep,
        candidates=rows,
    )
    if best["relative_variance"] >= threshold:
        raise AmbiguousConductorError(result)
    return result


def rational_rho_over_sqrt(c: CurveParams, m: int) -> Fraction:
    """rho(m)/sqrt(m) as an exact rational: mu(k) a(k) / (k l) for m = k l^2."""
    r = rho_m(c, m)
    if r.num == 0:
        return Fraction(0)
    # num / sqrt(m) / sqrt(m) = num / m
    return Fraction(r.num, m)


# ---------------------------------------------------------------------------
# mollifier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MollifierSpec:
    """M(E) = sum_{m <= M} rho(m)/sqrt(m) P(log(M/m)/log M), P(x) = sum_j P_coeffs[j] x^j."""

    M: float
    P_coeffs: tuple[float, ...] = (0.0, 1.0)

    def __post_init__(self):
        object.__setattr__(self, "P_coeffs", tuple(float(x) for x in self.P_coeffs))
        if self.M < 1:
            raise ValueError("mollifier length must be at least 1")
        if not self.P_coeffs or abs(self.P_coeffs[0]) > 1e-12:
            raise ValueError("P must satisfy P(0) = 0")

    @property
    def polynomial(self) -> np.polynomial.Polynomial:
        return np.polynomial.Polynomial(self.P_coeffs)

    def check_normalized(self, tol: float = 1e-12) -> bool:
        return abs(self.polynomial(1.0) - 1.0) <= tol

    def mmax(self) -> int:
        return int(math.floor(self.M + 1e-9))

    def smoothing(self) -> np.ndarray:
        """P(log(M/m)/log M) for 0 <= m <= mmax (entry 0 unused).

        At M = 1 only m = 1 survives, with its M -> 1+ limit P(1).
        """
        m = np.arange(1, self.mmax() + 1, dtype=float)
        out = np.zeros(self.mmax() + 1)
        if self.M > 1:
            out[1:] = self.polynomial(np.log(self.M / m) / math.log(self.M))
        else:
            out[1] = self.polynomial(1.0)
        return out

    def shape_constant(self) -> float:
        """int_0^1 F(x)^2 dx with F(x) = x (x P(x))'."""
        x = np.polynomial.Polynomial([0.0, 1.0])
        F = x * (x * self.polynomial).deriv()
        sq = (F * F).integ()
        return float(sq(1.0) - sq(0.0))


def mollifier_value(c: CurveParams, spec: MollifierSpec) -> float:
    """M(E) for one curve from exact rho values."""
    w = spec.smoothing()
    return float(sum(float(rational_rho_over_sqrt(c, m)) * w[m] for m in range(1, spec.mmax() + 1)))


def mollifier_block(coef: np.ndarray, a: np.ndarray, b: np.ndarray, spec: MollifierSpec) -> np.ndarray:
    """M(E) for every curve of a coefficient block (needs coef columns up to M)."""
    mmax = spec.mmax()
    if coef.shape[1] <= mmax:
        raise TruncationError(f"coefficient block stops before M = {mmax}")
    rho = rho_over_sqrt_block(coef, mmax, a, b)
    return rho @ spec.smoothing()
