"""Dirichlet-sum oracles for multiple contour integrals of zeta quotients.

With the arithmetic factor g set to 1, each integral against Perron-type kernels
x^s / s^{j+1} (or V^v / v) is exactly a finite weighted sum: the kernel turns
into log(x/y)^j / j! on y < x, and every zeta or 1/zeta factor into a sum over
one integer variable with weight 1 or mu(d). The oracles below evaluate those
sums in floating point without truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arith import mobius_table
from .moments import GrowthFit

MAX_LENGTH = 10**8


class OracleCostError(RuntimeError):
    pass


@dataclass(frozen=True)
class LogPolyAsymptotic:
    """value ~ coefficient * (log x)^power."""

    coefficient: float
    power: int
    params: dict = field(default_factory=dict)

    def __call__(self, log_x: float) -> float:
        return self.coefficient * log_x**self.power


# ---------------------------------------------------------------------------
# one V variable pair: zeta(1 + v1 + v2) V^{v1+v2}/(v1 v2)
# ---------------------------------------------------------------------------


def I1_oracle(V: float) -> float:
    """sum_n e^{-4 pi n / V} / n = -log(1 - e^{-4 pi/V}): both v-kernels are the exponential cutoff."""
    if V <= 0:
        raise ValueError("V must be positive")
    return -math.log(-math.expm1(-4 * math.pi / V))


def I1_asymptotic() -> LogPolyAsymptotic:
    return LogPolyAsymptotic(1.0, 1, {"constant": -math.log(4 * math.pi)})


# ---------------------------------------------------------------------------
# kernel sums over a zeta(1 + 2s) variable
# ---------------------------------------------------------------------------


class _LogPrefix:
    """S_i[K] = sum_{k <= K} (log k)^i / k for i <= imax, K <= kmax."""

    def __init__(self, kmax: int, imax: int):
        k = np.arange(1, kmax + 1, dtype=float)
        lk = np.log(k)
        self.S = np.zeros((imax + 1, kmax + 1))
        for i in range(imax + 1):
            self.S[i, 1:] = np.cumsum(lk**i / k)


def _count_below_sqrt(y: np.ndarray) -> np.ndarray:
    """Number of k >= 1 with k^2 < y."""
    K = np.floor(np.sqrt(np.maximum(y, 0.0))).astype(np.int64)
    K -= (K * K >= y).astype(np.int64)
    K += ((K + 1) * (K + 1) < y).astype(np.int64)
    return np.maximum(K, 0)


def square_kernel_sum(y: np.ndarray, j: int, pre: _LogPrefix) -> np.ndarray:
    """A_j(y) = sum_{k^2 < y} (1/k) log(y/k^2)^j / j!, via a binomial expansion in log k."""
    y = np.asarray(y, dtype=float)
    K = _count_below_sqrt(y)
    ly = np.log(np.maximum(y, 1.0))
    out = np.zeros(y.shape)
    for i in range(j + 1):
        out += math.comb(j, i) * ly ** (j - i) * (-2.0) ** i * pre.S[i, K]
    return out / math.factorial(j)


def square_kernel_direct(y: float, j: int) -> float:
    """A_j(y) by direct summation (reference for square_kernel_sum)."""
    total = 0.0
    k = 1
    while k * k < y:
        total += math.log(y / (k * k)) ** j / k
        k += 1
    return total / math.factorial(j)


# ---------------------------------------------------------------------------
# zeta(1+s1+s2) zeta(1+2s1) zeta(1+2s2) M1^s1 M2^s2 / (s1^{j1+1} s2^{j2+1})
# ---------------------------------------------------------------------------


def I2_oracle(M: float, j1: int, j2: int, M2: float | None = None, block: int = 1 << 20) -> float:
    """sum over k, l, n with k^2 n < M, l^2 n < M2 of (1/(k l n)) log(M/(k^2 n))^j1/j1! log(M2/(l^2 n))^j2/j2!."""
    M2 = M if M2 is None else M2
    if j1 < 0 or j2 < 0:
        raise ValueError("j1, j2 must be nonnegative")
    nmax = math.ceil(min(M, M2)) - 1
    if max(M, M2) > MAX_LENGTH:
        raise OracleCostError(f"M = {max(M, M2):g} exceeds {MAX_LENGTH:g}")
    if nmax < 1:
        return 0.0
    pre = _LogPrefix(math.isqrt(int(max(M, M2))) + 1, max(j1, j2))
    total = []
    for start in range(1, nmax + 1, block):
        n = np.arange(start, min(start + block, nmax + 1), dtype=float)
        total.append(float(np.sum(square_kernel_sum(M / n, j1, pre) * square_kernel_sum(M2 / n, j2, pre) / n)))
    return math.fsum(total)


def I2_closed(M: float, j1: int, j2: int, placement: str = "denominator") -> float:
    """Leading term (1/4) (log M)^{j1+j2+3} / (j1+j2+3) times 1/((j1+1)!(j2+1)!) or (j1+1)!(j2+1)!."""
    L = math.log(M)
    base = 0.25 * L ** (j1 + j2 + 3) / (j1 + j2 + 3)
    f = math.factorial(j1 + 1) * math.factorial(j2 + 1)
    if placement == "denominator":
        return base / f
    if placement == "numerator":
        return base * f
    raise ValueError("placement must be 'denominator' or 'numerator'")


@dataclass
class I2Comparison:
    M: list[float]
    oracle: list[float]
    ratio_denominator: list[float]
    ratio_numerator: list[float]
    matching: str

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def compare_I2(Ms, j1: int = 1, j2: int = 1) -> I2Comparison:
    """Oracle values against both placements of the factorials; picks the one tending to 1."""
    vals = [I2_oracle(M, j1, j2) for M in Ms]
    rd = [v / I2_closed(M, j1, j2, "denominator") for v, M in zip(vals, Ms)]
    rn = [v / I2_closed(M, j1, j2, "numerator") for v, M in zip(vals, Ms)]
    matching = "denominator" if abs(math.log(rd[-1])) < abs(math.log(rn[-1])) else "numerator"
    return I2Comparison(list(Ms), vals, rd, rn, matching)


# ---------------------------------------------------------------------------
# closed forms for the two pieces of I1 in the V1 != V2 analysis
# ---------------------------------------------------------------------------


def I2_I3_closed(beta1: float, beta2: float, j1: int, j2: int, logX: float) -> tuple[float, float]:
    """Binomial-sum closed forms (g(0) = 1) with M_i = X^{beta_i}, beta1 <= beta2."""
    if beta1 <= 0 or beta2 < beta1:
        raise ValueError("need 0 < beta1 <= beta2")
    if j1 < 1 or j2 < 1:
        raise ValueError("j1, j2 must be positive")
    d = beta2 - beta1
    J = j1 + j2
    s2 = sum(math.comb(j2 - 1, k) * d**k * beta1 ** (J - k - 1) / (J - k - 1) for k in range(j2))
    I2 = logX ** (J - 1) / (math.factorial(j1 - 1) * math.factorial(j2 - 1)) * s2
    t1 = sum(math.comb(j2 - 1, k) * d**k * beta1 ** (J - k) / (J - k) for k in range(j2))
    t2 = sum(math.comb(j2, k) * d**k * beta1 ** (J - k) / (J - k) for k in range(j2 + 1))
    I3 = logX**J / (math.factorial(j1) * math.factorial(j2)) * (j2 * t1 + j1 * t2)
    return I2, I3


def I2_I3_simplified(beta: float, j1: int, j2: int, logX: float) -> tuple[float, float]:
    """The equal-beta forms, with log M = beta log X."""
    L = beta * logX
    J = j1 + j2
    I2 = L ** (J - 1) / (math.factorial(j1 - 1) * math.factorial(j2 - 1) * (J - 1))
    I3 = L**J / (math.factorial(j1) * math.factorial(j2))
    return I2, I3


def I2_direct(M1: float, M2: float, j1: int, j2: int) -> float:
    """sum_{n <= M1} (1/n) log(M1/n)^{j1-1} log(M2/n)^{j2-1} / ((j1-1)!(j2-1)!)."""
    n = np.arange(1, math.floor(M1) + 1, dtype=float)
    terms = np.log(M1 / n) ** (j1 - 1) * np.log(M2 / n) ** (j2 - 1) / n
    return math.fsum(terms.tolist()) / (math.factorial(j1 - 1) * math.factorial(j2 - 1))


# ---------------------------------------------------------------------------
# the full four-variable integral
# ---------------------------------------------------------------------------


@dataclass
class I3Result:
    value: float
    truncation_bound: float
    terms: int
    conclusive: bool
    params: dict

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _mobius_pairs(P: float, cap1: float, cap2: float, mu: np.ndarray,
                  use_mobius: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(d1, d2, mu(d1) mu(d2) / (d1 d2)) over squarefree d1 < cap1, d2 < cap2 with d1 d2 <= P."""
    if not use_mobius:
        return np.array([1]), np.array([1]), np.array([1.0])
    d1s, d2s = [], []
    for d1 in range(1, min(int(math.floor(P)), math.ceil(cap1) - 1) + 1):
        if mu[d1] == 0:
            continue
        d2 = np.arange(1, min(int(P // d1), math.ceil(cap2) - 1) + 1)
        d2 = d2[mu[d2] != 0]
        d1s.append(np.full(d2.size, d1))
        d2s.append(d2)
    if not d1s:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    d1 = np.concatenate(d1s)
    d2 = np.concatenate(d2s)
    w = mu[d1].astype(float) * mu[d2] / (d1 * d2)
    return d1, d2, w


def _divisor_weighted_sum(V: float, P: float) -> tuple[float, float]:
    """(sum_{q <= P} tau(q)/q e^{-2 pi q/V}, bound on the same sum over q > P).

    The tail uses tau(q) <= 2 sqrt(q): sum_{q > P} <= 2 int_{P}^inf t^{-1/2} e^{-2 pi t/V} dt.
    """
    top = int(math.floor(P))
    tau = np.zeros(top + 1)
    for d in range(1, top + 1):
        tau[d::d] += 1
    q = np.arange(1, top + 1, dtype=float)
    head = float(np.sum(tau[1:] / q * np.exp(-2 * np.pi * q / V)))
    lam = 2 * math.pi / V
    tail = 2 * math.sqrt(math.pi / lam) * math.erfc(math.sqrt(lam * top))
    return head, tail


def I3_full_oracle(V1: float, V2: float, M1: float, M2: float, j1: int, j2: int,
                   use_mobius: bool = True, cut: float = 6.0, max_terms: int = 5 * 10**7) -> I3Result:
    """The four-fold zeta-quotient integral with g = 1, as a Dirichlet multi-sum.

    s-variables carry the Perron kernels x^s / s^{j+1}; v-variables carry the
    exponential-cutoff kernel (the Mellin pair of Gamma(1 + v) (2 pi)^{-v} / v).
    Variables: k1, k2 (zeta(1+2s_i)), n (zeta(1+s1+s2)), m (zeta(1+v1+v2)) with
    weight 1/x, and d_{ij} (1/zeta(1+s_i+v_j)) with weight mu(d)/d. Constraints
    k1^2 n d11 d12 < M1 and k2^2 n d21 d22 < M2; v-weight
    exp(-2 pi m (d11 d21/V1 + d12 d22/V2)). The m-sum is -log(1 - e^{-2 pi c});
    (d11, d12, d21, d22) collapse onto (a, b) = (d11 d12, d21 d22), and the (k, n)
    sums use the A_j kernels. Products d11 d21 > cut V1 or d12 d22 > cut V2 are
    dropped and bounded.

    use_mobius=False keeps only d = 1 (every 1/zeta replaced by 1).
    """
    if max(V1, V2, M1, M2) > 10**7:
        raise OracleCostError("parameters above 1e7")
    P1, P2 = cut * V1, cut * V2
    mu = mobius_table(int(max(P1, P2, M1, M2)) + 2)
    p1, q1, w1 = _mobius_pairs(P1, M1, M2, mu, use_mobius)   # (d11, d21)
    p2, q2, w2 = _mobius_pairs(P2, M1, M2, mu, use_mobius)   # (d12, d22)
    if p1.size * p2.size > max_terms:
        raise OracleCostError(f"{p1.size * p2.size} Mobius combinations exceed {max_terms}")

    # combine (d11, d21) x (d12, d22) in slabs, accumulating weights onto (a, b)
    stride = int(M2) + 2
    keys_parts, wt_parts = [], []
    slab = max(1, max_terms // max(p2.size, 1) // 10)
    c2 = (p2 * q2) / V2
    for s in range(0, p1.size, slab):
        d11 = p1[s:s + slab, None]
        d21 = q1[s:s + slab, None]
        a = d11 * p2[None, :]
        b = d21 * q2[None, :]
        keep = (a < M1) & (b < M2)
        if not keep.any():
            continue
        c = (d11 * d21) / V1 + c2[None, :]
        wt = (w1[s:s + slab, None] * w2[None, :]) * -np.log(-np.expm1(-2 * np.pi * c))
        key = a[keep].astype(np.int64) * stride + b[keep]
        uk, inv = np.unique(key, return_inverse=True)
        keys_parts.append(uk)
        wt_parts.append(np.bincount(inv, weights=wt[keep]))

    if not keys_parts:
        return I3Result(0.0, 0.0, 0, True, {})
    uk, inv = np.unique(np.concatenate(keys_parts), return_inverse=True)
    W = np.bincount(inv, weights=np.concatenate(wt_parts))
    A = (uk // stride).astype(float)
    B = (uk % stride).astype(float)
    pre = _LogPrefix(math.isqrt(int(max(M1, M2))) + 2, max(j1, j2))
    # T(a, b) = sum_n (1/n) A_j1(M1/(n a)) A_j2(M2/(n b)), summed over n in order
    # pair i is active for n < lim[i]; sorted descending, the active set is a prefix
    lim = np.minimum(M1 / A, M2 / B)
    order = np.argsort(-lim, kind="stable")
    A, B, W, lim = A[order], B[order], W[order], lim[order]
    partial = []
    n = 1
    while True:
        cnt = int(np.sum(lim > n)) if n < 64 else int(np.searchsorted(-lim, -n, side="left"))
        if cnt == 0:
            break
        t = square_kernel_sum(M1 / (n * A[:cnt]), j1, pre) * square_kernel_sum(M2 / (n * B[:cnt]), j2, pre)
        partial.append(float(np.dot(W[:cnt], t)) / n)
        n += 1
    value = math.fsum(partial)
    params = {"V1": V1, "V2": V2, "M1": M1, "M2": M2, "j1": j1, "j2": j2, "mobius": use_mobius,
              "cut": cut}
    bound = 0.0
    if use_mobius:
        # |T(a, b)| <= T(1, 1) since A_j is positive and increasing; the m-sum is
        # at most e^{-2 pi c} / (1 - e^{-2 pi cut}) once c >= cut
        t11 = I2_oracle(M1, j1, j2, M2)
        h1, t1 = _divisor_weighted_sum(V1, P1)
        h2, t2 = _divisor_weighted_sum(V2, P2)
        bound = t11 * (t1 * (h2 + t2) + (h1 + t1) * t2) / -math.expm1(-2 * math.pi * cut)
    conclusive = value != 0.0 and bound <= 0.1 * abs(value)
    return I3Result(value, bound, int(W.size), conclusive, params)


@dataclass
class I3GrowthReport:
    equal: GrowthFit
    unequal: GrowthFit
    gap: float
    predicted_equal: int
    predicted_unequal: int

    def as_dict(self) -> dict:
        return {
            "equal": self.equal.__dict__,
            "unequal": self.unequal.__dict__,
            "gap": self.gap,
            "predicted_equal": self.predicted_equal,
            "predicted_unequal": self.predicted_unequal,
        }


def I3_growth(logXs, alpha_equal: float, alphas_unequal: tuple[float, float], beta: float,
              j1: int = 1, j2: int = 1) -> I3GrowthReport:
    """Fit log-power exponents of the I3 oracle against log X in both regimes."""
    eq, uneq = [], []
    for lx in logXs:
        V = math.exp(alpha_equal * lx)
        M = math.exp(beta * lx)
        eq.append(I3_full_oracle(V, V, M, M, j1, j2).value)
        Va, Vb = (math.exp(a * lx) for a in alphas_unequal)
        uneq.append(I3_full_oracle(Va, Vb, M, M, j1, j2).value)
    fe = GrowthFit.fit(logXs, eq)
    fu = GrowthFit.fit(logXs, uneq)
    return I3GrowthReport(fe, fu, fe.exponent - fu.exponent, j1 + j2 + 3, j1 + j2)
