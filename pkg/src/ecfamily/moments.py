"""Weighted family averages over S_X and growth-law fits.

A sweep walks the support box a-major in fixed-size chunks. Each chunk builds
its exact coefficient block, turns it into per-curve features (partial sums
L_T and mollifier values), and reduces weighted products of features to one
partial sum per chunk. Chunk partials are merged with math.fsum in chunk order,
so serial and parallel runs give identical numbers.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy import special

from .charsums import c_S
from .curves import (
    CurveParams,
    CutoffKernel,
    MollifierSpec,
    PreconditionError,
    coefficient_block,
    family_mask,
    kernel_weights,
    mollifier_block,
)
from .weights import Weight

THREADS_ENV = "ECFAMILY_THREADS"
CHUNK_SIZE = 500
MEMORY_BUDGET = 2 * 1024**3  # bytes for one coefficient block


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class FamilyWindow:
    """The weighted box a ~ A = X^{1/3}, b ~ B = X^{1/2}."""

    X: float
    weight: Weight = Weight()

    def __post_init__(self):
        if self.X < 8:
            raise ValueError("X must be at least 8")

    @property
    def A(self) -> float:
        return self.X ** (1 / 3)

    @property
    def B(self) -> float:
        return self.X ** (1 / 2)

    def power(self, exponent: float) -> float:
        return self.X**exponent

    def a_values(self) -> np.ndarray:
        lo, hi = self.weight.lo * self.A, self.weight.hi * self.A
        a = np.arange(max(1, math.floor(lo)), math.ceil(hi) + 1, dtype=np.int64)
        return a[self.weight.eta(a / self.A) > 0]

    def b_values(self) -> np.ndarray:
        lo, hi = self.weight.lo * self.B, self.weight.hi * self.B
        b = np.arange(max(1, math.floor(lo)), math.ceil(hi) + 1, dtype=np.int64)
        b = b[b % 2 == 1]
        return b[self.weight.eta(b / self.B) > 0]

    def as_dict(self) -> dict:
        return {"X": self.X, "A": self.A, "B": self.B, "weight": self.weight.as_dict()}


def _window_chunks(w: FamilyWindow, size: int = CHUNK_SIZE) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """(a, b) arrays of members of S with positive weight, a-major, in chunks of about `size`."""
    avals, bvals = w.a_values(), w.b_values()
    pend_a: list[np.ndarray] = []
    pend_b: list[np.ndarray] = []
    count = 0
    for a in avals:
        aa = np.full(bvals.size, a, dtype=np.int64)
        keep = family_mask(aa, bvals)
        pend_a.append(aa[keep])
        pend_b.append(bvals[keep])
        count += int(keep.sum())
        if count >= size:
            yield np.concatenate(pend_a), np.concatenate(pend_b)
            pend_a, pend_b, count = [], [], 0
    if count:
        yield np.concatenate(pend_a), np.concatenate(pend_b)


def family_iter(w: FamilyWindow) -> Iterator[tuple[CurveParams, float]]:
    """Every (a, b) in S with w(a/A, b/B) > 0 and its weight, a-major."""
    for a, b in _window_chunks(w):
        wt = w.weight(a / w.A, b / w.B)
        for ai, bi, wi in zip(a.tolist(), b.tolist(), wt.tolist()):
            yield CurveParams(ai, bi), wi


def family_count(w: FamilyWindow) -> float:
    """|S_X| = sum over S of w_X(a, b)."""
    return math.fsum(float(np.sum(w.weight(a / w.A, b / w.B))) for a, b in _window_chunks(w))


def family_density() -> float:
    """(1/2) zeta(5)^{-1} (1 - 2^{-5})^{-1}: the proportion of odd-b pairs in S."""
    return 0.5 / (special.zeta(5.0) * (1 - 2.0**-5))


def family_count_predicted(w: FamilyWindow) -> float:
    return family_density() * w.A * w.B * w.weight.w_hat00()


# ---------------------------------------------------------------------------
# sweep engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FeaturePlan:
    """Per-curve features and the products of them to average.

    Feature i < len(Ts) is L_{Ts[i]}; the rest are M(E) for each mollifier.
    A monomial is a tuple of feature indices (empty tuple = the constant 1).
    """

    Ts: tuple[float, ...] = ()
    mollifiers: tuple[MollifierSpec, ...] = ()
    monomials: tuple[tuple[int, ...], ...] = ((),)
    kernel: CutoffKernel = CutoffKernel()

    def nmax(self) -> int:
        n = max([self.kernel.nmax_for(T) for T in self.Ts] + [m.mmax() for m in self.mollifiers] + [1])
        return n

    def features(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        nmax = self.nmax()
        coef = coefficient_block(a, b, nmax).astype(np.float64)
        cols = [coef[:, : self.kernel.nmax_for(T) + 1] @ kernel_weights(T, self.kernel.nmax_for(T), self.kernel)
                for T in self.Ts]
        if self.mollifiers:
            icoef = coefficient_block(a, b, max(m.mmax() for m in self.mollifiers) + 1)
            cols += [mollifier_block(icoef, a, b, m) for m in self.mollifiers]
        return np.column_stack(cols) if cols else np.zeros((a.size, 0))


def _chunk_sums(args) -> np.ndarray:
    plan, w, a, b = args
    wt = w.weight(a / w.A, b / w.B)
    feats = plan.features(a, b)
    out = np.empty(len(plan.monomials) + 1)
    out[0] = float(np.sum(wt))
    for j, mono in enumerate(plan.monomials):
        v = np.ones(a.size)
        for i in mono:
            v = v * feats[:, i]
        out[j + 1] = float(np.dot(wt, v))
    return out


@dataclass
class SweepResult:
    count: float
    averages: np.ndarray
    curves: int
    seconds: float


def sweep(w: FamilyWindow, plan: FeaturePlan, threads: int | None = None,
          chunk: int = CHUNK_SIZE) -> SweepResult:
    """Weighted averages (1/|S_X|) sum w_X * prod(features) for every monomial of the plan."""
    threads = default_threads() if threads is None else threads
    if threads < 1:
        raise ValueError("threads must be at least 1")
    if chunk * (plan.nmax() + 1) * 8 * 2 > MEMORY_BUDGET:
        raise MemoryError("coefficient block exceeds the memory budget; lower the chunk size")
    t0 = time.perf_counter()
    jobs = [(plan, w, a, b) for a, b in _window_chunks(w, chunk)]
    if threads == 1 or len(jobs) < 2:
        parts = [_chunk_sums(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_chunk_sums, jobs))
    ncurves = sum(j[2].size for j in jobs)
    if not parts:
        raise ValueError("the window contains no curves")
    stacked = np.array(parts)
    totals = np.array([math.fsum(stacked[:, i]) for i in range(stacked.shape[1])])
    return SweepResult(totals[0], totals[1:] / totals[0], ncurves, time.perf_counter() - t0)


# ---------------------------------------------------------------------------
# reports and fits
# ---------------------------------------------------------------------------


@dataclass
class GrowthFit:
    """log(value) = exponent * log(ell) + intercept, least squares."""

    exponent: float
    intercept: float
    ell: list[float]
    values: list[float]

    @classmethod
    def fit(cls, ell: Sequence[float], values: Sequence[float]) -> "GrowthFit":
        ell = np.asarray(ell, dtype=float)
        vals = np.asarray(values, dtype=float)
        if np.any(ell <= 0) or np.any(vals <= 0):
            raise ValueError("growth fits need positive logs and positive values")
        slope, icpt = np.polyfit(np.log(ell), np.log(vals), 1)
        return cls(float(slope), float(icpt), ell.tolist(), vals.tolist())


@dataclass
class MomentReport:
    experiment: str
    params: dict
    grid: list
    values: list[float]
    target: float | None
    ratio: list[float] | None
    count: float
    curves: int
    runtime: float
    fit: GrowthFit | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.count > 0:
            raise ValueError("empty family")
        if self.ratio is not None and not all(math.isfinite(r) for r in self.ratio):
            raise ValueError("non-finite ratio")

    def as_dict(self) -> dict:
        d = asdict(self)
        d["fit"] = asdict(self.fit) if self.fit else None
        return d


# Exponent ranges under which each statement is made.
LIMITS = {
    "nu": (0.0, 7 / 9),
    "alpha": (0.0, 5 / 18),
    "beta": (0.0, 5 / 18),
}


def check_exponent(name: str, value: float, force: bool = False) -> None:
    lo, hi = LIMITS[name]
    if not lo < value < hi and not force:
        raise PreconditionError(f"{name}={value} outside ({lo:.4g}, {hi:.4g})")


def diagonal_length(V: float) -> float:
    """sum_n e^{-4 pi n/V}/n: the exact log-length of the diagonal for the exponential kernel."""
    return -math.log(-math.expm1(-4 * math.pi / V))


def first_moment_LU(w: FamilyWindow, nu: float, threads: int | None = None, force: bool = False,
                    cs_pmax: int = 47, cs_kmax: int = 16) -> MomentReport:
    check_exponent("nu", nu, force)
    U = w.power(nu)
    res = sweep(w, FeaturePlan(Ts=(U,), monomials=((0,),)), threads)
    cs = c_S(cs_pmax, cs_kmax)
    val = float(res.averages[0])
    return MomentReport(
        "first-moment", {"nu": nu, "U": U, **w.as_dict()}, [U], [val], cs.value,
        [val / cs.value], res.count, res.curves, res.seconds,
        extra={"c_S": cs.as_dict(), "deviation": abs(val / cs.value - 1)},
    )


def mollified_first_moment(w: FamilyWindow, nu: float, kappa: float, P: Sequence[float] = (0.0, 1.0),
                           threads: int | None = None, force: bool = False) -> MomentReport:
    check_exponent("nu", nu, force)
    if not 0 <= kappa < 7 / 9 - nu and not force:
        raise PreconditionError(f"kappa={kappa} must lie in [0, 7/9 - nu)")
    U, M = w.power(nu), w.power(kappa)
    spec = MollifierSpec(M, tuple(P))
    res = sweep(w, FeaturePlan(Ts=(U,), mollifiers=(spec,), monomials=((0, 1), (0,), (1,))), threads)
    val = float(res.averages[0])
    return MomentReport(
        "mollified-first-moment", {"nu": nu, "kappa": kappa, "U": U, "M": M, "P": list(spec.P_coeffs),
                                   **w.as_dict()},
        [M], [val], 0.5, [val / 0.5], res.count, res.curves, res.seconds,
        extra={"first_moment": float(res.averages[1]), "mollifier_mean": float(res.averages[2])},
    )


def second_moment_LV(w: FamilyWindow, alphas: Sequence[float], threads: int | None = None,
                     force: bool = False) -> MomentReport:
    """Average of L_V^2 across V = X^alpha; fit of the (log V) growth exponent."""
    for al in alphas:
        check_exponent("alpha", al, force)
    Vs = tuple(w.power(al) for al in alphas)
    mono = tuple((i, i) for i in range(len(Vs)))
    res = sweep(w, FeaturePlan(Ts=Vs, monomials=mono), threads)
    vals = [float(v) for v in res.averages]
    fit = GrowthFit.fit([math.log(V) for V in Vs], vals) if len(Vs) > 1 else None
    extra = {}
    if len(Vs) > 1:
        # same fit with log V replaced by the kernel's own diagonal length
        extra["fit_diagonal_length"] = asdict(GrowthFit.fit([diagonal_length(V) for V in Vs], vals))
    return MomentReport("second-moment", {"alphas": list(alphas), **w.as_dict()}, list(Vs), vals,
                        None, None, res.count, res.curves, res.seconds, fit, extra)


def mollifier_second_moment(w: FamilyWindow, betas: Sequence[float], P: Sequence[float] = (0.0, 1.0),
                            threads: int | None = None, force: bool = False) -> MomentReport:
    """Average of M(E)^2 across M = X^beta; fit of the (log M) growth exponent."""
    for be in betas:
        check_exponent("beta", be, force)
    specs = tuple(MollifierSpec(w.power(be), tuple(P)) for be in betas)
    mono = tuple((i, i) for i in range(len(specs)))
    res = sweep(w, FeaturePlan(mollifiers=specs, monomials=mono), threads)
    vals = [float(v) for v in res.averages]
    fit = GrowthFit.fit([math.log(s.M) for s in specs], vals) if len(specs) > 1 else None
    return MomentReport("mollifier-second-moment", {"betas": list(betas), "P": list(specs[0].P_coeffs),
                                                     **w.as_dict()},
                        [s.M for s in specs], vals, None, None, res.count, res.curves, res.seconds, fit,
                        extra={"shape_constant": specs[0].shape_constant()})


def cross_moment(w: FamilyWindow, alpha1: float, alpha2: float, beta1: float, beta2: float,
                 scales: Sequence[float] = (1.0,), P: Sequence[float] = (0.0, 1.0),
                 threads: int | None = None, force: bool = False) -> MomentReport:
    """Average of L_{V1} L_{V2} M1(E) M2(E) with all exponents multiplied by each scale s.

    The growth fit is against s log X, the common logarithmic size. A zero beta
    means the corresponding mollifier is identically 1.
    """
    if not force:
        for s in scales:
            if s * (alpha1 + alpha2 + beta1 + beta2) >= 5 / 9:
                raise PreconditionError("alpha1 + alpha2 + beta1 + beta2 must stay below 5/9")
    Ts: list[float] = []
    specs: list[MollifierSpec] = []
    monos = []
    for s in scales:
        t0 = len(Ts)
        Ts += [w.power(s * alpha1), w.power(s * alpha2)]
        mono = [t0, t0 + 1]
        for be in (beta1, beta2):
            if be > 0:
                specs.append(MollifierSpec(w.power(s * be), tuple(P)))
                mono.append(-len(specs))
        monos.append(mono)
    nT = len(Ts)
    # mollifier features sit after the L features
    monomials = tuple(tuple(i if i >= 0 else nT + (-i - 1) for i in m) for m in monos)
    res = sweep(w, FeaturePlan(Ts=tuple(Ts), mollifiers=tuple(specs), monomials=monomials), threads)
    vals = [float(v) for v in res.averages]
    logX = math.log(w.X)
    fit = GrowthFit.fit([s * logX for s in scales], vals) if len(scales) > 1 else None
    return MomentReport("cross-moment", {"alpha1": alpha1, "alpha2": alpha2, "beta1": beta1, "beta2": beta2,
                                         "scales": list(scales), "P": list(P), **w.as_dict()},
                        list(scales), vals, None, None, res.count, res.curves, res.seconds, fit)


def root_number_signs(w: FamilyWindow) -> dict:
    """Tally of prod_{p | D} a(p) = +-1 over the squarefree-D members of the window.

    Exploratory only: nothing here is averaged into a moment.
    """
    from .arith import chi4, is_squarefree, jacobi

    plus = minus = 0
    for c, _ in family_iter(w):
        if not is_squarefree(c.D):
            continue
        sign = chi4(c.b) * (-1) ** c.a * jacobi(c.a, 3 * c.b)
        plus += sign == 1
        minus += sign == -1
    return {"plus": plus, "minus": minus}
