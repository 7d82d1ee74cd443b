"""Smooth family weights w(x, y) = eta(x) eta(y) and their Fourier transforms.

The Fourier convention is w_hat(xi, zeta) = int int w(x, y) e(-(x xi + y zeta)) dx dy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate


@lru_cache(maxsize=32)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(n)


@dataclass(frozen=True)
class Weight:
    """Separable weight on [lo, hi]^2.

    profile "bump": eta(x) = exp(1/(t^2 - 1) + 1), t = (2x - lo - hi)/(hi - lo),
    peak 1 at the midpoint. profile "sharp": indicator of [lo, hi] (diagnostics only).
    """

    profile: str = "bump"
    lo: float = 1.0
    hi: float = 2.0

    def __post_init__(self):
        if self.profile not in ("bump", "sharp"):
            raise ValueError(f"unknown weight profile {self.profile!r}")
        if not 0 < self.lo < self.hi:
            raise ValueError("support must satisfy 0 < lo < hi")

    def eta(self, x):
        x = np.asarray(x, dtype=float)
        if self.profile == "sharp":
            return ((x >= self.lo) & (x <= self.hi)).astype(float)
        t = (2 * x - self.lo - self.hi) / (self.hi - self.lo)
        out = np.zeros_like(t)
        inside = np.abs(t) < 1
        ti = t[inside]
        out[inside] = np.exp(1.0 / (ti * ti - 1.0) + 1.0)
        return out

    def __call__(self, x, y):
        return self.eta(x) * self.eta(y)

    def eta_integral(self) -> float:
        """int eta by adaptive quadrature (independent of eta_hat)."""
        if self.profile == "sharp":
            return self.hi - self.lo
        val, _ = integrate.quad(lambda x: float(self.eta(x)), self.lo, self.hi,
                                epsabs=1e-14, epsrel=1e-13, limit=200)
        return val

    def eta_hat(self, xi, nodes: int | None = None) -> np.ndarray:
        """eta_hat(xi) = int eta(x) e(-x xi) dx by Gauss-Legendre quadrature.

        The node count grows with the largest frequency so the oscillation stays
        resolved (at least 64).
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.profile == "sharp":
            return self._sharp_hat(xi)
        if nodes is None:
            fmax = float(np.max(np.abs(xi))) if xi.size else 0.0
            nodes = max(64, int(4 * fmax * (self.hi - self.lo)) + 64)
        t, wt = _gauss_legendre(nodes)
        half = 0.5 * (self.hi - self.lo)
        mid = 0.5 * (self.hi + self.lo)
        vals = self.eta(mid + half * t) * wt * half
        # centre the phase at the midpoint to keep the arguments small
        return np.exp(-2j * np.pi * xi * mid) * (np.exp(-2j * np.pi * np.outer(xi, half * t)) @ vals)

    def _sharp_hat(self, xi: np.ndarray) -> np.ndarray:
        out = np.empty(xi.shape, dtype=complex)
        zero = xi == 0
        out[zero] = self.hi - self.lo
        z = xi[~zero]
        out[~zero] = (np.exp(-2j * np.pi * z * self.lo) - np.exp(-2j * np.pi * z * self.hi)) / (2j * np.pi * z)
        return out

    def w_hat(self, xi, zeta) -> np.ndarray:
        return self.eta_hat(xi) * self.eta_hat(zeta)

    def w_hat00(self) -> float:
        return float(self.eta_hat([0.0])[0].real ** 2)

    def decay_frequency(self, tol: float = 1e-13, xi_max: float = 2000.0) -> float:
        """Smallest xi past which |eta_hat| stays below tol * eta_hat(0).

        eta_hat oscillates, so a point is accepted only when a whole window of
        width 4 after it is below the threshold. The double-precision floor is
        near 1e-15, so tol should stay above that.
        """
        if self.profile == "sharp":
            raise ValueError("a sharp cutoff has no rapidly decaying transform")
        return _decay_frequency(self, tol, xi_max)

    def decay_cutoff(self, scale: float, tol: float = 1e-13) -> int:
        """Frequency count H with |eta_hat(h * scale)| <= tol * eta_hat(0) for h > H."""
        return int(math.ceil(self.decay_frequency(tol) / scale))

    def as_dict(self) -> dict:
        return {"profile": self.profile, "support": [self.lo, self.hi]}


@lru_cache(maxsize=64)
def _decay_frequency(weight: Weight, tol: float, xi_max: float) -> float:
    ref = abs(weight.eta_hat([0.0])[0])
    step, width = 0.125, 4.0
    need = int(width / step)
    run, start = 0, 0.0
    while start <= xi_max:
        grid = start + step * np.arange(128)
        small = np.abs(weight.eta_hat(grid)) <= tol * ref
        for xi, ok in zip(grid, small):
            run = run + 1 if ok else 0
            if run == need:
                return float(xi - width + step)
        start += 128 * step
    raise RuntimeError(f"eta_hat does not fall below {tol} before xi = {xi_max}")


def is_smooth(weight: Weight) -> bool:
    return weight.profile == "bump"


def support_box(weight: Weight, A: float, B: float) -> tuple[range, range]:
    """Integer a, b with a/A and b/B inside the (closed) support."""
    a0, a1 = math.ceil(weight.lo * A), math.floor(weight.hi * A)
    b0, b1 = math.ceil(weight.lo * B), math.floor(weight.hi * B)
    return range(max(a0, 1), a1 + 1), range(max(b0, 1), b1 + 1)
