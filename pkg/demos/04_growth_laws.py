"""
Second moments and their log-growth
===================================

Fits log(average) against log(log length) for L_V^2 and M(E)^2. At desk
scale V and M stay below about 50, and the fitted exponents mostly measure
how the kernel switches on rather than the asymptotic powers.
"""

import sys

from ecfamily import moments

X = float(sys.argv[1]) if len(sys.argv) > 1 else 1e5
w = moments.FamilyWindow(X)
grid = (0.10, 0.14, 0.18, 0.22, 0.26)

lv = moments.second_moment_LV(w, grid)
for V, v in zip(lv.grid, lv.values):
    print(f"V = {V:7.2f}   mean L_V^2 = {v:.4f}   diagonal length {moments.diagonal_length(V):.4f}")
print(f"exponent against log V: {lv.fit.exponent:.2f}; "
      f"against the diagonal length: {lv.extra['fit_diagonal_length']['exponent']:.2f}")

m2 = moments.mollifier_second_moment(w, grid)
for M, v in zip(m2.grid, m2.values):
    print(f"M = {M:7.2f}   mean M^2 = {v:.4f}")
print(f"exponent against log M: {m2.fit.exponent:.2f}")
