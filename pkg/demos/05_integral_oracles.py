"""
Dirichlet-sum oracles for the contour integrals
===============================================

With the arithmetic factor set to 1 each integral is a finite sum over a few
integer variables. The sums show the log V law, the factorial placement in
the double-log-power integral, and the separation between equal and unequal
V in the four-variable integral.
"""

import math

from ecfamily import asymptotics

for V in (1e3, 1e4, 1e5, 1e6):
    v = asymptotics.I1_oracle(V)
    print(f"I1({V:.0e}) = {v:.6f}   minus log V: {v - math.log(V):.6f}   (-log 4pi = {-math.log(4 * math.pi):.6f})")

cmp = asymptotics.compare_I2([1e4, 1e5, 1e6], 1, 1)
for M, rd, rn in zip(cmp.M, cmp.ratio_denominator, cmp.ratio_numerator):
    print(f"M = {M:.0e}: oracle / closed form, factorials below {rd:.3f}, above {rn:.3f}")
print("matching placement:", cmp.matching)

g = asymptotics.I3_growth([14, 18, 22, 26, 30], 0.1, (0.1, 0.2), 0.2)
print(f"I3 log-power exponents: equal V {g.equal.exponent:.2f}, unequal V {g.unequal.exponent:.2f}")
