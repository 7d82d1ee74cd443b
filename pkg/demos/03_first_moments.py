"""
First moments over the family
=============================

Averages L_U and L_U * M(E) over the weighted box a ~ X^{1/3}, b ~ X^{1/2}
and compares with the limiting constants. Pass a larger X on the command line
to watch the first moment approach c_S; X = 1e6 takes about a minute.
"""

import sys

from ecfamily import moments

X = float(sys.argv[1]) if len(sys.argv) > 1 else 1e5
w = moments.FamilyWindow(X)

count = moments.family_count(w)
print(f"X = {X:.0e}: {count:.1f} weighted curves, prediction {moments.family_count_predicted(w):.1f}")

lu = moments.first_moment_LU(w, nu=0.5)
print(f"mean L_U (U = X^0.5)      = {lu.values[0]:.5f}   c_S = {lu.target:.5f}   ratio {lu.ratio[0]:.4f}")

# with M = X^kappa the mollified mean drifts toward 1/2 as M grows
for kappa in (0.1, 0.2, 0.3):
    rep = moments.mollified_first_moment(w, nu=0.4, kappa=kappa)
    print(f"mean L_U M (M = {rep.params['M']:6.1f}) = {rep.values[0]:.5f}   target 0.5")
