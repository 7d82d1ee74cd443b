import math

import numpy as np
import pytest

from ecfamily import asymptotics as asy
from ecfamily.asymptotics import _LogPrefix


def test_I1_examples():
    assert abs(asy.I1_oracle(1000) - 4.383) < 1e-3
    # I1(V) = log V - log 4 pi + 2 pi / V + O(V^-2): the decade step misses log 10 by 0.9 * 2 pi / V
    step = asy.I1_oracle(1e5) - asy.I1_oracle(1e4) - math.log(10)
    assert abs(step + 0.9 * 2 * math.pi / 1e4) < 1e-6
    assert abs(asy.I1_oracle(1e6) - asy.I1_oracle(1e5) - math.log(10)) < 1e-4
    with pytest.raises(ValueError):
        asy.I1_oracle(0)


def test_square_kernel_sum_matches_direct():
    pre = _LogPrefix(200, 3)
    ys = np.array([0.5, 1.0, 1.5, 4.0, 4.0001, 37.2, 1000.0, 39999.0])
    for j in range(4):
        got = asy.square_kernel_sum(ys, j, pre)
        ref = [asy.square_kernel_direct(float(y), j) for y in ys]
        assert np.allclose(got, ref, rtol=1e-12, atol=1e-12)


def brute_I2(M, j1, j2):
    total = 0.0
    for n in range(1, int(M) + 1):
        for k in range(1, int(math.sqrt(M / n)) + 2):
            for l in range(1, int(math.sqrt(M / n)) + 2):
                x1, x2 = M / (k * k * n), M / (l * l * n)
                if x1 > 1 and x2 > 1:
                    total += math.log(x1) ** j1 * math.log(x2) ** j2 / (
                        math.factorial(j1) * math.factorial(j2) * k * l * n)
    return total


@pytest.mark.parametrize("M,j1,j2", [(50.0, 1, 1), (120.5, 1, 2), (300.0, 2, 2)])
def test_I2_against_triple_loop(M, j1, j2):
    assert math.isclose(asy.I2_oracle(M, j1, j2), brute_I2(M, j1, j2), rel_tol=1e-11)


def test_I2_below_e_is_first_term():
    M = 2.5
    assert math.isclose(asy.I2_oracle(M, 1, 1), (math.log(M) + math.log(M / 2) * 0) ** 2 + 0, rel_tol=0.2)
    assert asy.I2_oracle(1.0, 1, 1) == 0.0


def test_I2_placement_moves_toward_one():
    cmp = asy.compare_I2([1e4, 1e5], 1, 1)
    assert cmp.matching == "denominator"
    assert abs(cmp.ratio_denominator[1] - 1) < abs(cmp.ratio_denominator[0] - 1)


def test_I2_I3_closed_equal_beta_reduces():
    for j1, j2 in [(1, 1), (2, 1), (2, 3)]:
        a = asy.I2_I3_closed(0.2, 0.2, j1, j2, 30.0)
        b = asy.I2_I3_simplified(0.2, j1, j2, 30.0)
        assert np.allclose(a, b, rtol=1e-12)


def test_I3_without_mobius_factorizes():
    V, M = 30.0, 400.0
    res = asy.I3_full_oracle(V, V, M, M, 1, 1, use_mobius=False)
    assert math.isclose(res.value, asy.I1_oracle(V) * asy.I2_oracle(M, 1, 1), rel_tol=1e-10)


def test_I3_bound_and_cost_guard():
    res = asy.I3_full_oracle(20.0, 40.0, 300.0, 300.0, 1, 1)
    assert res.conclusive and res.truncation_bound >= 0
    with pytest.raises(asy.OracleCostError):
        asy.I3_full_oracle(1e8, 1e8, 10.0, 10.0, 1, 1)
