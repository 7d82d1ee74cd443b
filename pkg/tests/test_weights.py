import math

import numpy as np
from scipy import integrate

from ecfamily.weights import Weight


def test_eta_peak_and_support():
    w = Weight()
    assert math.isclose(float(w.eta(1.5)), 1.0)
    assert float(w.eta(1.0)) == 0 and float(w.eta(2.0)) == 0


def test_eta_hat_zero_is_integral():
    w = Weight()
    assert abs(w.eta_hat([0.0])[0].real - w.eta_integral()) < 1e-10
    assert abs(w.w_hat00() - w.eta_integral() ** 2) < 1e-8


def test_eta_hat_against_quad():
    w = Weight()
    for xi in (0.7, 3.0, 11.5):
        re, _ = integrate.quad(lambda x: float(w.eta(x)) * math.cos(2 * math.pi * x * xi), 1, 2, limit=400)
        im, _ = integrate.quad(lambda x: -float(w.eta(x)) * math.sin(2 * math.pi * x * xi), 1, 2, limit=400)
        assert abs(complex(w.eta_hat([xi])[0]) - complex(re, im)) < 1e-10


def test_sharp_transform():
    w = Weight("sharp")
    assert math.isclose(w.w_hat00(), 1.0)
    assert abs(complex(w.eta_hat([1.0])[0])) < 1e-12


def test_decay_cutoff_scales():
    w = Weight()
    assert w.decay_cutoff(1.0) >= w.decay_cutoff(2.0)
    xi = w.decay_frequency()
    assert np.max(np.abs(w.eta_hat(np.linspace(xi, xi + 20, 200)))) < 1e-12
