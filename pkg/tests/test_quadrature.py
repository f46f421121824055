import math

import numpy as np
import pytest

from betadensity.quadrature import (ConvergenceError, adaptive, cheb_coefficients, gauss_cheb1,
                                    gauss_cheb2, gauss_jacobi_unit, gauss_laguerre)


def test_chebyshev_rules():
    # int_0^2 sqrt(t (2 - t)) dt = pi/2 ; int 1/sqrt = pi
    assert gauss_cheb2(lambda t: np.ones_like(t), 0.0, 2.0, 8) == pytest.approx(math.pi / 2)
    assert gauss_cheb1(lambda t: np.ones_like(t), 0.0, 2.0, 8) == pytest.approx(math.pi)
    assert adaptive(gauss_cheb2, np.exp, 0.0, 1.0) == pytest.approx(
        gauss_cheb2(np.exp, 0.0, 1.0, 200), rel=1e-13)


def test_adaptive_reports_nonconvergence():
    with pytest.raises(ConvergenceError):
        adaptive(gauss_cheb1, lambda t: np.cos(2000 * t), 0.0, 1.0, n_max=128)


def test_cheb_coefficients_of_known_function():
    # log|x - t| on [-1,1] has a_k = -2 nu^k / k with nu = x - sqrt(x^2 - 1)
    x = 3.0
    nu = x - math.sqrt(x * x - 1)
    a = cheb_coefficients(lambda t: np.log(np.abs(x - t)), -1.0, 1.0, 20)
    k = np.arange(1, 21)
    assert a == pytest.approx(-2 * nu ** k / k, abs=1e-14)


def test_weighted_gauss_rules():
    t, w = gauss_jacobi_unit(10, 2.0, 3.0)
    assert w.sum() == pytest.approx(math.gamma(3) * math.gamma(4) / math.gamma(7))
    r, w = gauss_laguerre(10, 1.5)
    assert np.dot(w, r) == pytest.approx(math.gamma(3.5))
