import math

import mpmath
import numpy as np
import pytest
from scipy.special import gammaln, roots_genlaguerre

from betadensity.ensemble import JacobiEnsemble, LaguerreEnsemble
from betadensity.exactdensity import (brute_force_density, brute_force_for, exact_density,
                                      exact_density_jacobi_beta1, exact_density_jacobi_beta2,
                                      exact_density_laguerre_beta1, exact_density_laguerre_beta2,
                                      jacobi_orthonormal, laguerre_kernel_sum, laguerre_poly)
from betadensity.quadrature import gauss_jacobi_unit


def _density(ens, y):
    return np.asarray(exact_density(ens, y).to_float(), dtype=float)


def _laguerre_mp(n, a, x):
    with mpmath.workprec(128):
        x, a = mpmath.mpf(x), mpmath.mpf(a)
        prev, cur = mpmath.mpf(0), mpmath.mpf(1)
        for k in range(n):
            prev, cur = cur, ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        deriv = (n * cur - (n + a) * prev) / x
        return float(cur), float(deriv)


def test_laguerre_base_cases():
    x = np.array([0.5, 2.0, 7.0])
    v0, d0 = laguerre_poly(0, 1.5, x)
    assert v0.to_float() == pytest.approx(np.ones(3))
    assert d0.to_float() == pytest.approx(np.zeros(3))
    v1, d1 = laguerre_poly(1, 1.5, x)
    assert v1.to_float() == pytest.approx(2.5 - x)
    assert d1.to_float() == pytest.approx(-np.ones(3))
    with pytest.raises(ValueError):
        laguerre_poly(2, -1.0, x)


@pytest.mark.parametrize("n, a, x", [(30, 30.0, 60.0), (30, 30.0, 1.0), (200, 400.0, 2000.0), (60, 0.5, 300.0)])
def test_laguerre_against_extended_precision(n, a, x):
    v, d = laguerre_poly(n, a, x)
    ev, ed = _laguerre_mp(n, a, x)
    assert float(v.to_float()) == pytest.approx(ev, rel=1e-12)
    assert float(d.to_float()) == pytest.approx(ed, rel=1e-11)


def test_laguerre_orthogonality():
    a = 1.5
    t, w = roots_genlaguerre(30, a)
    vals = np.array([laguerre_poly(k, a, t)[0].to_float() for k in range(11)])
    gram = (vals * w) @ vals.T
    diag = np.exp(gammaln(np.arange(11) + a + 1) - gammaln(np.arange(11) + 1))
    assert np.diag(gram) == pytest.approx(diag, rel=1e-10)
    off = gram - np.diag(np.diag(gram))
    assert np.max(np.abs(off) / np.sqrt(np.outer(diag, diag))) < 1e-8


def test_jacobi_orthonormality():
    A, B = 3.0, 5.5
    t, w = gauss_jacobi_unit(30, A, B)
    vals = np.array([jacobi_orthonormal(k, A, B, t).to_float() for k in range(12)])
    assert (vals * w) @ vals.T == pytest.approx(np.eye(12), abs=1e-12)


def test_kernel_forms_agree():
    y = np.array([0.3, 5.0, 40.0, 120.0])
    ens = LaguerreEnsemble(2, 30, 1.0)
    cd = exact_density_laguerre_beta2(ens, y)
    ks = laguerre_kernel_sum(30, 30.0, y)
    assert cd.log_abs == pytest.approx(ks.log_abs, abs=1e-11)


@pytest.mark.parametrize("ens", [LaguerreEnsemble(2, n, 1.0) for n in (1, 6, 30)]
                         + [JacobiEnsemble(2, n, 5.0, 5.0) for n in (1, 6, 30)],
                         ids=lambda e: f"{e.flavor.value}-N{e.n}")
def test_beta2_normalization(ens):
    if isinstance(ens, LaguerreEnsemble):
        t, w = roots_genlaguerre(200, 0.0)
        d = exact_density(ens, t)
        with np.errstate(divide="ignore"):
            total = np.sum(d.sign * np.exp(np.log(w) + t + d.log_abs))
    else:
        t, w = gauss_jacobi_unit(200, 0.0, 0.0)
        total = np.sum(w * _density(ens, t))
    assert total == pytest.approx(ens.n, rel=1e-8)


def test_beta1_normalization():
    from scipy import integrate
    for ens in (LaguerreEnsemble(1, 6, 1.0), JacobiEnsemble(1, 6, 5.0, 5.0)):
        top = 200.0 if isinstance(ens, LaguerreEnsemble) else 1.0
        val, _ = integrate.quad(lambda t: float(_density(ens, t)), 0, top, limit=400, epsabs=1e-12,
                                points=[1.0, 6.0, 20.0] if top > 1 else [0.5])
        assert val == pytest.approx(6.0, rel=1e-6)


def test_nterm_form_integrates_to_n_plus_one():
    from scipy import integrate
    ens = LaguerreEnsemble(1, 4, 1.0)
    f = lambda t: float(exact_density_laguerre_beta1(ens, t, form="nterm").to_float())
    val, _ = integrate.quad(f, 0, 150, limit=400, epsabs=1e-12, points=[1.0, 5.0, 20.0])
    assert val == pytest.approx(5.0, rel=1e-6)


def test_nonnegative_on_grid():
    for ens, grid in ((LaguerreEnsemble(2, 12, 1.0), np.linspace(1e-3, 150, 1000)),
                      (LaguerreEnsemble(1, 12, 1.0), np.linspace(1e-3, 150, 1000)),
                      (JacobiEnsemble(2, 12, 5.0, 5.0), np.linspace(1e-3, 1 - 1e-3, 1000)),
                      (JacobiEnsemble(1, 12, 5.0, 5.0), np.linspace(1e-3, 1 - 1e-3, 1000))):
        d = exact_density(ens, grid)
        assert np.all(d.sign >= 0)


def test_threshold_invariance():
    y = np.array([1.0, 60.0, 300.0])
    ens = LaguerreEnsemble(2, 60, 2.0)
    base = exact_density_laguerre_beta2(ens, y, threshold=400).log_abs
    for th in (200, 800):
        assert exact_density_laguerre_beta2(ens, y, threshold=th).log_abs == pytest.approx(base, abs=1e-12)
    x = np.array([0.05, 0.5, 0.95])
    jens = JacobiEnsemble(2, 60, 5.0, 5.0)
    jb = exact_density_jacobi_beta2(jens, x, threshold=400).log_abs
    for th in (200, 800):
        assert exact_density_jacobi_beta2(jens, x, threshold=th).log_abs == pytest.approx(jb, abs=1e-12)


def test_single_eigenvalue_is_normalized_weight():
    c = 2.5
    x = 1.7
    res = brute_force_density("laguerre", 1.0, 1, (c,), x)
    expected = x ** c * math.exp(-x / 2) / (math.gamma(c + 1) * 2 ** (c + 1))
    assert res.value == pytest.approx(expected, rel=1e-14)


def test_two_eigenvalues_beta2_closed_form():
    # N = 2, a = 0: rho(x) = e^-x (x^2 - 2x + 2)
    ens = LaguerreEnsemble(2, 2, 0.0)
    for x in (0.3, 2.0, 9.0):
        bf = brute_force_for(ens, x).value
        assert bf == pytest.approx(math.exp(-x) * (x * x - 2 * x + 2), rel=1e-12)
        assert float(_density(ens, x)) == pytest.approx(bf, rel=1e-10)


@pytest.mark.parametrize("ens, points", [
    (LaguerreEnsemble(1, 2, 1.0), (0.05, 0.3, 9.0)),
    (LaguerreEnsemble(1, 4, 1.0), (0.2, 12.0, 25.0)),
    (JacobiEnsemble(2, 3, 1.0, 1.0), (0.02, 0.1, 0.9, 0.97)),
    (JacobiEnsemble(1, 4, 5.0, 5.0), (0.05, 0.1, 0.9, 0.95)),
    (JacobiEnsemble(1, 4, 2.0, 7.0), (0.02, 0.7, 0.9)),
], ids=lambda v: str(v) if not isinstance(v, tuple) else "")
def test_exact_matches_brute_force(ens, points):
    for x in points:
        bf = brute_force_for(ens, x)
        assert bf.converged and bf.error < 1e-7 * bf.value
        assert float(_density(ens, x)) == pytest.approx(bf.value, rel=1e-7)


def test_brute_force_for_non_classical_beta():
    # N = 2 closed integral: rho(x) = 2 w(x) int w(t)|x - t|^beta dt / Z
    from scipy import integrate
    beta, c = 2.5, 1.0
    x = 3.0
    res = brute_force_density("laguerre", beta, 2, (c,), x)
    w = lambda t: t ** c * math.exp(-beta * t / 2)
    inner = integrate.quad(lambda t: w(t) * abs(x - t) ** beta, 0, x)[0] \
        + integrate.quad(lambda t: w(t) * abs(x - t) ** beta, x, np.inf)[0]
    z = integrate.dblquad(lambda s, t: w(t) * w(s) * abs(t - s) ** beta, 0, 60, 0, 60, epsabs=1e-13)[0]
    assert res.value == pytest.approx(2 * w(x) * inner / z, rel=1e-7)


def test_errors():
    with pytest.raises(ValueError):
        exact_density_laguerre_beta1(LaguerreEnsemble(1, 5, 1.0), 1.0)
    with pytest.raises(ValueError):
        exact_density_jacobi_beta1(JacobiEnsemble(1, 5, 1.0, 1.0), 0.5)
    with pytest.raises(ValueError):
        exact_density_laguerre_beta2(LaguerreEnsemble(2, 4, 1.0), 0.0)
    with pytest.raises(ValueError):
        exact_density_jacobi_beta2(JacobiEnsemble(2, 4, 1.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        exact_density(LaguerreEnsemble(4, 4, 1.0), 1.0)
    with pytest.raises(ValueError):
        exact_density_laguerre_beta1(LaguerreEnsemble(1, 4, 1.0), 1.0, form="other")
    with pytest.raises(ValueError):
        brute_force_density("laguerre", 1.0, 7, (1.0,), 1.0)
    with pytest.raises(ValueError):
        brute_force_density("jacobi", 1.0, 3, (1.0, 1.0), 1.5)
