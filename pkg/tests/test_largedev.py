import math

import numpy as np
import pytest

from betadensity.ensemble import JacobiEnsemble, LaguerreEnsemble, Region
from betadensity.largedev import (asym_density, assembled_density_jacobi, assembled_density_laguerre,
                                  char_poly_moment_jacobi, char_poly_moment_laguerre,
                                  char_poly_moment_recomposed, kappa, norm_ratio_jacobi,
                                  norm_ratio_laguerre, rate_identity_checks)


def test_char_poly_large_x():
    ens = LaguerreEnsemble(2, 10, 1.0)
    x = 1e10
    assert abs(char_poly_moment_laguerre(ens, x).log_abs - 10 * 2 * math.log(x)) < 1e-6


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_char_poly_recomposition(beta):
    lag = LaguerreEnsemble(beta, 10, 1.0)
    jac = JacobiEnsemble(beta, 10, 2.0, 7.0)
    for x in (10.0, 0.05):
        assert char_poly_moment_laguerre(lag, x).log_abs == pytest.approx(
            char_poly_moment_recomposed(lag, x).log_abs, abs=1e-12)
    for x in (0.95, 0.05):
        assert char_poly_moment_jacobi(jac, x).log_abs == pytest.approx(
            char_poly_moment_recomposed(jac, x).log_abs, abs=1e-12)
        assert char_poly_moment_jacobi(jac, x).log_abs == pytest.approx(
            char_poly_moment_jacobi(jac.mirrored(), 1 - x).log_abs, abs=1e-12)


def test_norm_ratio_trend():
    prev_l = prev_j = math.inf
    for n in (6, 12, 24, 48):
        dl = abs(norm_ratio_laguerre(LaguerreEnsemble(2, n, 1.0)).difference)
        dj = abs(norm_ratio_jacobi(JacobiEnsemble(2, n, 5.0, 5.0)).difference)
        assert dl < prev_l and dj < prev_j
        prev_l, prev_j = dl, dj
    # differences halve with N (O(1/N))
    assert abs(norm_ratio_laguerre(LaguerreEnsemble(2, 48, 1.0)).difference) == pytest.approx(0.02317, abs=1e-4)


@pytest.mark.parametrize("beta", [1, 2, 4])
def test_density_equals_its_assembly(beta):
    lag = LaguerreEnsemble(beta, 12, 1.0)
    jac = JacobiEnsemble(beta, 12, 5.0, 5.0)
    for x in (0.1, 10.0):
        assert asym_density(lag, x).log_value == pytest.approx(assembled_density_laguerre(lag, x).log_abs,
                                                               abs=1e-10)
    for x in (0.1, 0.9):
        assert asym_density(jac, x).log_value == pytest.approx(assembled_density_jacobi(jac, x).log_abs,
                                                               abs=1e-10)


def test_density_factor_structure():
    d = asym_density(LaguerreEnsemble(2, 6, 1.0), 10.0)
    assert d.log_value == pytest.approx(d.exponential + d.subleading_log)
    assert d.rate * 6 == pytest.approx(d.exponential)
    assert d.region == Region.RIGHT_TAIL
    assert d.value == pytest.approx(math.exp(d.log_value))


def test_jacobi_density_mirror_symmetry():
    for ens in (JacobiEnsemble(2, 10, 5.0, 5.0), JacobiEnsemble(1, 10, 2.0, 7.0)):
        for x in (0.05, 0.95):
            assert asym_density(ens, x).log_value == pytest.approx(
                asym_density(ens.mirrored(), 1 - x).log_value, abs=1e-12)


def test_rates_agree():
    rng = np.random.default_rng(3)
    for al in (0.5, 1.0, 2.0):
        ens = LaguerreEnsemble(2, 10, al)
        lo, hi = ens.edges
        for x in rng.uniform(0.02 * lo, 0.98 * lo, 30):
            rep = rate_identity_checks(ens, float(x))
            assert rep.diff_potential_phi < 1e-10
            assert rep.diff_potential_kappa < 1e-10
        for x in rng.uniform(1.02 * hi, 5 * hi, 30):
            rep = rate_identity_checks(ens, float(x))
            assert rep.rate_phi is None
            assert rep.diff_potential_kappa < 1e-10


def test_kappa_arcosh_forms():
    # acosh(z) = log(z + sqrt(z^2 - 1))
    al, x = 1.0, 10.0
    ens = LaguerreEnsemble(2, 10, al)
    lo, hi = ens.edges
    u = ens.u(x)
    z1 = abs((1 / x - 0.5 * (1 / lo + 1 / hi)) / (0.5 * (1 / lo - 1 / hi)))
    z2 = abs((0.5 * (lo + hi) - x) / (0.5 * (lo - hi)))
    ac = lambda z: math.log(z + math.sqrt(z * z - 1))
    expected = u + math.sqrt(lo * hi) * ac(z1) - 0.5 * (lo + hi) * ac(z2)
    assert kappa(al, x, u) == pytest.approx(expected, rel=1e-13)


def test_rejects_bulk_and_edge():
    ens = LaguerreEnsemble(2, 10, 1.0)
    with pytest.raises(ValueError):
        asym_density(ens, 2.0)
    with pytest.raises(ValueError):
        asym_density(ens, ens.edges[1])
