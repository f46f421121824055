import math

import numpy as np
import pytest
from scipy import integrate

from betadensity.bulkdensity import (bulk_cdf, bulk_law, corrected_density, jacobi_bulk_density,
                                     mp_density)
from betadensity.ensemble import JacobiEnsemble, LaguerreEnsemble


def test_midpoint_values():
    assert mp_density(LaguerreEnsemble(2, 10, 0.0), 2.0) == pytest.approx(1 / (2 * math.pi))
    assert jacobi_bulk_density(JacobiEnsemble(2, 10, 0.0, 0.0), 0.5) == pytest.approx(2 / math.pi)


def test_square_root_vanishing_at_soft_edge():
    ens = LaguerreEnsemble(2, 10, 1.0)
    hi = ens.edges[1]
    e = np.array([1e-4, 1e-6, 1e-8])
    r = mp_density(ens, hi - e) / np.sqrt(e)
    assert r[0] == pytest.approx(r[-1], rel=1e-3)


def test_rejects_points_outside_support():
    with pytest.raises(ValueError):
        mp_density(LaguerreEnsemble(2, 10, 1.0), 6.0)
    with pytest.raises(ValueError):
        jacobi_bulk_density(JacobiEnsemble(2, 10, 5.0, 5.0), 0.1)


@pytest.mark.parametrize("ens", [LaguerreEnsemble(2, 10, 0.5), LaguerreEnsemble(2, 10, 3.0),
                                 JacobiEnsemble(2, 10, 5.0, 5.0), JacobiEnsemble(2, 10, 2.0, 7.0)])
def test_unit_mass_and_cdf(ens):
    lo, hi = ens.edges
    total, _ = integrate.quad(lambda t: bulk_law(ens, t), lo, hi, epsabs=1e-13, limit=200)
    assert total == pytest.approx(1.0, abs=1e-10)
    mid = 0.5 * (lo + hi)
    half, _ = integrate.quad(lambda t: bulk_law(ens, t), lo, mid, epsabs=1e-13, limit=200)
    assert bulk_cdf(ens, mid) == pytest.approx(half, abs=1e-10)
    assert bulk_cdf(ens, lo) == 0.0 and bulk_cdf(ens, hi) == 1.0


@pytest.mark.parametrize("beta, atom, inv", [(1, 0.25, 0.5), (2, 0.0, 0.0), (4, -0.125, -0.25)])
def test_corrected_density_coefficients(beta, atom, inv):
    cd = corrected_density(LaguerreEnsemble(beta, 12, 1.0))
    assert cd.atom_lower == atom and cd.atom_upper == atom and cd.inv_sqrt_coeff == inv
    # the correction carries zero mass
    assert cd.total_mass() == pytest.approx(12.0, abs=1e-12)


def test_corrected_density_integrates_smooth_functions():
    ens = JacobiEnsemble(1, 8, 2.0, 7.0)
    cd = corrected_density(ens)
    lo, hi = ens.edges
    g = np.exp
    smooth, _ = integrate.quad(lambda t: 8 * jacobi_bulk_density(ens, t) * math.exp(t), lo, hi,
                               epsabs=1e-13, limit=200)
    arc, _ = integrate.quad(lambda t: math.exp(t) / (math.pi * math.sqrt((t - lo) * (hi - t))), lo, hi,
                            epsabs=1e-13, limit=200)
    expected = smooth + 0.25 * (g(lo) + g(hi)) - 0.5 * arc
    assert cd.integrate(g) == pytest.approx(expected, abs=1e-9)
