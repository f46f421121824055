"""Leading-order bulk laws and their O(1) edge corrections."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .ensemble import JacobiEnsemble, LaguerreEnsemble
from .quadrature import adaptive, gauss_cheb1, gauss_cheb2

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]


def _open_support(x, edges, name):
    x = np.asarray(x, dtype=float)
    lo, hi = edges
    if np.any((x <= lo) | (x >= hi)):
        raise ValueError(f"{name}: x must lie in the open support ({lo}, {hi})")
    return x


def _out(v):
    return float(v) if np.ndim(v) == 0 else v


def mp_density(ens: LaguerreEnsemble, x):
    """Marchenko-Pastur density of the scaled spectrum ``lambda / N``, per eigenvalue."""
    lo, hi = ens.edges
    x = _open_support(x, ens.edges, "mp_density")
    return _out(np.sqrt((hi - x) * (x - lo)) / (2 * np.pi * x))


def jacobi_bulk_density(ens: JacobiEnsemble, x):
    """Limiting Jacobi density on (c1, c2), per eigenvalue."""
    c1, c2 = ens.edges
    x = _open_support(x, ens.edges, "jacobi_bulk_density")
    d = 2 + ens.alpha1 + ens.alpha2
    return _out(d / (2 * np.pi) * np.sqrt((x - c1) * (c2 - x)) / (x * (1 - x)))


def _smooth_kernel(ens: Ensemble) -> Callable:
    """The bulk law divided by ``sqrt((t - lo)(hi - t))``; analytic on the support."""
    if isinstance(ens, LaguerreEnsemble):
        return lambda t: 1.0 / (2 * np.pi * t)
    d = 2 + ens.alpha1 + ens.alpha2
    return lambda t: d / (2 * np.pi * t * (1 - t))


def bulk_law(ens: Ensemble, x):
    if isinstance(ens, LaguerreEnsemble):
        return mp_density(ens, x)
    return jacobi_bulk_density(ens, x)


@dataclass(frozen=True)
class CorrectedDensity:
    """``N * law(t)`` plus the ``(1/beta - 1/2)`` edge structure.

    The correction is ``coeff * (delta(t - lo)/2 + delta(t - hi)/2 - 1/(pi sqrt((t-lo)(hi-t))))``;
    atoms are kept symbolic.
    """

    smooth: Callable
    atom_lower: float
    atom_upper: float
    inv_sqrt_coeff: float
    lower: float
    upper: float
    n: int
    kernel: Callable

    def integrate(self, g: Callable, n_nodes: int = 0, tol: float = 1e-13) -> float:
        """``int g(t) rho(t) dt`` for ``g`` smooth on the closed support."""
        lo, hi = self.lower, self.upper
        f_smooth = lambda t: self.n * self.kernel(t) * g(t)
        f_arcsine = lambda t: g(t) / np.pi
        if n_nodes:
            smooth = gauss_cheb2(f_smooth, lo, hi, n_nodes)
            arcsine = gauss_cheb1(f_arcsine, lo, hi, n_nodes)
        else:
            smooth = adaptive(gauss_cheb2, f_smooth, lo, hi, tol)
            arcsine = adaptive(gauss_cheb1, f_arcsine, lo, hi, tol)
        atoms = self.atom_lower * g(np.array(lo)) + self.atom_upper * g(np.array(hi))
        return float(smooth + atoms - self.inv_sqrt_coeff * arcsine)

    def total_mass(self) -> float:
        return self.integrate(lambda t: np.ones_like(t))


def corrected_density(ens: Ensemble) -> CorrectedDensity:
    coeff = 1.0 / ens.beta - 0.5
    lo, hi = ens.edges
    law = (lambda t: mp_density(ens, t)) if isinstance(ens, LaguerreEnsemble) \
        else (lambda t: jacobi_bulk_density(ens, t))
    n = ens.n
    return CorrectedDensity(
        smooth=lambda t: n * law(t),
        atom_lower=0.5 * coeff,
        atom_upper=0.5 * coeff,
        inv_sqrt_coeff=coeff,
        lower=lo,
        upper=hi,
        n=n,
        kernel=_smooth_kernel(ens),
    )


def bulk_cdf(ens: Ensemble, x: float, tol: float = 1e-12) -> float:
    """Mass of the bulk law on ``(lo, x)``, by substitution ``t = mid - hw cos(theta)``."""
    lo, hi = ens.edges
    if x <= lo:
        return 0.0
    if x >= hi:
        return 1.0
    mid, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
    theta_x = math.acos(max(-1.0, min(1.0, (mid - x) / hw)))
    kern = _smooth_kernel(ens)
    # integrand in theta is kern(t) hw^2 sin^2(theta), smooth on [0, theta_x]
    nodes, weights = np.polynomial.legendre.leggauss(200)
    th = 0.5 * theta_x * (nodes + 1)
    t = mid - hw * np.cos(th)
    return float(0.5 * theta_x * np.dot(weights, kern(t) * hw * hw * np.sin(th) ** 2))
