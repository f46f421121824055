"""Means and variances of the log-potential linear statistics.

Two statistics are used, each relative to the weight rates:

* choice 1: ``v(t) = log|x - t| + (alpha/2) log t - t/2`` (Laguerre) or
  ``log|x - t| + (alpha1/2) log t + (alpha2/2) log|1 - t|`` (Jacobi);
* choice 2: the same without the ``log|x - t|`` term.

Only differences (choice 1 minus choice 2) enter the density asymptotics.
Every closed form here has a numerical oracle next to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Tuple, Union

import numpy as np

from .bulkdensity import corrected_density
from .ensemble import (Flavor, JacobiEnsemble, LaguerreEnsemble, laguerre_support,
                       require_tail, u_laguerre)
from .quadrature import ConvergenceError, cheb_coefficients

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]

K_CAP = 10_000
TAIL_TOL = 1e-14


class Choice(IntEnum):
    WITH_LOG = 1
    WITHOUT_LOG = 2


@dataclass(frozen=True)
class LinearStatistic:
    flavor: Flavor
    choice: Choice
    x: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "flavor", Flavor(self.flavor))
        object.__setattr__(self, "choice", Choice(self.choice))
        if self.choice == Choice.WITH_LOG and self.x is None:
            raise ValueError("choice 1 requires the external point x")

    def v(self, t, ens: Ensemble):
        t = np.asarray(t, dtype=float)
        if self.flavor == Flavor.LAGUERRE:
            out = 0.5 * ens.alpha * np.log(t) - 0.5 * t
        else:
            out = 0.5 * ens.alpha1 * np.log(t) + 0.5 * ens.alpha2 * np.log(np.abs(1 - t))
        if self.choice == Choice.WITH_LOG:
            out = out + np.log(np.abs(self.x - t))
        return out


@dataclass(frozen=True)
class ChebCoefficients:
    k_max: int
    a: np.ndarray

    def variance_sum(self) -> float:
        k = np.arange(1, self.k_max + 1)
        return float(np.sum(k * self.a ** 2))


def _check_stat(stat: LinearStatistic, ens: Ensemble):
    if stat.flavor != ens.flavor:
        raise ValueError(f"statistic flavor {stat.flavor.value} does not match ensemble")
    if stat.choice == Choice.WITH_LOG:
        lo, hi = ens.edges
        if lo <= stat.x <= hi:
            raise ValueError(f"x = {stat.x} must lie outside the closed support ({lo}, {hi})")


# --- Chebyshev variables ---------------------------------------------------

def x_tilde(x, edges: Tuple[float, float]):
    lo, hi = edges
    return 2.0 / (hi - lo) * (np.asarray(x, dtype=float) - 0.5 * (lo + hi))


def nu_x(x, edges: Tuple[float, float]):
    """The root of ``nu + 1/nu = 2 x_tilde`` inside the unit disc."""
    lo, hi = edges
    x = np.asarray(x, dtype=float)
    if np.any((x >= lo) & (x <= hi)):
        raise ValueError("nu_x requires x outside the closed support")
    xt = x_tilde(x, edges)
    # x_tilde -/+ sqrt(x_tilde^2 - 1) written without cancellation
    out = 1.0 / (xt + np.sign(xt) * np.sqrt(xt * xt - 1.0))
    return float(out) if out.ndim == 0 else out


def nu_0(alpha: float) -> float:
    return -1.0 / math.sqrt(alpha + 1.0)


def k_max_for(nu: float, scale: float = 1.0, tol: float = TAIL_TOL, cap: int = K_CAP) -> int:
    """Smallest K whose bound on ``sum_{k>K} k a_k^2`` (with ``|a_k| <= scale |nu|^k / k``) is below tol."""
    nu = abs(nu)
    if nu == 0:
        return 1
    if nu >= 1:
        return cap
    q = nu * nu
    for k in range(1, cap + 1):
        if scale ** 2 * q ** (k + 1) / ((k + 1) * (1 - q)) < tol:
            return k
    return cap


def tail_bound(nu: float, k: int, scale: float = 1.0) -> float:
    q = abs(nu) ** 2
    return scale ** 2 * q ** (k + 1) / ((k + 1) * (1 - q))


# --- Laguerre ----------------------------------------------------------------

def _log_abs_alpha_term(alpha: float, x, u):
    """``log|(alpha(alpha + u - x) - 2x) / (2 x^2)|`` without cancellation near x = 0."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.log(np.abs(alpha * (alpha + u - x) - 2 * x) / (2 * x * x))
        # left tail: alpha + u = x(2 alpha + 4 - x)/(alpha - u) and
        # |alpha(alpha+u-x) - 2x| = (alpha + u + x)^2 / |u + x - 2 - alpha|
        g = (2 * alpha + 4 - x) / (alpha - u) + 1.0
        stable = 2 * np.log(g) - np.log(np.abs(u + x - 2 - alpha)) - math.log(2.0)
    return np.where(u < 0, stable, direct)


def laguerre_log_potential(alpha: float, x):
    """Closed form of ``int mp(t) log|x - t| dt`` for x outside the support."""
    u = u_laguerre(x, laguerre_support(alpha))
    x = np.asarray(x, dtype=float)
    term = alpha * _log_abs_alpha_term(alpha, x, u) if alpha > 0 else 0.0
    out = 0.5 * (x - alpha - u - 2 + term + (2 + alpha) * np.log(np.abs((u + x - 2 - alpha) / 2)))
    return float(out) if np.ndim(out) == 0 else out


def arcsine_log_integral(x, edges: Tuple[float, float]):
    """``(1/pi) int log|x - t| / sqrt((hi - t)(t - lo)) dt`` via the Chebyshev variable."""
    lo, hi = edges
    xt = x_tilde(x, edges)
    out = math.log((hi - lo) / 2) + np.log(0.5 * np.abs(xt + np.sign(xt) * np.sqrt(xt * xt - 1)))
    return float(out) if np.ndim(out) == 0 else out


def laguerre_arcsine_log(alpha: float, x, u):
    """Laguerre form ``log|(u + x - 2 - alpha)/2|`` of the arcsine log integral."""
    out = np.log(np.abs((np.asarray(u) + x - 2 - alpha) / 2))
    return float(out) if np.ndim(out) == 0 else out


def cheb_coeffs_laguerre(ens: LaguerreEnsemble, stat: LinearStatistic, k_max: int) -> ChebCoefficients:
    """Closed-form Chebyshev coefficients of the Laguerre statistic."""
    _check_stat(stat, ens)
    k = np.arange(1, k_max + 1, dtype=float)
    a = -(ens.alpha / k) * nu_0(ens.alpha) ** k
    a[0] += -math.sqrt(ens.alpha + 1)
    if stat.choice == Choice.WITH_LOG:
        a += -2 * nu_x(stat.x, ens.edges) ** k / k
    return ChebCoefficients(k_max, a)


def cheb_coeffs_numeric(ens: Ensemble, stat: LinearStatistic, k_max: int) -> ChebCoefficients:
    """Chebyshev coefficients by discrete cosine transform of ``v`` on the support."""
    _check_stat(stat, ens)
    lo, hi = ens.edges
    a = cheb_coefficients(lambda t: stat.v(t, ens), lo, hi, k_max)
    return ChebCoefficients(k_max, a)


def _nu_max(ens: Ensemble, x: float) -> float:
    nus = [abs(nu_x(x, ens.edges))]
    lo, hi = ens.edges
    if lo > 0:
        nus.append(abs(nu_x(0.0, ens.edges)))
    if isinstance(ens, JacobiEnsemble) and hi < 1:
        nus.append(abs(nu_x(1.0, ens.edges)))
    return max(nus)


def _coeff_scale(ens: Ensemble) -> float:
    if isinstance(ens, LaguerreEnsemble):
        return 2.0 + ens.alpha
    return 2.0 + ens.alpha1 + ens.alpha2


def variance_diff_laguerre(ens: LaguerreEnsemble, x: float) -> float:
    """Closed form of ``sigma^2(choice 1) - sigma^2(choice 2)``."""
    require_tail(ens, x, op="variance_diff_laguerre")
    al, b = ens.alpha, ens.beta
    u = ens.u(x)
    out = (x - (al + 2) - u) / b - 2 / b * math.log(abs(u)) \
        + 2 / b * math.log(abs(x - (al + 2) + u) / 2) \
        - 2 * al / b * math.log(abs(x + al - u) / (2 * (al + 1)))
    return out


@dataclass(frozen=True)
class SeriesResult:
    value: float
    k_max: int
    tail_bound: float


def variance_series(ens: Ensemble, x: float, numeric: bool = True,
                    tol: float = TAIL_TOL, cap: int = K_CAP) -> SeriesResult:
    """``(1/(2 beta)) sum k (a_k(1)^2 - a_k(2)^2)`` truncated by the geometric tail bound."""
    nu = _nu_max(ens, x)
    scale = _coeff_scale(ens)
    k_max = k_max_for(nu, scale, tol, cap)
    s1 = LinearStatistic(ens.flavor, Choice.WITH_LOG, x)
    s2 = LinearStatistic(ens.flavor, Choice.WITHOUT_LOG)
    if numeric or isinstance(ens, JacobiEnsemble):
        c1, c2 = cheb_coeffs_numeric(ens, s1, k_max), cheb_coeffs_numeric(ens, s2, k_max)
    else:
        c1, c2 = cheb_coeffs_laguerre(ens, s1, k_max), cheb_coeffs_laguerre(ens, s2, k_max)
    value = (c1.variance_sum() - c2.variance_sum()) / (2 * ens.beta)
    return SeriesResult(value, k_max, 2 * tail_bound(nu, k_max, scale) / (2 * ens.beta))


def variance_series_laguerre(ens: LaguerreEnsemble, x: float, tol: float = 1e-10) -> float:
    """Closed-form variance difference, checked against the truncated series."""
    closed = variance_diff_laguerre(ens, x)
    series = variance_series(ens, x, numeric=False)
    if series.k_max >= K_CAP or series.tail_bound > tol:
        raise ConvergenceError(f"series tail bound {series.tail_bound:.3g} exceeds {tol} "
                               f"at k_max = {series.k_max}")
    if abs(series.value - closed) > tol * max(1.0, abs(closed)):
        raise ConvergenceError(f"series {series.value!r} disagrees with closed form {closed!r}")
    return closed


def mean_diff_laguerre(ens: LaguerreEnsemble, x: float) -> float:
    """``mu(choice 1) - mu(choice 2)`` with the O(1/N) remainder dropped."""
    require_tail(ens, x, op="mean_diff_laguerre")
    u = ens.u(x)
    arc = laguerre_arcsine_log(ens.alpha, x, u)
    return ens.n * laguerre_log_potential(ens.alpha, x) \
        + (1 / ens.beta - 0.5) * (math.log(abs(u)) - arc)


def mean_oracle(ens: Ensemble, x: float, n_nodes: int = 0) -> float:
    """Quadrature of ``log|x - t|`` against the corrected density."""
    lo, hi = ens.edges
    if lo <= x <= hi:
        raise ValueError("mean_oracle requires x outside the closed support")
    return corrected_density(ens).integrate(lambda t: np.log(np.abs(x - t)), n_nodes=n_nodes)


# --- Jacobi ------------------------------------------------------------------

def _jacobi_parts(ens: JacobiEnsemble, x: float):
    c1, c2 = ens.edges
    u = ens.u(x)
    l_mid = math.log(abs(0.5 * (x - 0.5 * (c1 + c2) + u)))
    l_1 = math.log(2 * abs(math.sqrt(c1 * c2) + x - u) / (math.sqrt(c1) + math.sqrt(c2)) ** 2)
    l_2 = math.log(2 * abs(math.sqrt((1 - c1) * (1 - c2)) + 1 - x + u)
                   / (math.sqrt(1 - c1) + math.sqrt(1 - c2)) ** 2)
    return u, l_mid, l_1, l_2


def _r_poly(x, c1, c2, u):
    return x * (c1 + c2) - 2 * c1 * c2 - 2 * math.sqrt(c1 * c2) * u


def jacobi_log_potential(ens: JacobiEnsemble, x: float, form: str = "logs") -> float:
    """``2 int rho_inf(X) log|x - X| dX`` in closed form.

    ``form="logs"`` uses the logarithms of ``sqrt(c1 c2) + x - u`` etc;
    ``form="quadratic"`` uses the quadratic ``R``, with the mirrored point taking ``-u``.
    """
    require_tail(ens, x, op="jacobi_log_potential")
    al1, al2 = ens.alpha1, ens.alpha2
    c1, c2 = ens.edges
    u, l_mid, l_1, l_2 = _jacobi_parts(ens, x)
    if form == "logs":
        return 2 * l_mid - 2 * al1 * l_1 - 2 * al2 * l_2
    if form == "quadratic":
        out = (al1 + al2 + 2) * l_mid
        if al1 > 0:
            out += al1 * math.log(abs(_r_poly(x, c1, c2, u)
                                      / (x ** 2 * (math.sqrt(c1) - math.sqrt(c2)) ** 2)))
        if al2 > 0:
            out += al2 * math.log(abs(_r_poly(1 - x, 1 - c1, 1 - c2, -u)
                                      / ((1 - x) ** 2 * (math.sqrt(1 - c1) - math.sqrt(1 - c2)) ** 2)))
        return out
    raise ValueError(f"unknown form {form!r}")


def jacobi_stieltjes(ens: JacobiEnsemble, w: float) -> float:
    """``2 int rho_inf(X) / (w - X) dX`` for w outside the support."""
    u = ens.u(w)
    al1, al2 = ens.alpha1, ens.alpha2
    return -al1 / w + al2 / (1 - w) - (al1 + al2 + 2) * u / (w * (1 - w))


def mean_diff_jacobi(ens: JacobiEnsemble, x: float) -> float:
    require_tail(ens, x, op="mean_diff_jacobi")
    c1, c2 = ens.edges
    u, l_mid, _, _ = _jacobi_parts(ens, x)
    return 0.5 * ens.n * jacobi_log_potential(ens, x) \
        + (1 / ens.beta - 0.5) * (0.5 * math.log(abs((x - c1) * (x - c2))) - l_mid)


def variance_diff_jacobi(ens: JacobiEnsemble, x: float) -> float:
    require_tail(ens, x, op="variance_diff_jacobi")
    b = ens.beta
    u, l_mid, l_1, l_2 = _jacobi_parts(ens, x)
    return -2 / b * math.log(abs(u)) + 2 / b * l_mid - 2 * ens.alpha1 / b * l_1 \
        - 2 * ens.alpha2 / b * l_2


def mean_diff(ens: Ensemble, x: float) -> float:
    if isinstance(ens, LaguerreEnsemble):
        return mean_diff_laguerre(ens, x)
    return mean_diff_jacobi(ens, x)


def variance_diff(ens: Ensemble, x: float) -> float:
    if isinstance(ens, LaguerreEnsemble):
        return variance_diff_laguerre(ens, x)
    return variance_diff_jacobi(ens, x)
