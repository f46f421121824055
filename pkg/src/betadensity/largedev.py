"""Large-deviation densities outside the bulk and their consistency identities.

The Laguerre density is reported as ``N rho(N x)`` (density of the scaled
eigenvalue ``lambda / N``); the Jacobi density as ``rho(x)``.  Each is the
product of three factors: an exponential in ``N``, an algebraic factor and a
constant prefactor, all kept as logarithms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.special import gammaln

from .ensemble import JacobiEnsemble, LaguerreEnsemble, Region, require_tail
from .fluctuation import (_jacobi_parts, _log_abs_alpha_term, mean_diff_jacobi, mean_diff_laguerre,
                          variance_diff_jacobi, variance_diff_laguerre)
from .logvalue import LogValue
from .normalization import jacobi_log_partition, laguerre_log_partition

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]


@dataclass(frozen=True)
class AsymptoticDensity:
    x: float
    n: int
    beta: float
    exponential: float
    algebraic: float
    prefactor: float
    region: Region

    @property
    def rate(self) -> float:
        """Coefficient of N in the exponent."""
        return self.exponential / self.n

    @property
    def subleading_log(self) -> float:
        return self.algebraic + self.prefactor

    @property
    def log_value(self) -> float:
        return self.exponential + self.algebraic + self.prefactor

    @property
    def log_density(self) -> LogValue:
        return LogValue(1, self.log_value)

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


# --- Laguerre ----------------------------------------------------------------

def _lag_pieces(ens: LaguerreEnsemble, x: float):
    al = ens.alpha
    u = ens.u(x)
    b = u + x - 2 - al
    return al, u, b


def asym_density_laguerre(ens: LaguerreEnsemble, x: float, delta: Optional[float] = None
                          ) -> AsymptoticDensity:
    """``N rho(N x)`` outside the support, as three factors."""
    reg = require_tail(ens, x, delta, op="asym_density_laguerre")
    al, u, b = _lag_pieces(ens, x)
    n, be = ens.n, ens.beta
    r = math.sqrt(1 + al)
    inner = -u + 2 * math.log(abs(b / (2 * r)))
    if al > 0:
        inner -= 2 * al * math.log(abs((u - x - al) / (2 * math.sqrt(x) * r)))
    exponential = n * be / 2 * inner
    algebraic = (1 - 1.5 * be) * math.log(abs(u)) - (1 - be / 2) * math.log(abs(x * b / 2))
    prefactor = math.log(n * r / (2 * math.pi)) + be / 2 * math.log(2 / (be * n)) \
        + gammaln(1 + be / 2)
    return AsymptoticDensity(x, n, be, exponential, algebraic, prefactor, reg)


def char_poly_moment_laguerre(ens: LaguerreEnsemble, x: float) -> LogValue:
    """Asymptotic ``<prod |x - lambda|^beta>`` over N eigenvalues, rate-(N+1) weight."""
    require_tail(ens, x, op="char_poly_moment_laguerre")
    al, u, b = _lag_pieces(ens, x)
    n, be = ens.n, ens.beta
    inner = x - u - al - 2 + 2 * math.log(abs(b / 2))
    if al > 0:
        inner -= 2 * al * math.log(abs((u - x - al) / (2 * (1 + al))))
    out = (n + 1) * be / 2 * inner + (1 - 1.5 * be) * math.log(abs(u)) \
        - (1 - be / 2) * math.log(abs(b / 2))
    return LogValue(1, out)


def char_poly_moment_recomposed(ens: Ensemble, x: float) -> LogValue:
    """``beta * mean_diff + beta^2 * variance_diff / 2`` (Gaussian fluctuation form)."""
    be = ens.beta
    if isinstance(ens, LaguerreEnsemble):
        mu, var = mean_diff_laguerre(ens, x), variance_diff_laguerre(ens, x)
    else:
        mu, var = mean_diff_jacobi(ens, x), variance_diff_jacobi(ens, x)
    return LogValue(1, be * mu + be * be * var / 2)


@dataclass(frozen=True)
class NormRatio:
    """``C_N[w] / C_{N+1}[w]`` for the rate-(N+1) weight: exact and Stirling forms."""

    exact: LogValue
    asymptotic: LogValue

    @property
    def value(self) -> LogValue:
        return self.exact

    @property
    def difference(self) -> float:
        return self.exact.log_abs - self.asymptotic.log_abs


def laguerre_norm_ratio_asymptotic(n: int, alpha: float, beta: float,
                                   prefactor_n: Optional[int] = None) -> float:
    """Stirling asymptotic (log); ``prefactor_n`` replaces N in ``(2/(beta N))^(beta/2)``."""
    m = n if prefactor_n is None else prefactor_n
    return (-math.log(2 * math.pi) + beta / 2 * math.log(2 / (beta * m))
            + beta * (n + 1) * (1 + alpha / 2) + gammaln(1 + beta / 2)
            + (-(n + 1) * (1 + alpha) * beta / 2 + 0.5) * math.log1p(alpha))


def norm_ratio_laguerre(ens: LaguerreEnsemble) -> NormRatio:
    n, al, be = ens.n, ens.alpha, ens.beta
    c = al * (n + 1) * be / 2 + be / 2 - 1
    s = (n + 1) * be / 2
    exact = laguerre_log_partition(n, c, s, be) - laguerre_log_partition(n + 1, c, s, be)
    return NormRatio(LogValue(1, exact), LogValue(1, laguerre_norm_ratio_asymptotic(n, al, be)))


def assembled_density_laguerre(ens: LaguerreEnsemble, x: float) -> LogValue:
    """``N rho(N x)`` rebuilt from density = (N)(norm ratio)(weight)(moment over N-1).

    The target count ``M = ens.n`` plays the role of ``N + 1``; the Stirling
    prefactor is evaluated at ``M`` (an O(1/N) choice that makes the
    assembly coincide with the three-factor form).
    """
    m, al, be = ens.n, ens.alpha, ens.beta
    if m < 2:
        raise ValueError("assembly needs at least two eigenvalues")
    inner = ens.with_n(m - 1)
    log_w = (al * m * be / 2 + be / 2 - 1) * math.log(x) - m * be * x / 2
    ratio = laguerre_norm_ratio_asymptotic(m - 1, al, be, prefactor_n=m)
    moment = char_poly_moment_recomposed(inner, x)
    return LogValue(1, math.log(m) + ratio + log_w + moment.log_abs)


# --- Jacobi ------------------------------------------------------------------

def asym_density_jacobi(ens: JacobiEnsemble, x: float, delta: Optional[float] = None
                        ) -> AsymptoticDensity:
    """``rho(x)`` outside the support, as three factors."""
    reg = require_tail(ens, x, delta, op="asym_density_jacobi")
    al1, al2 = ens.alpha1, ens.alpha2
    c1, c2 = ens.edges
    n, be = ens.n, ens.beta
    u = ens.u(x)
    mid = 0.5 * (c1 + c2)
    inner = math.log(abs((x - mid + u) / ((c2 - c1) / 2)))
    if al1 > 0:
        inner -= al1 * math.log(abs(math.sqrt(c1 * c2) + x - u)
                                / ((math.sqrt(c1) + math.sqrt(c2)) * math.sqrt(x)))
    if al2 > 0:
        inner -= al2 * math.log(abs(math.sqrt((1 - c1) * (1 - c2)) - x + 1 + u)
                                / ((math.sqrt(1 - c1) + math.sqrt(1 - c2)) * math.sqrt(1 - x)))
    exponential = n * be * inner
    algebraic = (1 - 1.5 * be) * math.log(abs(u)) \
        - (1 - be / 2) * math.log(abs(x * (1 - x) * (u + x - mid) / (2 + al1 + al2)))
    prefactor = math.log(n * (c2 - c1) / (4 * math.pi)) + be / 2 * math.log(1 / (be * n)) \
        + gammaln(1 + be / 2)
    return AsymptoticDensity(x, n, be, exponential, algebraic, prefactor, reg)


def char_poly_moment_jacobi(ens: JacobiEnsemble, x: float) -> LogValue:
    require_tail(ens, x, op="char_poly_moment_jacobi")
    n, be = ens.n, ens.beta
    u, l_mid, l_1, l_2 = _jacobi_parts(ens, x)
    out = (n + 1) * be * (l_mid - ens.alpha1 * l_1 - ens.alpha2 * l_2) \
        + (1 - 1.5 * be) * math.log(abs(u)) - (1 - be / 2) * l_mid
    return LogValue(1, out)


def jacobi_norm_ratio_asymptotic(n: int, alpha1: float, alpha2: float, beta: float,
                                 prefactor_n: Optional[int] = None) -> float:
    m = n if prefactor_n is None else prefactor_n
    a1, a2 = alpha1, alpha2
    d = a1 + a2 + 2
    L = math.log
    out = gammaln(1 + beta / 2) - L(2 * math.pi) + beta / 2 * L(2 / (beta * m)) \
        + 0.5 * (L(1 + a1) + L(1 + a2) + L(1 + a1 + a2)) - (beta / 2 + 1) * L(d)
    out += beta * (n + 1) * (2 * L(d) - 0.5 * L(a1 + 1) - 0.5 * L(a2 + 1) - 0.5 * L(a1 + a2 + 1))
    out += beta * (n + 1) * a1 * (L(d) - 0.5 * L(a1 + 1) - 0.5 * L(a1 + a2 + 1))
    out += beta * (n + 1) * a2 * (L(d) - 0.5 * L(a2 + 1) - 0.5 * L(a1 + a2 + 1))
    return out


def norm_ratio_jacobi(ens: JacobiEnsemble) -> NormRatio:
    n, be = ens.n, ens.beta
    c1 = ens.alpha1 * (n + 1) * be / 2 + be / 2 - 1
    c2 = ens.alpha2 * (n + 1) * be / 2 + be / 2 - 1
    exact = jacobi_log_partition(n, c1, c2, be) - jacobi_log_partition(n + 1, c1, c2, be)
    asym = jacobi_norm_ratio_asymptotic(n, ens.alpha1, ens.alpha2, be)
    return NormRatio(LogValue(1, exact), LogValue(1, asym))


def assembled_density_jacobi(ens: JacobiEnsemble, x: float) -> LogValue:
    m, be = ens.n, ens.beta
    if m < 2:
        raise ValueError("assembly needs at least two eigenvalues")
    inner = ens.with_n(m - 1)
    log_w = (ens.alpha1 * m * be / 2 + be / 2 - 1) * math.log(x) \
        + (ens.alpha2 * m * be / 2 + be / 2 - 1) * math.log1p(-x)
    ratio = jacobi_norm_ratio_asymptotic(m - 1, ens.alpha1, ens.alpha2, be, prefactor_n=m)
    moment = char_poly_moment_recomposed(inner, x)
    return LogValue(1, math.log(m) + ratio + log_w + moment.log_abs)


def asym_density(ens: Ensemble, x: float) -> AsymptoticDensity:
    if isinstance(ens, LaguerreEnsemble):
        return asym_density_laguerre(ens, x)
    return asym_density_jacobi(ens, x)


# --- rate identities ---------------------------------------------------------

def rate_potential(alpha: float, beta: float, x: float, u: float) -> float:
    """Leading rate of the potential form (coefficient of N)."""
    r = math.sqrt(alpha + 1)
    inner = -u + (2 + alpha) * math.log(abs((u + x - 2 - alpha) / (2 * r)))
    if alpha > 0:
        # log|(alpha(alpha+u-x) - 2x) / (2 r x)| = log|.../(2x^2)| + log(x / r)
        inner += alpha * (float(_log_abs_alpha_term(alpha, x, u)) + math.log(x / r))
    return beta / 2 * inner


def phi_min_minus(alpha: float, y: float) -> float:
    """Left-tail rate function in the distance ``y`` below the lower edge."""
    r = math.sqrt(alpha + 1)
    a1 = r - 1
    sq, sy = math.sqrt(y + 4 * r), math.sqrt(y)
    out = -0.5 * math.sqrt(y * (y + 4 * r)) + 2 * math.log((sq - sy) / math.sqrt(4 * r))
    if alpha > 0:
        out += -alpha / 2 * math.log1p(-y / a1 ** 2) \
            + alpha * math.log1p(2 * sy / a1 * (sq - sy) / (4 * r))
    return out


def kappa(alpha: float, x: float, u: float) -> float:
    """Exponential rate of the beta = 2 form with algebraic correction.

    The leading term is ``+u`` with the signed root (positive right of the
    support); with ``-u`` the identity with the other rate forms fails.
    """
    r = math.sqrt(alpha + 1)
    a1, a2 = r - 1, r + 1
    lo, hi = a1 * a1, a2 * a2
    out = u
    if alpha > 0:
        arg1 = abs((1 / x - 0.5 * (1 / lo + 1 / hi)) / (0.5 * (1 / lo - 1 / hi)))
        out += a1 * a2 * math.acosh(arg1)
    arg2 = abs((0.5 * (lo + hi) - x) / (0.5 * (lo - hi)))
    out -= 0.5 * (lo + hi) * math.acosh(arg2)
    return out


@dataclass(frozen=True)
class RateReport:
    x: float
    alpha: float
    beta: float
    rate_potential: float
    rate_a1: float
    rate_phi: Optional[float]
    rate_kappa: Optional[float]

    @property
    def diff_potential_phi(self) -> Optional[float]:
        return None if self.rate_phi is None else abs(self.rate_potential - self.rate_phi)

    @property
    def diff_potential_kappa(self) -> Optional[float]:
        if self.rate_kappa is None or self.beta != 2:
            return None
        return abs(self.rate_potential - self.rate_kappa)

    @property
    def diff_potential_density(self) -> float:
        return abs(self.rate_potential - self.rate_a1)


def rate_identity_checks(ens: LaguerreEnsemble, x: float) -> RateReport:
    reg = require_tail(ens, x, op="rate_identity_checks")
    al, be = ens.alpha, ens.beta
    u = ens.u(x)
    r_pot = rate_potential(al, be, x, u)
    r_phi = -be * phi_min_minus(al, ens.edges[0] - x) if reg == Region.LEFT_TAIL else None
    rk = -kappa(al, x, u)
    ra1 = asym_density_laguerre(ens, x).rate
    return RateReport(x, al, be, r_pot, ra1, r_phi, rk)
