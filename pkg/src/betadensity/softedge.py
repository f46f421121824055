"""Soft-edge scaling maps, the Tracy-Widom right tail and the hard-edge gap asymptote."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Sequence, Union

import numpy as np
from scipy.special import gammaln

from .ensemble import JacobiEnsemble, LaguerreEnsemble, Region
from .largedev import asym_density
from .logvalue import LogValue

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]


@dataclass(frozen=True)
class EdgeMap:
    """``x = center + orientation * width * X`` with ``width`` including the ``N^(-2/3)``."""

    center: float
    width: float
    orientation: int

    def __post_init__(self):
        if not self.width > 0:
            raise ValueError("edge map width must be positive")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    def __call__(self, X):
        return self.center + self.orientation * self.width * np.asarray(X, dtype=float)

    def inverse(self, x):
        return (np.asarray(x, dtype=float) - self.center) / (self.orientation * self.width)


def _which(which: str) -> int:
    if which not in ("max", "min"):
        raise ValueError(f"which must be 'max' or 'min', got {which!r}")
    return 1 if which == "max" else -1


def soft_edge_map_laguerre(ens: LaguerreEnsemble, which: str = "max") -> EdgeMap:
    """Map for the scaled variable ``lambda / N`` about ``t_(+-) = (sqrt(alpha+1) +- 1)^2``."""
    sign = _which(which)
    if sign < 0 and ens.alpha == 0:
        raise ValueError("alpha = 0: the smallest eigenvalue sits at a hard edge")
    lo, hi = ens.edges
    t = hi if sign > 0 else lo
    width = ens.n ** (-2 / 3) * t ** (2 / 3) / ((hi - lo) / 4) ** (1 / 3)
    return EdgeMap(t, width, sign)


def soft_edge_map_laguerre_direct(alpha: float, n: float, which: str = "max") -> EdgeMap:
    """The same map written with ``sqrt(alpha + 1)`` explicitly (cross-check form)."""
    sign = _which(which)
    r = math.sqrt(alpha + 1)
    center = (r + sign) ** 2
    width = n ** (-2 / 3) * (r + sign) * (1 + sign / r) ** (1 / 3)
    return EdgeMap(center, width, sign)


def jacobi_edge_constants(alpha1: float, alpha2: float):
    """``(theta, tau)`` of the Jacobi soft-edge width."""
    d = alpha1 + alpha2 + 2
    return (alpha1 + 1) / d, 1 / d


def soft_edge_map_jacobi(ens: JacobiEnsemble, which: str = "max") -> EdgeMap:
    sign = _which(which)
    if not (ens.alpha1 > 0 and ens.alpha2 > 0):
        raise ValueError("Jacobi soft edges need alpha1, alpha2 > 0")
    theta, tau = jacobi_edge_constants(ens.alpha1, ens.alpha2)
    lo, hi = ens.edges
    t = hi if sign > 0 else lo
    width = ens.n ** (-2 / 3) * (tau * t * (1 - t)) ** (2 / 3) \
        / (tau * theta * (1 - tau) * (1 - theta)) ** (1 / 6)
    return EdgeMap(t, width, sign)


def soft_edge_map(ens: Ensemble, which: str = "max") -> EdgeMap:
    if isinstance(ens, LaguerreEnsemble):
        return soft_edge_map_laguerre(ens, which)
    return soft_edge_map_jacobi(ens, which)


def tw_right_tail(beta: float, X) -> LogValue:
    """Large-X form ``(1/pi) Gamma(1+beta/2)/(4 beta)^(beta/2) e^(-2 beta X^(3/2)/3) / X^(3 beta/4 - 1/2)``."""
    X = np.asarray(X, dtype=float)
    if np.any(X <= 0):
        raise ValueError("tw_right_tail needs X > 0")
    log = (-math.log(math.pi) + gammaln(1 + beta / 2) - beta / 2 * math.log(4 * beta)
           - 2 * beta * X ** 1.5 / 3 - (3 * beta / 4 - 0.5) * np.log(X))
    if X.ndim == 0:
        return LogValue(1, float(log))
    return LogValue(np.ones_like(log), log)


def hard_edge_coefficients(beta: float, a: float):
    """Coefficients ``(c_X, c_sqrtX, c_logsqrtX)`` of the hard-edge gap asymptote (no constant)."""
    return (-beta / 8, beta * a / 2, -beta * (a * (a - 1) / 4 + a / (2 * beta)))


def hard_edge_tail(beta: float, a: float, X) -> LogValue:
    """``log E ~ -beta (X/8 - a sqrt(X)/2 + (a(a-1)/4 + a/(2 beta)) log sqrt(X))``."""
    X = np.asarray(X, dtype=float)
    if np.any(X <= 0):
        raise ValueError("hard_edge_tail needs X > 0")
    if a < 0:
        raise ValueError("hard_edge_tail needs a >= 0")
    c1, c2, c3 = hard_edge_coefficients(beta, a)
    log = c1 * X + c2 * np.sqrt(X) + c3 * 0.5 * np.log(X)
    if X.ndim == 0:
        return LogValue(1, float(log))
    return LogValue(np.ones_like(log), log)


@dataclass(frozen=True)
class ScalingRow:
    X: float
    n: int
    x: float
    ratio: float
    region: Region

    @property
    def flagged(self) -> bool:
        return not self.region.is_tail


@dataclass
class ScalingReport:
    beta: float
    rows: List[ScalingRow] = field(default_factory=list)

    def ratio(self, X: float, n: int) -> float:
        for r in self.rows:
            if r.X == X and r.n == n:
                return r.ratio
        raise KeyError((X, n))

    def converging(self, X: float) -> bool:
        """Distance from 1 at the largest N below that at the smallest N."""
        rs = sorted((r for r in self.rows if r.X == X and not r.flagged), key=lambda r: r.n)
        if len(rs) < 2:
            return False
        return abs(rs[-1].ratio - 1) < abs(rs[0].ratio - 1)

    def monotone(self, X: float) -> bool:
        """Distance from 1 strictly decreasing along the N grid."""
        d = [abs(r.ratio - 1) for r in sorted(self.rows, key=lambda r: r.n)
             if r.X == X and not r.flagged]
        return all(b < a for a, b in zip(d, d[1:]))


def scaling_limit_check(ens: Ensemble, X_grid: Sequence[float], N_grid: Sequence[int]
                        ) -> ScalingReport:
    """Scaled asymptotic density at the largest-eigenvalue edge over the right-tail law.

    The asymptotic density is evaluated at ``center + width X`` and multiplied
    by the width (Jacobian of the map); points landing in the edge band are
    flagged with a NaN ratio.
    """
    report = ScalingReport(ens.beta)
    for n in N_grid:
        e = ens.with_n(int(n))
        emap = soft_edge_map(e, "max")
        for X in X_grid:
            x = float(emap(X))
            reg = e.region(x)
            if not reg.is_tail:
                report.rows.append(ScalingRow(float(X), int(n), x, math.nan, reg))
                continue
            log_p = asym_density(e, x).log_value + math.log(emap.width)
            ratio = math.exp(log_p - float(tw_right_tail(e.beta, X).log_abs))
            report.rows.append(ScalingRow(float(X), int(n), x, ratio, reg))
    return report
