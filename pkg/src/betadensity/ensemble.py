"""Parameter bundles, support edges and region classification."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from .logvalue import LogValue

# relative slack for a discriminant that is negative only through rounding
_DISC_TOL = 1e-12


class Flavor(str, Enum):
    LAGUERRE = "laguerre"
    JACOBI = "jacobi"


class Region(str, Enum):
    LEFT_TAIL = "LeftTail"
    BULK = "Bulk"
    RIGHT_TAIL = "RightTail"
    EDGE_BAND = "EdgeBand"

    @property
    def is_tail(self) -> bool:
        return self in (Region.LEFT_TAIL, Region.RIGHT_TAIL)


def laguerre_support(alpha: float) -> Tuple[float, float]:
    """Edges ``(a1^2, a2^2)`` of the Marchenko-Pastur support.

    ``a1 = sqrt(alpha + 1) - 1`` and ``a2 = sqrt(alpha + 1) + 1``.
    """
    if not alpha >= 0:
        raise ValueError(f"alpha must be nonnegative, got {alpha}")
    r = math.sqrt(alpha + 1.0)
    # (r - 1)^2 = alpha^2 / (r + 1)^2 avoids cancellation for small alpha
    return (alpha / (r + 1.0)) ** 2, (r + 1.0) ** 2


def jacobi_support(alpha1: float, alpha2: float) -> Tuple[float, float]:
    """Edges ``(c1, c2)`` of the Jacobi bulk support for rates ``alpha1, alpha2``.

    The sum ``s = c1 + c2`` and product ``p = c1 c2`` follow linearly from the
    two defining relations; the roots of ``z^2 - s z + p`` are then taken with
    the larger root first and the smaller obtained from the product.
    """
    if not (alpha1 >= 0 and alpha2 >= 0):
        raise ValueError(f"rates must be nonnegative, got ({alpha1}, {alpha2})")
    d = alpha1 + alpha2 + 2.0
    s = 1.0 + (alpha1 - alpha2) * (alpha1 + alpha2) / d ** 2
    q = 2.0 * (alpha1 ** 2 + alpha2 ** 2) / d ** 2 - 1.0
    p = (q + 2.0 * s - 1.0) / 4.0
    disc = s * s - 4.0 * p
    if disc < 0:
        if disc < -_DISC_TOL * max(1.0, s * s):
            raise RuntimeError(f"negative discriminant {disc} for rates ({alpha1}, {alpha2})")
        disc = 0.0
    c2 = min(0.5 * (s + math.sqrt(disc)), 1.0)
    c1 = min(max(p / c2, 0.0), c2) if c2 > 0 else 0.0
    return c1, c2


def _signed_root(x, lo, hi, name):
    x = np.asarray(x, dtype=float)
    if np.any((x > lo) & (x < hi)):
        raise ValueError(f"{name}: x lies strictly inside the support ({lo}, {hi})")
    mag = np.sqrt(np.abs((x - lo) * (x - hi)))
    out = np.where(x >= hi, mag, -mag)
    return float(out) if out.ndim == 0 else out


def u_laguerre(x, edges: Tuple[float, float]):
    """Signed root ``u^L``: positive right of the support, negative left of it."""
    return _signed_root(x, edges[0], edges[1], "u_laguerre")


def u_jacobi(x, edges: Tuple[float, float]):
    """Signed root ``u^J``: positive above ``c2``, negative below ``c1``."""
    return _signed_root(x, edges[0], edges[1], "u_jacobi")


def classify_region(x: float, edges: Tuple[float, float], delta: float,
                    domain: Tuple[float, float] = (0.0, math.inf)) -> Region:
    """Locate ``x`` relative to the support, with an exclusion band of half-width ``delta``."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    lo_dom, hi_dom = domain
    if not (lo_dom < x < hi_dom):
        raise ValueError(f"x = {x} outside the natural domain {domain}")
    lo, hi = edges
    if abs(x - lo) <= delta or abs(x - hi) <= delta:
        return Region.EDGE_BAND
    if x < lo:
        return Region.LEFT_TAIL
    if x > hi:
        return Region.RIGHT_TAIL
    return Region.BULK


def _check_common(beta, n):
    if not (isinstance(beta, (int, float, np.floating, np.integer)) and beta > 0
            and math.isfinite(beta)):
        raise ValueError(f"beta must be a positive real, got {beta}")
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")


@dataclass(frozen=True)
class LaguerreEnsemble:
    """Laguerre beta-ensemble with weight ``x^(beta a/2 + beta/2 - 1) e^(-beta x/2)``, ``a = alpha n``."""

    beta: float
    n: int
    alpha: float
    edges: Tuple[float, float] = field(init=False)
    flavor = Flavor.LAGUERRE
    domain = (0.0, math.inf)

    def __post_init__(self):
        _check_common(self.beta, self.n)
        if not self.alpha >= 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "edges", laguerre_support(self.alpha))

    @property
    def a(self) -> float:
        """Finite-N exponent ``a = alpha N``."""
        return self.alpha * self.n

    @property
    def weight_exponent(self) -> float:
        """One-body exponent ``beta a/2 + beta/2 - 1`` of ``lambda``."""
        return self.beta * self.a / 2 + self.beta / 2 - 1

    @property
    def rates(self) -> Tuple[float, ...]:
        return (self.alpha,)

    def with_n(self, n: int) -> "LaguerreEnsemble":
        return LaguerreEnsemble(self.beta, n, self.alpha)

    def with_beta(self, beta: float) -> "LaguerreEnsemble":
        return LaguerreEnsemble(beta, self.n, self.alpha)

    def u(self, x):
        return u_laguerre(x, self.edges)

    def default_delta(self) -> float:
        return 1e-6 * (self.edges[1] - self.edges[0])

    def region(self, x: float, delta: Optional[float] = None) -> Region:
        return classify_region(x, self.edges, delta or self.default_delta(), self.domain)


@dataclass(frozen=True)
class JacobiEnsemble:
    """Jacobi beta-ensemble on (0, 1), exponents ``a1 = alpha1 n``, ``a2 = alpha2 n``."""

    beta: float
    n: int
    alpha1: float
    alpha2: float
    edges: Tuple[float, float] = field(init=False)
    flavor = Flavor.JACOBI
    domain = (0.0, 1.0)

    def __post_init__(self):
        _check_common(self.beta, self.n)
        if not (self.alpha1 >= 0 and self.alpha2 >= 0):
            raise ValueError(f"rates must be nonnegative, got ({self.alpha1}, {self.alpha2})")
        object.__setattr__(self, "beta", float(self.beta))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "alpha1", float(self.alpha1))
        object.__setattr__(self, "alpha2", float(self.alpha2))
        object.__setattr__(self, "edges", jacobi_support(self.alpha1, self.alpha2))

    @property
    def a1(self) -> float:
        return self.alpha1 * self.n

    @property
    def a2(self) -> float:
        return self.alpha2 * self.n

    @property
    def weight_exponents(self) -> Tuple[float, float]:
        """One-body exponents of ``lambda`` and ``1 - lambda``."""
        off = self.beta / 2 - 1
        return self.beta * self.a1 / 2 + off, self.beta * self.a2 / 2 + off

    @property
    def rates(self) -> Tuple[float, ...]:
        return (self.alpha1, self.alpha2)

    def with_n(self, n: int) -> "JacobiEnsemble":
        return JacobiEnsemble(self.beta, n, self.alpha1, self.alpha2)

    def with_beta(self, beta: float) -> "JacobiEnsemble":
        return JacobiEnsemble(beta, self.n, self.alpha1, self.alpha2)

    def mirrored(self) -> "JacobiEnsemble":
        """The ensemble of ``1 - lambda``."""
        return JacobiEnsemble(self.beta, self.n, self.alpha2, self.alpha1)

    def u(self, x):
        return u_jacobi(x, self.edges)

    def default_delta(self) -> float:
        return 1e-6 * (self.edges[1] - self.edges[0])

    def region(self, x: float, delta: Optional[float] = None) -> Region:
        return classify_region(x, self.edges, delta or self.default_delta(), self.domain)


def require_tail(ens, x: float, delta: Optional[float] = None, op: str = "") -> Region:
    """Region of ``x``, raising unless it is in a tail (outside the edge band)."""
    reg = ens.region(x, delta)
    if not reg.is_tail:
        raise ValueError(f"{op or 'evaluation'} requires x outside the support and edge band; "
                         f"x = {x} is in region {reg.value}")
    return reg


__all__ = [
    "Flavor", "Region", "LogValue", "LaguerreEnsemble", "JacobiEnsemble",
    "laguerre_support", "jacobi_support", "u_laguerre", "u_jacobi",
    "classify_region", "require_tail",
]
