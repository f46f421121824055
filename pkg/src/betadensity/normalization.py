"""Log partition functions of the Laguerre and Jacobi beta-ensembles."""
from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln


def laguerre_log_partition(n: int, c: float, s: float, beta: float) -> float:
    """``log int prod lambda^c e^(-s lambda) |Delta|^beta`` over ``(0, inf)^n``."""
    if n == 0:
        return 0.0
    j = np.arange(n)
    return float(-(n * (c + 1) + beta * n * (n - 1) / 2) * math.log(s)
                 + np.sum(gammaln(c + 1 + j * beta / 2) + gammaln(1 + (j + 1) * beta / 2))
                 - n * gammaln(1 + beta / 2))


def jacobi_log_partition(n: int, c1: float, c2: float, beta: float) -> float:
    """Selberg integral ``log int prod lambda^c1 (1 - lambda)^c2 |Delta|^beta`` over ``(0, 1)^n``."""
    if n == 0:
        return 0.0
    j = np.arange(n)
    g = beta / 2
    return float(np.sum(gammaln(c1 + 1 + j * g) + gammaln(c2 + 1 + j * g)
                        + gammaln(1 + (j + 1) * g)
                        - gammaln(c1 + c2 + 2 + (n + j - 1) * g))
                 - n * gammaln(1 + g))
