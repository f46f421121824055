"""Named check suites: closed forms against their independent oracles."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Dict, List, Optional, Sequence

import numpy as np

from .ensemble import JacobiEnsemble, LaguerreEnsemble
from .fluctuation import (jacobi_log_potential, mean_diff, mean_oracle, variance_diff,
                          variance_series)
from .largedev import rate_identity_checks
from .softedge import scaling_limit_check

LAGUERRE_RATES = (0.5, 1.0, 2.0)
JACOBI_RATES = ((5.0, 5.0), (2.0, 7.0))


def load_tolerances(path: Optional[str] = None) -> Dict[str, float]:
    """Pinned default tolerances, optionally overridden by a JSON file."""
    text = resources.files("betadensity").joinpath("data/tolerances.json").read_text()
    tol = json.loads(text)["tolerances"]
    if path:
        with open(path) as fh:
            override = json.load(fh)
        tol.update(override.get("tolerances", override))
    return {k: float(v) for k, v in tol.items()}


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)

    def as_row(self) -> dict:
        row = asdict(self)
        row["passed"] = self.passed
        return row


def tail_points(ens, count: int, side: str) -> np.ndarray:
    """Points well inside one tail (away from the edge band)."""
    lo, hi = ens.edges
    if side == "left":
        return np.linspace(0.05 * lo, 0.9 * lo, count)
    top = 1.0 if isinstance(ens, JacobiEnsemble) else 4 * hi
    return np.linspace(hi + 0.1 * (top - hi) if top < math.inf else 1.1 * hi,
                       hi + 0.9 * (top - hi), count)


def check_rates(n_points: int = 100, tol: float = 1e-10, seed: int = 0) -> List[CheckResult]:
    """Rate identities at random tail points, beta = 2."""
    rng = np.random.default_rng(seed)
    out = []
    for al in LAGUERRE_RATES:
        ens = LaguerreEnsemble(2.0, 10, al)
        lo, hi = ens.edges
        left = rng.uniform(0.02 * lo, 0.98 * lo, n_points)
        right = rng.uniform(1.02 * hi, 5 * hi, n_points)
        d_phi = max(rate_identity_checks(ens, float(x)).diff_potential_phi for x in left)
        dk_left = max(rate_identity_checks(ens, float(x)).diff_potential_kappa for x in left)
        dk_right = max(rate_identity_checks(ens, float(x)).diff_potential_kappa for x in right)
        out.append(CheckResult("rates", f"alpha={al} potential vs phi_min rate (left tail)", d_phi, tol))
        out.append(CheckResult("rates", f"alpha={al} potential vs kappa rate (left tail)", dk_left, tol))
        out.append(CheckResult("rates", f"alpha={al} potential vs kappa rate (right tail)", dk_right, tol))
    return out


def _fluct_ensembles(beta: float, n: int):
    for al in LAGUERRE_RATES:
        yield f"laguerre alpha={al}", LaguerreEnsemble(beta, n, al)
    for a1, a2 in JACOBI_RATES:
        yield f"jacobi ({a1},{a2})", JacobiEnsemble(beta, n, a1, a2)


def check_fluctuation(n_points: int = 20, tol: float = 1e-8, beta: float = 1.0, n: int = 10
                      ) -> List[CheckResult]:
    """Means against quadrature, variances against truncated Chebyshev series.

    beta = 1 keeps the edge-correction part of the mean switched on.
    """
    out = []
    for label, ens in _fluct_ensembles(beta, n):
        for side in ("left", "right"):
            xs = tail_points(ens, n_points, side)
            dm = max(abs(mean_diff(ens, float(x)) - mean_oracle(ens, float(x))) for x in xs)
            dv = max(abs(variance_diff(ens, float(x)) - variance_series(ens, float(x)).value)
                     for x in xs)
            out.append(CheckResult("fluctuation", f"{label} mean ({side} tail)", dm, tol))
            out.append(CheckResult("fluctuation", f"{label} variance ({side} tail)", dv, tol))
            if isinstance(ens, JacobiEnsemble):
                dr = max(abs(jacobi_log_potential(ens, float(x), "logs")
                             - jacobi_log_potential(ens, float(x), "quadratic")) for x in xs)
                out.append(CheckResult("fluctuation", f"{label} potential forms ({side} tail)", dr, tol))
    return out


def check_scaling(tol: float = 0.05, betas: Sequence[float] = (1.0, 2.0, 4.0),
                  X_grid: Sequence[float] = (2.0, 4.0, 6.0), N_grid: Sequence[int] = (100, 10_000)
                  ) -> List[CheckResult]:
    """Scaled asymptotic density over the right-tail law at the largest N.

    A point whose distance from 1 did not shrink from the smallest to the
    largest N is reported with an infinite residual.
    """
    out = []
    for flavor, base in (("laguerre", LaguerreEnsemble(2.0, 100, 1.0)),
                         ("jacobi", JacobiEnsemble(2.0, 100, 5.0, 5.0))):
        for b in betas:
            rep = scaling_limit_check(base.with_beta(b), X_grid, N_grid)
            for X in X_grid:
                dev = abs(rep.ratio(X, max(N_grid)) - 1)
                res = dev if rep.converging(X) else math.inf
                out.append(CheckResult("scaling", f"{flavor} beta={b} X={X}", res, tol))
    return out


SUITES = {
    "rates": lambda tol: check_rates(tol=tol["rates"]),
    "fluctuation": lambda tol: check_fluctuation(tol=tol["fluctuation"]),
    "scaling": lambda tol: check_scaling(tol=tol["scaling"]),
}
