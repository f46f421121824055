"""Tridiagonal-model samplers and Monte Carlo estimators.

Laguerre: bidiagonal chi model, eigenvalues of ``B B^T / beta`` have joint
density ``prod l^c e^(-beta l / 2) |Delta|^beta``.  Jacobi: the Verblunsky
(Killip-Nenciu) model on [-2, 2], mapped to (0, 1) by ``(l + 2) / 4``, giving
``prod x^c1 (1 - x)^c2 |Delta|^beta``.  The one-body exponents are the
ensemble's own (``c = beta a / 2 + beta / 2 - 1``), so samples share their
law with :mod:`betadensity.exactdensity`.

Estimators work on batches of tridiagonal matrices and count eigenvalues
below each bin edge with Sturm sequences, which is exact and avoids a full
diagonalization per draw.  Work is split into fixed-size chunks seeded by
``SeedSequence(seed).spawn``; chunk results are integer counts, so summaries
do not depend on the number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .bulkdensity import bulk_cdf
from .ensemble import JacobiEnsemble, LaguerreEnsemble

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]

CHUNK = 500


class Estimator(str, Enum):
    DENSITY = "density"
    MAX_CDF = "max_cdf"
    MIN_CDF = "min_cdf"
    GAP_PROB = "gap_prob"


@dataclass(frozen=True)
class SpectrumSample:
    eigenvalues: np.ndarray
    seed: int

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted ascending")


@dataclass(frozen=True)
class EmpiricalSummary:
    """Histogram / probability estimates with standard errors.

    For ``density``, ``max_cdf`` and ``min_cdf`` the ``counts`` plus
    ``outside`` (events falling outside ``bin_edges``) add up to the number of
    events.  For ``gap_prob`` the ``bin_edges`` hold the s grid and
    ``counts[i]`` is the number of samples with no eigenvalue in (0, s_i).
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    standard_errors: np.ndarray
    n_samples: int
    kind: Estimator
    values: np.ndarray
    outside: int = 0

    @property
    def centers(self) -> np.ndarray:
        if self.kind == Estimator.GAP_PROB:
            return self.bin_edges
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])


# --- eigensolvers --------------------------------------------------------------

def tridiagonal_eigvalsh(d: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of a symmetric tridiagonal matrix (LAPACK sterf)."""
    if len(d) == 1:
        return np.array(d, dtype=float)
    return eigh_tridiagonal(d, e, eigvals_only=True, lapack_driver="sterf")


def tridiagonal_eigvalsh_ql(d: Sequence[float], e: Sequence[float], max_iter: int = 60) -> np.ndarray:
    """Implicit QL with Wilkinson shifts; slow reference implementation."""
    d = [float(v) for v in d]
    n = len(d)
    e = [float(v) for v in e] + [0.0]
    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 1e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            it += 1
            if it > max_iter:
                raise RuntimeError("QL iteration did not converge")
            g = (d[l + 1] - d[l]) / (2 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            underflow = False
            while i >= l:
                f, b = s * e[i], c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s, c = f / r, g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(np.array(d))


# --- samplers ------------------------------------------------------------------

def _laguerre_tridiag(rng: np.random.Generator, beta: float, n: int, c: float, m: int):
    """``m`` draws of the tridiagonal ``B B^T / beta`` (rows are draws)."""
    i = np.arange(n)
    x = np.sqrt(rng.chisquare(2 * c + 2 + beta * (n - 1 - i), size=(m, n)))
    y = np.sqrt(rng.chisquare(beta * (n - 1 - i[:-1]), size=(m, n - 1))) if n > 1 \
        else np.zeros((m, 0))
    d = x * x
    d[:, 1:] += y * y
    return d / beta, x[:, :-1] * y / beta


def _jacobi_tridiag(rng: np.random.Generator, beta: float, n: int, c1: float, c2: float, m: int):
    """``m`` draws of the Verblunsky-parametrized Jacobi matrix mapped to (0, 1)."""
    a, b = c2, c1            # (2 - l)^a (2 + l)^b on [-2, 2]
    k = np.arange(2 * n - 1)
    even = k % 2 == 0
    s = np.where(even, (2 * n - k - 2) * beta / 4 + a + 1, (2 * n - k - 3) * beta / 4 + a + b + 2)
    t = np.where(even, (2 * n - k - 2) * beta / 4 + b + 1, (2 * n - k - 1) * beta / 4)
    # B(s, t) on [-1, 1]: density (1 - x)^(s-1) (1 + x)^(t-1)
    alph = 2 * rng.beta(t, s, size=(m, 2 * n - 1)) - 1
    pad = -np.ones((m, 2))
    al = np.concatenate([pad, alph, pad[:, :1]], axis=1)    # al[:, j + 2] = alpha_j
    kk = np.arange(n)
    am1, a0, am2 = al[:, 2 * kk + 1], al[:, 2 * kk + 2], al[:, 2 * kk]
    diag = (1 - am1) * a0 - (1 + am1) * am2
    kk = np.arange(n - 1)
    off = np.sqrt((1 - al[:, 2 * kk + 1]) * (1 - al[:, 2 * kk + 2] ** 2) * (1 + al[:, 2 * kk + 3]))
    # x = (l + 2) / 4
    return (diag + 2) / 4, off / 4


def _tridiag(ens: Ensemble, rng, m: int):
    if isinstance(ens, LaguerreEnsemble):
        return _laguerre_tridiag(rng, ens.beta, ens.n, ens.weight_exponent, m)
    c1, c2 = ens.weight_exponents
    return _jacobi_tridiag(rng, ens.beta, ens.n, c1, c2, m)


def sturm_counts(d: np.ndarray, e: np.ndarray, shifts) -> np.ndarray:
    """Number of eigenvalues below each shift, for a batch of tridiagonals.

    ``d`` is (m, n), ``e`` is (m, n-1); returns (m, len(shifts)) integers.
    """
    shifts = np.asarray(shifts, dtype=float)[None, :]
    tiny = np.finfo(float).tiny
    e2 = e * e
    q = d[:, :1] - shifts
    count = (q < 0).astype(np.int64)
    for i in range(1, d.shape[1]):
        q = np.where(q == 0, -tiny, q)
        q = d[:, i:i + 1] - shifts - e2[:, i - 1:i] / q
        count += q < 0
    return count


def _draw(ens: Ensemble, seed) -> np.ndarray:
    d, e = _tridiag(ens, np.random.default_rng(seed), 1)
    ev = tridiagonal_eigvalsh(d[0], e[0])
    hi = 1 - np.finfo(float).epsneg if isinstance(ens, JacobiEnsemble) else np.inf
    return np.clip(ev, np.finfo(float).tiny, hi)


def _seed_int(seed) -> int:
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(2, dtype=np.uint32).view(np.uint64)[0])
    return int(seed)


def sample_laguerre(ens: LaguerreEnsemble, seed) -> SpectrumSample:
    """One draw; joint density ``prod l^c e^(-beta l/2) |Delta|^beta``, c the ensemble exponent."""
    if not isinstance(ens, LaguerreEnsemble):
        raise TypeError("sample_laguerre needs a LaguerreEnsemble")
    return SpectrumSample(_draw(ens, seed), _seed_int(seed))


def sample_jacobi(ens: JacobiEnsemble, seed) -> SpectrumSample:
    """One draw; joint density ``prod x^c1 (1-x)^c2 |Delta|^beta`` on (0, 1)."""
    if not isinstance(ens, JacobiEnsemble):
        raise TypeError("sample_jacobi needs a JacobiEnsemble")
    return SpectrumSample(_draw(ens, seed), _seed_int(seed))


def sample(ens: Ensemble, seed) -> SpectrumSample:
    return sample_laguerre(ens, seed) if isinstance(ens, LaguerreEnsemble) else sample_jacobi(ens, seed)


# --- chunked reductions ----------------------------------------------------------

def _scale(ens: Ensemble) -> float:
    """Laguerre estimates are reported for ``lambda / N``."""
    return float(ens.n) if isinstance(ens, LaguerreEnsemble) else 1.0


def _chunk_counts(args):
    """Per-draw counts of eigenvalues below each edge, shape (m, len(edges))."""
    ens, seed, m, edges = args
    d, e = _tridiag(ens, np.random.default_rng(seed), m)
    return sturm_counts(d, e, edges * _scale(ens))


def _chunk_density(args):
    below = _chunk_counts(args)
    h = np.diff(below, axis=1)
    n = args[0].n
    return h.sum(axis=0), (h * h).sum(axis=0), int(h.shape[0] * n - h.sum())


def _chunk_extreme(args):
    ens, _, m, _, which = args
    below = _chunk_counts(args[:4])
    # cdf of the extreme at each edge
    hit = below == ens.n if which == "max" else below >= 1
    cdf_counts = hit.sum(axis=0)
    h = np.diff(cdf_counts)
    return h.astype(np.int64), int(m - h.sum())


def _chunk_gap(args):
    beta, n, c, seed, m, s_grid = args
    d, e = _laguerre_tridiag(np.random.default_rng(seed), beta, n, c, m)
    return (sturm_counts(d, e, s_grid) == 0).sum(axis=0).astype(np.int64)


def _run_chunks(fn: Callable, make_args: Callable, n_samples: int, seed: int, workers: int) -> List:
    n_chunks = max(1, math.ceil(n_samples / CHUNK))
    seeds = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(CHUNK, n_samples - i * CHUNK) for i in range(n_chunks)]
    jobs = [make_args(s, m) for s, m in zip(seeds, sizes)]
    if workers <= 1 or n_chunks == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _check_samples(n_samples: int, minimum: int = 1):
    if n_samples < minimum:
        raise ValueError(f"n_samples must be at least {minimum}, got {n_samples}")


def _edges(bins) -> np.ndarray:
    edges = np.asarray(bins, dtype=float)
    if edges.ndim != 1 or len(edges) < 2 or np.any(np.diff(edges) <= 0):
        raise ValueError("bins must be an increasing sequence of at least two edges")
    return edges


def density_histogram(ens: Ensemble, n_samples: int, bins, seed: int = 0, workers: int = 1
                      ) -> EmpiricalSummary:
    """Histogram of all eigenvalues (Laguerre: of ``lambda / N``) as a density per eigenvalue.

    ``values`` estimate the one-point density divided by N; standard errors
    use the between-sample variance of the bin counts.
    """
    _check_samples(n_samples, 2)
    edges = _edges(bins)
    parts = _run_chunks(_chunk_density, lambda s, m: (ens, s, m, edges), n_samples, seed, workers)
    counts = sum(p[0] for p in parts)
    sq = sum(p[1] for p in parts)
    outside = sum(p[2] for p in parts)
    mean = counts / n_samples
    var = (sq - n_samples * mean ** 2) / (n_samples - 1)
    norm = ens.n * np.diff(edges)
    return EmpiricalSummary(edges, counts, np.sqrt(np.maximum(var, 0) / n_samples) / norm,
                            n_samples, Estimator.DENSITY, mean / norm, outside)


def _extreme(ens, n_samples, bins, seed, workers, which):
    _check_samples(n_samples, 1000)
    edges = _edges(bins)
    parts = _run_chunks(_chunk_extreme, lambda s, m: (ens, s, m, edges, which), n_samples, seed, workers)
    counts = sum(p[0] for p in parts)
    outside = sum(p[1] for p in parts)
    p = counts / n_samples
    width = np.diff(edges)
    se = np.sqrt(p * (1 - p) / n_samples) / width
    kind = Estimator.MAX_CDF if which == "max" else Estimator.MIN_CDF
    return EmpiricalSummary(edges, counts, se, n_samples, kind, p / width, outside)


def estimate_max_pdf(ens: Ensemble, n_samples: int, bins, seed: int = 0, workers: int = 1
                     ) -> EmpiricalSummary:
    """Histogram PDF of the largest eigenvalue (Laguerre: of ``lambda_max / N``), binomial errors."""
    return _extreme(ens, n_samples, bins, seed, workers, "max")


def estimate_min_pdf(ens: Ensemble, n_samples: int, bins, seed: int = 0, workers: int = 1
                     ) -> EmpiricalSummary:
    return _extreme(ens, n_samples, bins, seed, workers, "min")


def estimate_gap_probability(beta: float, n: int, a: float, s_grid, n_samples: int,
                             seed: int = 0, workers: int = 1) -> EmpiricalSummary:
    """``P(no eigenvalue in (0, s))`` for weight ``l^(beta a/2) e^(-beta l/2)``, a fixed."""
    _check_samples(n_samples)
    if not beta > 0 or n < 1 or a < 0:
        raise ValueError("need beta > 0, n >= 1 and a >= 0")
    s_grid = np.asarray(s_grid, dtype=float)
    if np.any(s_grid < 0):
        raise ValueError("s_grid must be nonnegative")
    c = beta * a / 2
    parts = _run_chunks(_chunk_gap, lambda s, m: (beta, n, c, s, m, s_grid), n_samples, seed, workers)
    counts = sum(parts)
    p = counts / n_samples
    se = np.sqrt(p * (1 - p) / n_samples)
    return EmpiricalSummary(s_grid, counts, se, n_samples, Estimator.GAP_PROB, p)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    slope_error: float
    n_points: int


def fit_gap_slope(summary: EmpiricalSummary, n: int, min_count: int = 20) -> SlopeFit:
    """Weighted least squares of ``log E`` against ``X = 4 N s``."""
    X = 4 * n * summary.bin_edges
    ok = (summary.counts >= min_count) & (summary.counts < summary.n_samples) & (X > 0)
    if ok.sum() < 2:
        raise ValueError("not enough well-populated grid points for a slope fit")
    y = np.log(summary.values[ok])
    # delta-method variance of log p
    w = summary.values[ok] ** 2 / summary.standard_errors[ok] ** 2
    A = np.stack([X[ok], np.ones(ok.sum())], axis=1)
    cov = np.linalg.inv(A.T @ (A * w[:, None]))
    coef = cov @ (A.T @ (w * y))
    return SlopeFit(float(coef[0]), float(coef[1]), float(math.sqrt(cov[0, 0])), int(ok.sum()))


def bulk_bin_expectation(ens: Ensemble, edges) -> np.ndarray:
    """Bulk-law mass of each bin (per eigenvalue, Laguerre in ``lambda / N``)."""
    cdf = np.array([bulk_cdf(ens, float(e)) for e in edges])
    return np.diff(cdf)


@dataclass(frozen=True)
class BulkComparison:
    z_scores: np.ndarray
    interior: np.ndarray
    max_abs_z: float

    @property
    def passed(self) -> bool:
        return bool(self.max_abs_z < 4.0)


def compare_with_bulk(ens: Ensemble, summary: EmpiricalSummary, margin: float = 0.1) -> BulkComparison:
    """Binwise z-scores of the histogram against the bulk law.

    Interior bins lie at least ``margin`` times the support width from either edge.
    """
    lo, hi = ens.edges
    edges = summary.bin_edges
    width = np.diff(edges)
    expected = bulk_bin_expectation(ens, edges) / width
    pad = margin * (hi - lo)
    interior = (edges[:-1] >= lo + pad) & (edges[1:] <= hi - pad)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (summary.values - expected) / summary.standard_errors
    zi = z[interior]
    return BulkComparison(z, interior, float(np.max(np.abs(zi))) if zi.size else 0.0)
