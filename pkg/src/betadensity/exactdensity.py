"""Exact finite-N one-point densities.

Laguerre densities use the weight ``x^c e^(-beta x / 2)`` with
``c = beta a / 2 + beta / 2 - 1`` and ``a = alpha N``; Jacobi densities use
``x^c1 (1 - x)^c2`` with the analogous exponents.  At beta = 2 this is
``x^a e^(-x)`` (resp. ``x^a1 (1-x)^a2``); at beta = 1 it is
``x^((a-1)/2) e^(-x/2)``.

Arguments are raw eigenvalue coordinates (the Laguerre tables compare at
``N x``).  Results are :class:`LogValue`; polynomial recurrences carry an
explicit binary exponent so that nothing overflows for ``a`` in the hundreds.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.special import betaln, gammaln, roots_genlaguerre

from .ensemble import Flavor, JacobiEnsemble, LaguerreEnsemble
from .logvalue import LogValue, log_add, log_sum
from .normalization import jacobi_log_partition, laguerre_log_partition
from .quadrature import gauss_jacobi_unit, gauss_laguerre

Ensemble = Union[LaguerreEnsemble, JacobiEnsemble]

LN2 = math.log(2.0)
DEFAULT_THRESHOLD = 400     # renormalize once |mantissa| leaves 2^(+-threshold)
SGN_NODES = 200             # nodes per piece of the sgn integrals
BRUTE_MAX_N = 6


@dataclass(frozen=True)
class ScaledPoly:
    """Values ``mantissa * 2**exponent`` with an integer exponent array."""

    mantissa: np.ndarray
    exponent: np.ndarray

    def log_abs(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mantissa)) + self.exponent * LN2

    def sign(self) -> np.ndarray:
        return np.sign(self.mantissa)

    def to_log(self) -> LogValue:
        return LogValue(self.sign(), self.log_abs())

    def to_float(self) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return np.ldexp(self.mantissa, self.exponent.astype(int))


def _logw(w):
    """Log of quadrature weights; underflowed weights map to -inf."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(w))


def _rescale(cur, prev, exp, threshold, extra=()):
    """Pull mantissas back into range, shifting the shared exponent."""
    m = np.maximum(np.abs(cur), np.abs(prev))
    bad = (m > 2.0 ** threshold) | ((m < 2.0 ** -threshold) & (m > 0))
    if np.any(bad):
        _, e = np.frexp(m)
        shift = np.where(bad, e, 0)
        cur = np.ldexp(cur, -shift)
        prev = np.ldexp(prev, -shift)
        exp = exp + shift
        extra = tuple((np.ldexp(v, -k * shift)) for v, k in extra)
        return cur, prev, exp, extra
    return cur, prev, exp, tuple(v for v, _ in extra)


# --- Laguerre polynomials ------------------------------------------------------

def _laguerre_last3(n: int, a: float, x: np.ndarray, threshold: int = DEFAULT_THRESHOLD):
    """Mantissas of ``L_n, L_(n-1), L_(n-2)`` at x with one shared exponent."""
    x = np.asarray(x, dtype=float)
    zero = np.zeros_like(x)
    exp = np.zeros(x.shape, dtype=np.int64)
    older, prev, cur = zero, zero, np.ones_like(x)
    for k in range(n):
        nxt = ((2 * k + 1 + a - x) * cur - (k + a) * prev) / (k + 1)
        older, prev, cur = prev, cur, nxt
        cur, prev, exp, (older,) = _rescale(cur, prev, exp, threshold, ((older, 1),))
    return cur, prev, older, exp


def laguerre_poly(n: int, a: float, x, threshold: int = DEFAULT_THRESHOLD
                  ) -> Tuple[ScaledPoly, ScaledPoly]:
    """``L_n^a(x)`` and its x-derivative as scaled values.

    Uses ``(k+1) L_(k+1) = (2k+1+a-x) L_k - (k+a) L_(k-1)`` and
    ``x L_n' = n L_n - (n+a) L_(n-1)``.
    """
    if n < 0 or not a > -1:
        raise ValueError("need n >= 0 and a > -1")
    x = np.asarray(x, dtype=float)
    cur, prev, _, exp = _laguerre_last3(n, a, x, threshold)
    if n == 0:
        deriv = np.zeros_like(x)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            deriv = (n * cur - (n + a) * prev) / x
        # at x = 0 use L_n^a' = -L_(n-1)^(a+1)
        if np.any(x == 0):
            alt = -math.exp(gammaln(n + a + 1) - gammaln(n) - gammaln(a + 2))
            deriv = np.where(x == 0, np.ldexp(alt, -exp.astype(int)), deriv)
    return ScaledPoly(cur, exp), ScaledPoly(deriv, exp.copy())


def _laguerre_log_values(n: int, a: float, x, threshold: int = DEFAULT_THRESHOLD):
    """(sign, log|.|) of L_n, L_(n-1), L_(n-2)."""
    cur, prev, older, exp = _laguerre_last3(n, a, x, threshold)
    base = exp * LN2
    with np.errstate(divide="ignore"):
        return [(np.sign(v), np.log(np.abs(v)) + base) for v in (cur, prev, older)]


def _laguerre_beta2_log(n: int, a: float, y: np.ndarray, threshold: int = DEFAULT_THRESHOLD):
    """(sign, log) of ``Gamma(n+1)/Gamma(n+a) y^a e^-y (L_n L_(n-1)' - L_(n-1) L_n')``."""
    y = np.asarray(y, dtype=float)
    if n == 0:
        return np.zeros_like(y), np.full(y.shape, -np.inf)
    ln, lm1, lm2, exp = _laguerre_last3(n, a, y, threshold)
    # y (L_n L_(n-1)' - L_(n-1) L_n') via the contiguous relation
    yd = -ln * lm1 - (n - 1 + a) * ln * lm2 + (n + a) * lm1 * lm1
    with np.errstate(divide="ignore"):
        log = (gammaln(n + 1) - gammaln(n + a) + (a - 1) * np.log(y) - y
               + np.log(np.abs(yd)) + 2 * exp * LN2)
    return np.sign(yd), log


def laguerre_kernel_sum(n: int, a: float, y) -> LogValue:
    """Positive-sum form ``y^a e^-y sum_(k<n) L_k(y)^2 k!/Gamma(k+a+1)`` (cross-check)."""
    y = np.asarray(y, dtype=float)
    logs = []
    exp = np.zeros(y.shape, dtype=np.int64)
    prev, cur = np.zeros_like(y), np.ones_like(y)
    for k in range(n):
        with np.errstate(divide="ignore"):
            logs.append(2 * (np.log(np.abs(cur)) + exp * LN2) + gammaln(k + 1) - gammaln(k + a + 1))
        nxt = ((2 * k + 1 + a - y) * cur - (k + a) * prev) / (k + 1)
        prev, cur = cur, nxt
        cur, prev, exp, _ = _rescale(cur, prev, exp, DEFAULT_THRESHOLD)
    logs = np.array(logs)
    tot = log_sum(np.ones_like(logs), logs, axis=0)
    with np.errstate(divide="ignore"):
        return LogValue(tot.sign, np.asarray(tot.log_abs) + a * np.log(y) - y)


def _as_out(sign, log) -> LogValue:
    if np.ndim(log) == 0:
        return LogValue(int(sign), float(log))
    return LogValue(sign, log)


def _positive_arg(y, name):
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError(f"{name}: argument must be positive")
    return y


def exact_density_laguerre_beta2(ens: LaguerreEnsemble, y, threshold: int = DEFAULT_THRESHOLD
                                 ) -> LogValue:
    """beta = 2 density at eigenvalue coordinate ``y`` (weight ``y^a e^-y``, ``a = alpha N``)."""
    y = _positive_arg(y, "exact_density_laguerre_beta2")
    s, log = _laguerre_beta2_log(ens.n, ens.a, y, threshold)
    return _as_out(s, log)


def _lag_sgn_integral(n2: int, a: float, y: np.ndarray, split: float, nodes: int):
    """``int_0^inf sgn(y - t) L_n2^a(t) t^((a-1)/2) e^(-t/2) dt`` as (sign, log).

    The full integral is exact by Gauss-Laguerre; the piece adjacent to y is
    ``int_0^y`` (t = y s, Gauss-Jacobi) left of ``split`` and ``int_y^inf``
    (t = y + 2r, Gauss-Laguerre) right of it.
    """
    p = (a - 1) / 2
    # total: t = 2r, weight r^p e^-r
    r, w = roots_genlaguerre(max(nodes, n2 // 2 + 2), p)
    s_t, l_t = _laguerre_log_values(n2, a, 2 * r)[0]
    total = log_sum(s_t * np.sign(w), l_t + _logw(w) + (p + 1) * LN2)

    y = np.asarray(y, dtype=float)
    out_s = np.zeros(y.shape)
    out_l = np.full(y.shape, -np.inf)
    left = y <= split
    if np.any(left):
        yl = y[left][:, None]
        s_n, w_n = gauss_jacobi_unit(nodes, p, 0.0)
        t = yl * s_n[None, :]
        sg, lg = _laguerre_log_values(n2, a, t)[0]
        piece = log_sum(sg, lg - t / 2 + _logw(w_n)[None, :], axis=1)
        piece = LogValue(piece.sign, np.asarray(piece.log_abs) + (p + 1) * np.log(y[left]))
        res = log_add(LogValue(piece.sign, np.asarray(piece.log_abs) + LN2),
                      LogValue(-total.sign, np.full(piece.log_abs.shape, total.log_abs)))
        out_s[left], out_l[left] = res.sign, res.log_abs
    right = ~left
    if np.any(right):
        yr = y[right][:, None]
        r_n, w_n = gauss_laguerre(nodes, 0.0)
        t = yr + 2 * r_n[None, :]
        sg, lg = _laguerre_log_values(n2, a, t)[0]
        piece = log_sum(sg, lg + p * np.log(t) + _logw(w_n)[None, :], axis=1)
        piece = LogValue(piece.sign, np.asarray(piece.log_abs) - y[right] / 2 + 2 * LN2)
        res = log_add(LogValue(np.full(piece.log_abs.shape, total.sign),
                               np.full(piece.log_abs.shape, total.log_abs)),
                      LogValue(-np.asarray(piece.sign), piece.log_abs))
        out_s[right], out_l[right] = res.sign, res.log_abs
    return out_s, out_l


def _check_even(ens, name):
    if ens.n % 2:
        raise ValueError(f"{name} requires even N, got {ens.n}")


def exact_density_laguerre_beta1(ens: LaguerreEnsemble, y, form: str = "exact",
                                 nodes: int = SGN_NODES) -> LogValue:
    """beta = 1 density at ``y`` for weight ``y^((a-1)/2) e^(-y/2)``, N even.

    ``rho_1 = rho_2[N-1 eigenvalues, y^a e^-y] - y^((a-1)/2) e^(-y/2) L_(N-1)^a(y)
    Gamma(N) / (4 Gamma(a+N-1)) int sgn(y-t) L_(N-2)^a(t) t^((a-1)/2) e^(-t/2) dt``.

    ``form="nterm"`` uses N eigenvalues in the beta = 2 term instead; that
    variant integrates to N + 1 and is kept only for table reproduction.
    """
    _check_even(ens, "exact_density_laguerre_beta1")
    if form not in ("exact", "nterm"):
        raise ValueError(f"unknown form {form!r}")
    y = _positive_arg(y, "exact_density_laguerre_beta1")
    n, a = ens.n, ens.a
    shape = y.shape
    y = np.atleast_1d(y)
    m2 = n - 1 if form == "exact" else n
    s2, l2 = _laguerre_beta2_log(m2, a, y)
    s_i, l_i = _lag_sgn_integral(n - 2, a, y, split=n * (ens.alpha + 2), nodes=nodes)
    s_l, l_l = _laguerre_log_values(n - 1, a, y)[0]
    corr_log = ((a - 1) / 2 * np.log(y) - y / 2 + l_l + gammaln(n) - math.log(4)
                - gammaln(a + n - 1) + l_i)
    tot = log_add(LogValue(s2, l2), LogValue(-s_l * s_i, corr_log))
    return _as_out(np.reshape(tot.sign, shape), np.reshape(tot.log_abs, shape))


# --- Jacobi polynomials --------------------------------------------------------

def jacobi_recurrence(n_max: int, A: float, B: float):
    """Diagonal and off-diagonal recurrence coefficients of the orthonormal
    polynomials for ``x^A (1-x)^B`` on (0, 1); ``offdiag[k]`` couples k and k+1."""
    al, be = B, A      # standard (1-t)^al (1+t)^be on [-1, 1], x = (1+t)/2
    k = np.arange(n_max + 1, dtype=float)
    s = 2 * k + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (be * be - al * al) / (s * (s + 2))
    diag[0] = (be - al) / (al + be + 2)
    kk = k[1:]
    s1 = 2 * kk + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        off2 = 4 * kk * (kk + al) * (kk + be) * (kk + al + be) / (s1 * s1 * (s1 + 1) * (s1 - 1))
    off2[0] = 4 * (1 + al) * (1 + be) / ((2 + al + be) ** 2 * (3 + al + be))
    return 0.5 * (1 + diag), 0.5 * np.sqrt(off2)


def _jacobi_run(n: int, A: float, B: float, x: np.ndarray, threshold: int, want_sum: bool):
    """Orthonormal ``p_n, p_(n-1)`` (and sum of squares of p_0..p_(n-1)) at x.

    Returns mantissas, shared exponent and the log of ``p_0`` normalization.
    """
    x = np.asarray(x, dtype=float)
    d, b = jacobi_recurrence(max(n, 1), A, B)
    l0 = -0.5 * betaln(A + 1, B + 1)
    exp = np.zeros(x.shape, dtype=np.int64)
    prev, cur = np.zeros_like(x), np.ones_like(x)
    ssum = np.zeros_like(x)
    for k in range(n):
        if want_sum:
            ssum = ssum + cur * cur
        nxt = ((x - d[k]) * cur - (b[k - 1] * prev if k > 0 else 0.0)) / b[k]
        prev, cur = cur, nxt
        cur, prev, exp, (ssum,) = _rescale(cur, prev, exp, threshold, ((ssum, 2),))
    return cur, prev, ssum, exp, l0


def jacobi_orthonormal(n: int, A: float, B: float, x, threshold: int = DEFAULT_THRESHOLD
                       ) -> ScaledPoly:
    """Orthonormal polynomial ``p_n`` for weight ``x^A (1-x)^B`` on (0, 1) (positive leading coefficient)."""
    cur, _, _, exp, l0 = _jacobi_run(n, A, B, x, threshold, False)
    # fold the p_0 normalization into the mantissa and exponent
    e0 = int(math.floor(l0 / LN2))
    return ScaledPoly(cur * math.exp(l0 - e0 * LN2), exp + e0)


def _jacobi_beta2_log(n: int, A: float, B: float, x: np.ndarray, threshold: int = DEFAULT_THRESHOLD):
    x = np.asarray(x, dtype=float)
    if n == 0:
        return np.zeros_like(x), np.full(x.shape, -np.inf)
    _, _, ssum, exp, l0 = _jacobi_run(n, A, B, x, threshold, True)
    with np.errstate(divide="ignore"):
        log = np.log(ssum) + 2 * exp * LN2 + 2 * l0 + A * np.log(x) + B * np.log1p(-x)
    return np.ones_like(x), log


def _unit_interval_arg(x, name):
    x = np.asarray(x, dtype=float)
    if np.any((x <= 0) | (x >= 1)):
        raise ValueError(f"{name}: x must lie in (0, 1)")
    return x


def exact_density_jacobi_beta2(ens: JacobiEnsemble, x, threshold: int = DEFAULT_THRESHOLD
                               ) -> LogValue:
    """beta = 2 density: weight times the Christoffel-Darboux kernel diagonal."""
    x = _unit_interval_arg(x, "exact_density_jacobi_beta2")
    s, log = _jacobi_beta2_log(ens.n, ens.a1, ens.a2, x, threshold)
    return _as_out(s, log)


def _jac_log_values(n: int, A: float, B: float, x):
    cur, prev, _, exp, l0 = _jacobi_run(n, A, B, x, DEFAULT_THRESHOLD, False)
    with np.errstate(divide="ignore"):
        return np.sign(cur), np.log(np.abs(cur)) + exp * LN2 + l0


def _jac_sgn_integral(n2: int, A: float, B: float, x: np.ndarray, split: float, nodes: int):
    """``int_0^1 sgn(x - t) w1(t) p_n2(t) dt`` with ``w1 = t^((A-1)/2) (1-t)^((B-1)/2)``."""
    pA, pB = (A - 1) / 2, (B - 1) / 2
    t_n, w_n = gauss_jacobi_unit(max(nodes, n2 // 2 + 2), pA, pB)
    sg, lg = _jac_log_values(n2, A, B, t_n)
    total = log_sum(sg, lg + _logw(w_n))

    out_s = np.zeros(x.shape)
    out_l = np.full(x.shape, -np.inf)
    left = x <= split
    if np.any(left):
        xl = x[left][:, None]
        s_n, ws = gauss_jacobi_unit(nodes, pA, 0.0)
        t = xl * s_n[None, :]
        sg, lg = _jac_log_values(n2, A, B, t)
        piece = log_sum(sg, lg + pB * np.log1p(-t) + _logw(ws)[None, :], axis=1)
        piece_l = np.asarray(piece.log_abs) + (pA + 1) * np.log(x[left])
        res = log_add(LogValue(piece.sign, piece_l + LN2),
                      LogValue(np.full(piece_l.shape, -total.sign), np.full(piece_l.shape, total.log_abs)))
        out_s[left], out_l[left] = res.sign, res.log_abs
    right = ~left
    if np.any(right):
        xr = x[right][:, None]
        s_n, ws = gauss_jacobi_unit(nodes, pB, 0.0)
        t = 1 - (1 - xr) * s_n[None, :]
        sg, lg = _jac_log_values(n2, A, B, t)
        piece = log_sum(sg, lg + pA * np.log(t) + _logw(ws)[None, :], axis=1)
        piece_l = np.asarray(piece.log_abs) + (pB + 1) * np.log1p(-x[right])
        res = log_add(LogValue(np.full(piece_l.shape, total.sign), np.full(piece_l.shape, total.log_abs)),
                      LogValue(-np.asarray(piece.sign), piece_l + LN2))
        out_s[right], out_l[right] = res.sign, res.log_abs
    return out_s, out_l


def exact_density_jacobi_beta1(ens: JacobiEnsemble, x, form: str = "exact",
                               nodes: int = SGN_NODES) -> LogValue:
    """beta = 1 density for weight ``x^((a1-1)/2) (1-x)^((a2-1)/2)``, N even.

    ``rho_1 = rho_2[N-1, x^a1 (1-x)^a2] + kappa w1(x) p_(N-1)(x) int sgn(x-t) w1(t) p_(N-2)(t) dt``
    with p orthonormal for ``x^a1 (1-x)^a2``, ``w1 = x^((a1-1)/2) (1-x)^((a2-1)/2)`` and
    ``kappa = b_(N-1) (2N - 2 + a1 + a2) / 4`` (b: recurrence off-diagonal).
    ``form="nterm"`` puts N eigenvalues in the beta = 2 term (table convention).
    """
    _check_even(ens, "exact_density_jacobi_beta1")
    if form not in ("exact", "nterm"):
        raise ValueError(f"unknown form {form!r}")
    x = _unit_interval_arg(x, "exact_density_jacobi_beta1")
    n, A, B = ens.n, ens.a1, ens.a2
    shape = x.shape
    x = np.atleast_1d(x)
    m2 = n - 1 if form == "exact" else n
    s2, l2 = _jacobi_beta2_log(m2, A, B, x)
    _, b = jacobi_recurrence(n, A, B)
    log_kappa = math.log(b[n - 2]) + math.log((2 * n - 2 + A + B) / 4)
    s_p, l_p = _jac_log_values(n - 1, A, B, x)
    s_i, l_i = _jac_sgn_integral(n - 2, A, B, x, split=0.5 * sum(ens.edges), nodes=nodes)
    corr_log = log_kappa + (A - 1) / 2 * np.log(x) + (B - 1) / 2 * np.log1p(-x) + l_p + l_i
    tot = log_add(LogValue(s2, l2), LogValue(s_p * s_i, corr_log))
    return _as_out(np.reshape(tot.sign, shape), np.reshape(tot.log_abs, shape))


def exact_density(ens: Ensemble, y, form: str = "exact") -> LogValue:
    """Dispatch on flavor and beta (1 or 2)."""
    if ens.beta == 2:
        if isinstance(ens, LaguerreEnsemble):
            return exact_density_laguerre_beta2(ens, y)
        return exact_density_jacobi_beta2(ens, y)
    if ens.beta == 1:
        if isinstance(ens, LaguerreEnsemble):
            return exact_density_laguerre_beta1(ens, y, form=form)
        return exact_density_jacobi_beta1(ens, y, form=form)
    raise ValueError(f"exact densities are available for beta in {{1, 2}}, got {ens.beta}")


# --- brute force ---------------------------------------------------------------

def _log_weight(flavor: Flavor, beta: float, exps: Sequence[float], lam):
    lam = np.asarray(lam, dtype=float)
    if flavor == Flavor.LAGUERRE:
        return exps[0] * np.log(lam) - beta * lam / 2
    return exps[0] * np.log(lam) + exps[1] * np.log1p(-lam)


def _log_partition(flavor: Flavor, beta: float, n: int, exps: Sequence[float]) -> float:
    if flavor == Flavor.LAGUERRE:
        return laguerre_log_partition(n, exps[0], beta / 2, beta)
    return jacobi_log_partition(n, exps[0], exps[1], beta)


def _pair_log(lams: np.ndarray, beta: float) -> np.ndarray:
    """``beta sum_(i<j) log|l_i - l_j|`` along the last axis."""
    m = lams.shape[-1]
    out = np.zeros(lams.shape[:-1])
    for i, j in itertools.combinations(range(m), 2):
        with np.errstate(divide="ignore"):
            out = out + beta * np.log(np.abs(lams[..., i] - lams[..., j]))
    return out


def _tensor_nodes(flavor: Flavor, beta: float, exps: Sequence[float], q: int):
    """Gauss rule matched to the one-body weight (log weights)."""
    if flavor == Flavor.LAGUERRE:
        mu, w = roots_genlaguerre(q, exps[0])
        return 2 * mu / beta, _logw(w) + (exps[0] + 1) * math.log(2 / beta)
    t, w = gauss_jacobi_unit(q, exps[0], exps[1])
    return t, _logw(w)


def _product_index(q: int, m: int) -> np.ndarray:
    return np.indices((q,) * m).reshape(m, -1).T


def _grid(nodes: np.ndarray, logw: np.ndarray, m: int):
    idx = _product_index(len(nodes), m)
    return nodes[idx], logw[idx].sum(axis=1)


def _brute_tensor(flavor, beta, n, exps, x, q):
    m = n - 1
    nodes, logw = _tensor_nodes(flavor, beta, exps, q)
    if m == 0:
        return 0.0
    lams, lw = _grid(nodes, logw, m)
    with np.errstate(divide="ignore"):
        logs = lw + beta * np.log(np.abs(x - lams)).sum(axis=1) + _pair_log(lams, beta)
    return log_sum(np.ones_like(logs), logs).log_abs


def _nested_block(top: float, k: int, q: int, c: float, beta: float):
    """Ordered points ``0 < l_1 < ... < l_k < top`` as nested products ``l_j = top s_j ... s_k``.

    Returns points (rows) and log of (rule weight * Jacobian / divided-out factors).
    ``s_j`` is integrated with weight ``s^(j(c+1)-1) (1-s)^beta``, which absorbs the
    one-body power, the Jacobian and the adjacent gap.
    """
    if k == 0:
        return np.zeros((1, 0)), np.zeros(1)
    rules = [gauss_jacobi_unit(q, j * (c + 1) - 1, beta) for j in range(1, k + 1)]
    idx = _product_index(q, k)
    s = np.stack([rules[j][0][idx[:, j]] for j in range(k)], axis=1)
    lw = np.sum([_logw(rules[j][1][idx[:, j]]) for j in range(k)], axis=0)
    lam = top * np.cumprod(s[:, ::-1], axis=1)[:, ::-1]
    # powers carried by the rule: s_j^(j c + j - 1) (1 - s_j)^beta; the actual
    # integrand has prod l^c * Jacobian prod l_(j+1) * prod (l_(j+1) - l_j)^beta
    upper = np.concatenate([lam[:, 1:], np.full((lam.shape[0], 1), top)], axis=1)
    lw = lw + k * (c + 1) * math.log(top) + beta * np.log(upper).sum(axis=1)
    return lam, lw


def _laguerre_upper_block(x: float, k: int, q: int, beta: float):
    """Ordered ``x < l_1 < ... < l_k`` by increments with Gauss-Laguerre rules.

    Absorbs ``e^(-beta l / 2)`` and the adjacent gaps ``(l_(i+1) - l_i)^beta``.
    """
    if k == 0:
        return np.zeros((1, 0)), np.zeros(1)
    r, w = roots_genlaguerre(q, beta)
    idx = _product_index(q, k)
    rates = beta / 2 * np.arange(k, 0, -1)      # r_j appears in l_j..l_k
    inc = r[idx] / rates[None, :]
    lw = _logw(w[idx]).sum(axis=1) - ((beta + 1) * np.log(rates)).sum() - beta * k * x / 2
    lam = x + np.cumsum(inc, axis=1)
    return lam, lw


def _chain_log(chain: np.ndarray, beta: float) -> np.ndarray:
    """``beta * log prod (c_j - c_i)`` over sorted rows, pairs at distance >= 2."""
    r, w = chain.shape
    prod = np.ones(r)
    for i in range(w):
        for j in range(i + 2, w):
            prod *= chain[:, j] - chain[:, i]
    with np.errstate(divide="ignore"):
        return beta * np.log(prod)


def _ordered_term(lo, lo_w, hi, hi_w, beta):
    """log of ``sum_(a,b) e^(lo_w[a] + hi_w[b]) prod_(i,j) (hi[b,j] - lo[a,i])^beta``."""
    lo_s, hi_s = lo_w.max(), hi_w.max()
    if not (np.isfinite(lo_s) and np.isfinite(hi_s)):
        return -math.inf
    wl, wh = np.exp(lo_w - lo_s), np.exp(hi_w - hi_s)
    if lo.shape[1] == 0 or hi.shape[1] == 0:
        return lo_s + hi_s + math.log(wl.sum() * wh.sum())
    total = 0.0
    step = max(1, (1 << 22) // len(hi))
    for a in range(0, len(lo), step):
        cross = np.ones((min(step, len(lo) - a), len(hi)))
        for i in range(lo.shape[1]):
            li = lo[a:a + step, i][:, None]
            for j in range(hi.shape[1]):
                cross *= hi[None, :, j] - li
        if beta != 1:
            cross **= beta
        total += wl[a:a + step] @ cross @ wh
    return lo_s + hi_s + math.log(total)


def _brute_ordered(flavor, beta, n, exps, x, q):
    """Sum over the number k of eigenvalues below x of ordered-region integrals.

    Rules absorb the gaps between neighbours in the sorted chain
    ``l_1 < ... < l_k < x < l_(k+1) < ... < l_m``; the remaining within-block
    factors are folded into per-block weights, so only the cross factors
    between the blocks are evaluated on the product grid.
    """
    m = n - 1
    if m == 0:
        return 0.0
    terms = []
    for k in range(m + 1):
        lo, lo_w = _nested_block(x, k, q, exps[0], beta)
        if flavor == Flavor.LAGUERRE:
            hi, hi_w = _laguerre_upper_block(x, m - k, q, beta)
            lo_w = lo_w - beta * lo.sum(axis=1) / 2
            hi_w = hi_w + exps[0] * np.log(hi).sum(axis=1)
        else:
            mu, mu_w = _nested_block(1 - x, m - k, q, exps[1], beta)
            hi, hi_w = (1 - mu)[:, ::-1], mu_w
            lo_w = lo_w + exps[1] * np.log1p(-lo).sum(axis=1)
            hi_w = hi_w + exps[0] * np.log(hi).sum(axis=1)
        lo_w = lo_w + _chain_log(np.concatenate([lo, np.full((len(lo), 1), x)], axis=1), beta)
        hi_w = hi_w + _chain_log(np.concatenate([np.full((len(hi), 1), x), hi], axis=1), beta)
        terms.append(_ordered_term(lo, lo_w, hi, hi_w, beta))
    return log_sum(np.ones(len(terms)), np.array(terms)).log_abs + gammaln(m + 1)


@dataclass(frozen=True)
class BruteForceResult:
    value: float
    error: float
    nodes: Tuple[int, int]
    method: str
    converged: bool = True

    def __float__(self) -> float:
        return self.value


def _brute_log(flavor, beta, n, exps, x, q, method):
    if method == "tensor":
        log_int = _brute_tensor(flavor, beta, n, exps, x, q)
    else:
        log_int = _brute_ordered(flavor, beta, n, exps, x, q)
    return (math.log(n) + float(_log_weight(flavor, beta, exps, x)) + log_int
            - _log_partition(flavor, beta, n, exps))


# starting node counts and budgets of the ordered rule, by n
ORDERED_START = {1: 8, 2: 40, 3: 28, 4: 20, 5: 16, 6: 14}
ORDERED_MAX = {1: 8, 2: 200, 3: 120, 4: 48, 5: 30, 6: 24}


def brute_force_density(flavor, beta: float, n: int, exponents: Sequence[float], x: float,
                        nodes: int = 0, method: str = "auto", rtol: float = 1e-8
                        ) -> BruteForceResult:
    """One-point density by direct (N-1)-fold quadrature of the joint PDF.

    Weight ``x^c e^(-beta x/2)`` (Laguerre, ``exponents = (c,)``) or
    ``x^c1 (1-x)^c2`` (Jacobi).  For even integer beta a tensor Gauss rule
    matched to the weight is exact; otherwise the ordered region is split at
    x and integrated with nested rules, raising the node count by 2 until the
    estimated remaining error falls below ``rtol`` relative (or the budget is
    spent, reported as ``converged=False``).  The estimate extrapolates the
    last two changes geometrically.  A fixed ``nodes`` disables the loop.
    """
    flavor = Flavor(flavor)
    if n > BRUTE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTE_MAX_N}, got {n}")
    if n < 1:
        raise ValueError("n must be positive")
    lo, hi = (0.0, math.inf) if flavor == Flavor.LAGUERRE else (0.0, 1.0)
    if not lo < x < hi:
        raise ValueError(f"x = {x} outside the domain")
    if method == "auto":
        method = "tensor" if float(beta).is_integer() and int(beta) % 2 == 0 else "ordered"
    if method not in ("tensor", "ordered"):
        raise ValueError(f"unknown method {method!r}")
    if method == "tensor":
        q = nodes or int(beta * (n - 1) / 2) + 2
        coarse = max(q - 1, 1)
        v = math.exp(_brute_log(flavor, beta, n, exponents, x, q, method))
        r = math.exp(_brute_log(flavor, beta, n, exponents, x, coarse, method))
        return BruteForceResult(v, abs(v - r), (coarse, q), method)
    q = nodes or ORDERED_START.get(n, 14)
    q_max = q if nodes else ORDERED_MAX.get(n, 24)
    val = lambda k: math.exp(_brute_log(flavor, beta, n, exponents, x, k, method))
    hist = [val(q - 4), val(q - 2)]
    while True:
        v = val(q)
        err = _tail_estimate(hist[-2], hist[-1], v)
        if err <= rtol * v or q + 2 > q_max:
            return BruteForceResult(v, err, (q - 2, q), method, bool(err <= rtol * v))
        hist.append(v)
        q += 2


def _tail_estimate(v0: float, v1: float, v2: float) -> float:
    """Remaining error after three successive values, assuming geometric decay of the changes.

    A change ratio near one (algebraic convergence) inflates the estimate.
    """
    d1, d2 = abs(v2 - v1), abs(v1 - v0)
    if d1 == 0:
        return 0.0
    r = min(d1 / d2, 0.999) if d2 > 0 else 0.999
    return max(d1, d1 * r / (1 - r))


def brute_force_for(ens: Ensemble, y: float, nodes: int = 0, method: str = "auto",
                    rtol: float = 1e-8) -> BruteForceResult:
    """Brute force with the ensemble's own one-body exponents."""
    exps = (ens.weight_exponent,) if isinstance(ens, LaguerreEnsemble) else ens.weight_exponents
    return brute_force_density(ens.flavor, ens.beta, ens.n, exps, y, nodes, method, rtol)
