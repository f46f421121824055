"""Signed log-magnitude numbers for quantities that over- or underflow."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(log_abs)``.

    ``sign`` is -1, 0 or +1 and ``log_abs`` is ``-inf`` whenever ``sign`` is 0.
    Both fields may be numpy arrays of equal shape, in which case all
    operations act elementwise.
    """

    sign: ArrayLike
    log_abs: ArrayLike

    def __post_init__(self):
        sign = np.sign(self.sign)
        log_abs = np.asarray(self.log_abs, dtype=float)
        log_abs = np.where(sign == 0, -np.inf, log_abs)
        sign = np.where(np.isneginf(log_abs), 0, sign)
        if np.ndim(sign) == 0 and np.ndim(log_abs) == 0:
            object.__setattr__(self, "sign", int(sign))
            object.__setattr__(self, "log_abs", float(log_abs))
        else:
            sign, log_abs = np.broadcast_arrays(sign.astype(int), log_abs)
            object.__setattr__(self, "sign", sign.copy())
            object.__setattr__(self, "log_abs", log_abs.copy())

    @classmethod
    def from_float(cls, value: ArrayLike) -> "LogValue":
        value = np.asarray(value, dtype=float)
        with np.errstate(divide="ignore"):
            return cls(np.sign(value), np.log(np.abs(value)))

    @classmethod
    def from_log(cls, log_abs: ArrayLike, sign: ArrayLike = 1) -> "LogValue":
        return cls(sign, log_abs)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(0, -np.inf)

    def to_float(self) -> ArrayLike:
        """Materialize as an ordinary float (may under- or overflow)."""
        with np.errstate(over="ignore", under="ignore"):
            out = self.sign * np.exp(self.log_abs)
        return float(out) if np.ndim(out) == 0 else out

    def __float__(self) -> float:
        if np.ndim(self.log_abs) != 0:
            raise TypeError("only scalar LogValue converts to float")
        return float(self.to_float())

    def __neg__(self) -> "LogValue":
        return LogValue(-np.asarray(self.sign), self.log_abs)

    def __mul__(self, other) -> "LogValue":
        other = _coerce(other)
        return LogValue(np.asarray(self.sign) * other.sign,
                        np.asarray(self.log_abs) + other.log_abs)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "LogValue":
        other = _coerce(other)
        if np.any(np.asarray(other.sign) == 0):
            raise ZeroDivisionError("division by a zero LogValue")
        return LogValue(np.asarray(self.sign) * other.sign,
                        np.asarray(self.log_abs) - other.log_abs)

    def __add__(self, other) -> "LogValue":
        other = _coerce(other)
        return log_add(self, other)

    __radd__ = __add__

    def __sub__(self, other) -> "LogValue":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "LogValue":
        return _coerce(other) - self

    def __pow__(self, p: float) -> "LogValue":
        if np.any(np.asarray(self.sign) < 0):
            raise ValueError("power of a negative LogValue")
        return LogValue(self.sign, np.asarray(self.log_abs) * p)


def _coerce(value) -> LogValue:
    return value if isinstance(value, LogValue) else LogValue.from_float(value)


def log_add(x: LogValue, y: LogValue) -> LogValue:
    """Signed log-sum-exp of two values."""
    sx, lx = np.asarray(x.sign), np.asarray(x.log_abs, dtype=float)
    sy, ly = np.asarray(y.sign), np.asarray(y.log_abs, dtype=float)
    hi = np.maximum(lx, ly)
    finite = np.isfinite(hi)
    ref = np.where(finite, hi, 0.0)
    with np.errstate(under="ignore", invalid="ignore"):
        total = sx * np.exp(lx - ref) + sy * np.exp(ly - ref)
    with np.errstate(divide="ignore"):
        log_abs = np.where(finite, ref + np.log(np.abs(total)), -np.inf)
    return LogValue(np.where(finite, np.sign(total), 0), log_abs)


def log_sum(signs, logs, axis=None) -> LogValue:
    """Signed log-sum-exp over an axis of (sign, log|value|) arrays."""
    signs = np.asarray(signs, dtype=float)
    logs = np.asarray(logs, dtype=float)
    logs = np.where(signs == 0, -np.inf, logs)
    hi = np.max(logs, axis=axis, keepdims=True)
    ref = np.where(np.isfinite(hi), hi, 0.0)
    with np.errstate(under="ignore"):
        total = np.sum(signs * np.exp(logs - ref), axis=axis, keepdims=True)
    with np.errstate(divide="ignore"):
        log_abs = ref + np.log(np.abs(total))
    if axis is None:
        return LogValue(float(np.sign(total).ravel()[0]), float(log_abs.ravel()[0]))
    return LogValue(np.squeeze(np.sign(total), axis=axis),
                    np.squeeze(log_abs, axis=axis))
