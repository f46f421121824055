import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from betadensity.logvalue import LogValue, log_add, log_sum

reals = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False).filter(lambda v: abs(v) > 1e-300)


@given(reals, reals)
def test_arithmetic_round_trip(a, b):
    A, B = LogValue.from_float(a), LogValue.from_float(b)
    assert (A * B).to_float() == pytest.approx(a * b, rel=1e-12)
    assert (A / B).to_float() == pytest.approx(a / b, rel=1e-12)
    assert (A + B).to_float() == pytest.approx(a + b, rel=1e-9, abs=1e-9 * max(abs(a), abs(b)))
    assert (A - B).to_float() == pytest.approx(a - b, rel=1e-9, abs=1e-9 * max(abs(a), abs(b)))


def test_zero_and_extremes():
    z = LogValue.zero()
    assert z.sign == 0 and z.log_abs == -math.inf and float(z) == 0.0
    big = LogValue(1, 1e4)
    tiny = LogValue(1, -1e4)
    assert (big * tiny).to_float() == pytest.approx(1.0)
    assert float(LogValue.from_float(-3.0)) == pytest.approx(-3.0, rel=1e-15)
    assert float(big + big) == math.inf or (big + big).log_abs == pytest.approx(1e4 + math.log(2))
    assert (LogValue(1, 2.0) ** 2).log_abs == 4.0


def test_cancellation_gives_zero():
    x = LogValue.from_float(2.5)
    assert (x - x).sign == 0


def test_log_sum_signs():
    s = log_sum([1, -1, 1], np.log([3.0, 1.0, 0.5]))
    assert float(s) == pytest.approx(2.5)
    arr = log_sum(np.array([[1, 1], [1, -1]]), np.log(np.array([[1.0, 2.0], [3.0, 1.0]])), axis=1)
    assert arr.to_float() == pytest.approx([3.0, 2.0])
    v = log_add(LogValue(np.array([1, -1]), np.array([0.0, 0.0])), LogValue(np.array([1, 1]), np.array([0.0, 1.0])))
    assert v.to_float() == pytest.approx([2.0, math.e - 1])
