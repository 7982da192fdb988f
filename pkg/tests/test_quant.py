import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvw.codec.quant import dequantize, lambda_from_qp, qstep, quantize
from rvw.errors import QpOutOfRange


def test_lambda_qp6_exact():
    assert lambda_from_qp(6) == 0.85


def test_lambda_qp28_value():
    assert lambda_from_qp(28) == pytest.approx(137.078, abs=0.01)
    assert lambda_from_qp(28) == 0.85 * 2.0 ** ((28 - 6) / 3.0)


def test_lambda_qp9_one_doubling():
    assert lambda_from_qp(9) == pytest.approx(1.70, abs=1e-12)


def test_lambda_out_of_range():
    for qp in (-1, 52):
        with pytest.raises(QpOutOfRange):
            lambda_from_qp(qp)


def test_qstep_unit_at_qp4():
    assert qstep(4) == 1.0
    assert qstep(28) == pytest.approx(16.0, rel=1e-12)
    assert qstep(10) == pytest.approx(2.0, rel=1e-12)


def test_quantize_zero_and_unit_step():
    assert quantize(np.array([0.0]), 28).tolist() == [0]
    assert quantize(np.array([2.4]), 4).tolist() == [2]
    assert dequantize(np.array([2]), 4).tolist() == [2.0]


def test_quantize_round_half_away():
    assert quantize(np.array([0.5, -0.5, 1.5, -1.5]), 4).tolist() == [1, -1, 2, -2]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 51), st.integers(0, 10**6))
def test_reconstruction_error_bound(qp, seed):
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-2000, 2000, 64)
    levels = quantize(coeffs, qp)
    back = dequantize(levels, qp)
    assert np.abs(coeffs - back).max() <= qstep(qp) / 2 + 1e-9
