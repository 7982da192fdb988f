"""Scalar quantization of transform coefficients and the rate-distortion weight."""

from __future__ import annotations

import numpy as np

from ..errors import QpOutOfRange

__all__ = ["lambda_from_qp", "qstep", "quantize", "dequantize"]


def _check_qp(qp: int) -> None:
    if not 0 <= qp <= 51:
        raise QpOutOfRange(f"qp must lie in 0..51, got {qp}")


def lambda_from_qp(qp: int) -> float:
    """Rate-distortion trade-off weight, 0.85 * 2^((qp - 6) / 3)."""
    _check_qp(qp)
    return 0.85 * 2.0 ** ((qp - 6) / 3.0)


def qstep(qp: int) -> float:
    """Quantizer step size, 2^((qp - 4) / 6); qp 4 gives unit steps."""
    _check_qp(qp)
    return 2.0 ** ((qp - 4) / 6.0)


def quantize(coefficients: np.ndarray, qp: int) -> np.ndarray:
    """Round-half-away-from-zero levels; reconstruction error stays <= step/2."""
    step = qstep(qp)
    c = np.asarray(coefficients, dtype=np.float64)
    return (np.sign(c) * np.floor(np.abs(c) / step + 0.5)).astype(np.int64)


def dequantize(levels: np.ndarray, qp: int) -> np.ndarray:
    step = qstep(qp)
    return np.asarray(levels, dtype=np.float64) * step
