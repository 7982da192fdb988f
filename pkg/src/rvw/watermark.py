"""Reference visible embedding (alpha fusion) and lossy-coding error compensation.

The restoration pipeline treats the visible scheme as a black box; alpha
fusion is provided so the toolkit can produce watermarked inputs on its own.
Compensation adds the coding error back onto the watermarked ROI, clamping
to 8 bits and recording every clamped residual so restoration stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .image import DifferencePlane, GrayPlane, Roi

__all__ = ["AlphaParams", "alpha_embed", "compensate"]


@dataclass(frozen=True)
class AlphaParams:
    """Opacity and placement for alpha fusion."""

    alpha: float
    roi: Roi

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie strictly between 0 and 1, got {self.alpha}")


def alpha_embed(host: GrayPlane, watermark: GrayPlane, params: AlphaParams) -> GrayPlane:
    """Blend the watermark over the ROI: round((1-a)*host + a*mark), clamped."""
    roi = params.roi
    roi.check_inside(host.width, host.height)
    if watermark.width != roi.width or watermark.height != roi.height:
        raise DimensionMismatch("watermark extent must match the roi")
    out = host.pixels.astype(np.float64).copy()
    ys, xs = roi.slices()
    fused = (1.0 - params.alpha) * out[ys, xs] + params.alpha * watermark.pixels
    out[ys, xs] = np.clip(np.floor(fused + 0.5), 0, 255)
    return GrayPlane(out.astype(np.uint8))


def compensate(watermarked: GrayPlane, error: DifferencePlane, roi: Roi):
    """Add the coding error inside the ROI, clamping out-of-range sums.

    Returns the compensated plane plus the overflow list of (x, y, residual)
    triples in raster order, where residual is the clamped-away amount; adding
    it back during restoration reverses the clamp exactly.
    """
    roi.check_inside(watermarked.width, watermarked.height)
    if error.width != roi.width or error.height != roi.height:
        raise DimensionMismatch("error plane extent must match the roi")
    out = watermarked.pixels.astype(np.int32).copy()
    ys, xs = roi.slices()
    raw = out[ys, xs] + error.data
    clamped = np.clip(raw, 0, 255)
    residual = raw - clamped
    overflow = [
        (int(x), int(y), int(residual[y, x]))
        for y, x in np.argwhere(residual != 0)
    ]
    out[ys, xs] = clamped
    return GrayPlane(out.astype(np.uint8)), overflow
