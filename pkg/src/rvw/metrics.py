"""Quality and rate metrics plus the rate-distortion sweep harness.

PSNR uses the standard 10*log10(peak^2 / MSE) with peak 255 and reports
infinity for identical inputs. Region PSNRs split the image into the
watermarked rectangle and its complement; for color images the three
per-channel PSNRs are averaged. The sweep harness re-encodes a corpus of
difference planes over (mu, qp) grids and emits averaged CSV rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .codec import CodecParams, encode as codec_encode
from .errors import DimensionMismatch
from .image import ColorImage, DifferencePlane, GrayPlane, Roi, difference
from .util import parallel_map

__all__ = [
    "psnr",
    "psnr_regions",
    "raw_bits",
    "compression_ratio",
    "RdPoint",
    "rd_sweep",
    "format_csv",
]


def _as_array(plane) -> np.ndarray:
    if isinstance(plane, GrayPlane):
        return plane.pixels
    if isinstance(plane, DifferencePlane):
        return plane.data
    return np.asarray(plane)


def psnr(a, b, peak: int = 255) -> float:
    """Peak signal-to-noise ratio in dB; +inf when the planes are identical."""
    x = _as_array(a).astype(np.int64)
    y = _as_array(b).astype(np.int64)
    if x.shape != y.shape:
        raise DimensionMismatch(f"plane shapes differ: {x.shape} vs {y.shape}")
    err = x - y
    sse = float((err * err).sum())
    if sse == 0.0:
        return math.inf
    return 10.0 * math.log10(peak * peak * x.size / sse)


def _region_psnrs_gray(before: GrayPlane, after: GrayPlane, roi: Roi):
    roi.check_inside(before.width, before.height)
    ys, xs = roi.slices()
    mask = np.zeros(before.pixels.shape, dtype=bool)
    mask[ys, xs] = True
    b = before.pixels.astype(np.int64)
    a = after.pixels.astype(np.int64)
    whole = psnr(b, a)
    non = psnr(b[~mask], a[~mask]) if (~mask).any() else math.inf
    wm = psnr(b[mask], a[mask])
    return whole, non, wm


def psnr_regions(before, after, roi: Roi):
    """(whole image, non-ROI, ROI) PSNRs; per-channel averages for color."""
    if isinstance(before, GrayPlane) != isinstance(after, GrayPlane):
        raise DimensionMismatch("before/after must both be gray or both color")
    if isinstance(before, GrayPlane):
        return _region_psnrs_gray(before, after, roi)
    triples = [
        _region_psnrs_gray(bc, ac, roi) for bc, ac in zip(before.channels, after.channels)
    ]
    return tuple(sum(t[i] for t in triples) / 3.0 for i in range(3))


def raw_bits(width: int, height: int) -> int:
    """Uncompressed size of an 8-bit plane, in bits."""
    if width <= 0 or height <= 0:
        raise DimensionMismatch("dimensions must be positive")
    return width * height * 8


def compression_ratio(n_c: int, n_d: int) -> float:
    if n_d == 0:
        raise ZeroDivisionError("n_d must be positive")
    return n_c / n_d


@dataclass(frozen=True)
class RdPoint:
    mu: float
    qp: int
    rate_bits: float
    psnr_db: float


def _corpus_planes(corpus) -> list[tuple[DifferencePlane, Roi]]:
    planes = []
    for host, watermarked, roi in corpus:
        if isinstance(host, GrayPlane):
            planes.append((difference(host, watermarked, roi), roi))
        else:
            for hc, wc in zip(host.channels, watermarked.channels):
                planes.append((difference(hc, wc, roi), roi))
    return planes


def rd_sweep(corpus, mu_values, qp_values, base_params: CodecParams | None = None) -> list[RdPoint]:
    """Average rate and PSNR(D', D) per (mu, qp) over every corpus difference plane.

    Each plane is encoded with the smoothing weight pinned to the swept value
    (a one-entry grid), so the point isolates that weight's behaviour.
    """
    if not corpus:
        raise ValueError("corpus must not be empty")
    base = base_params or CodecParams()
    planes = _corpus_planes(corpus)
    points = []
    for mu in mu_values:
        for qp in qp_values:
            params = CodecParams(
                qp=qp,
                mu_grid=(mu,),
                max_alternations=base.max_alternations,
                convergence_rel=base.convergence_rel,
                contour_threshold=base.contour_threshold,
            )
            results = parallel_map(
                lambda pr, p=params: codec_encode(pr[0], pr[1], p), planes
            )
            bits = [r.packet.bit_length for r in results]
            psnrs = [psnr(r.reconstructed, d) for r, (d, _) in zip(results, planes)]
            points.append(
                RdPoint(
                    mu=float(mu),
                    qp=int(qp),
                    rate_bits=sum(bits) / len(bits),
                    psnr_db=sum(psnrs) / len(psnrs),
                )
            )
    return points


def _fmt(value: float) -> str:
    if math.isinf(value):
        return "inf"
    return f"{value:.6g}"


def format_csv(points) -> str:
    """Deterministic CSV: header row, '.' decimals, 6 significant digits."""
    lines = ["mu,qp,avg_bits,avg_psnr"]
    for p in points:
        lines.append(f"{_fmt(p.mu)},{p.qp},{_fmt(p.rate_bits)},{_fmt(p.psnr_db)}")
    return "\n".join(lines) + "\n"
