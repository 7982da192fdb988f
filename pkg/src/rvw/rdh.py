"""Reversible data hiding by peak/zero histogram shifting over the non-ROI cover.

The first 144 pixels of the plane in raster order are the reserve: their
LSBs carry the side information a blind extractor needs before it can touch
the shifted histogram. Bits 0..79 follow the fixed header layout (peak 8,
zero 8, payload length 32, version 8, reserved 24) and bits 80..143 hold the
ROI rectangle (x0, y0, width, height as 16 bits each), which breaks the
chicken-and-egg between "find the cover pixels" and "know the ROI". Every
reserve LSB's original value travels as a payload prefix, so extraction
restores the cover bit-exactly. The ROI must therefore stay clear of the
first 144 raster positions; embedding validates that.

All fields are little-endian within the field: least significant bit first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    BadVersion,
    CapacityExceeded,
    MalformedHeader,
    NoCoverRegion,
    NoZeroBin,
)
from .image import GrayPlane, Roi

__all__ = [
    "RDH_VERSION",
    "RESERVE_PIXELS",
    "RdhRecord",
    "rdh_capacity",
    "rdh_embed",
    "rdh_extract",
]

RDH_VERSION = 1

_HEADER_BITS = 80
_BEACON_BITS = 64
RESERVE_PIXELS = _HEADER_BITS + _BEACON_BITS  # 144 raster-leading pixels


@dataclass(frozen=True)
class RdhRecord:
    """Side information of one embedding: the shifted pair and payload size."""

    peak: int
    zero: int
    payload_bits: int


def _cover_mask(shape, roi: Roi) -> np.ndarray:
    mask = np.ones(shape, dtype=bool)
    ys, xs = roi.slices()
    mask[ys, xs] = False
    return mask


def _reserve_clear(shape, roi: Roi) -> bool:
    h, w = shape
    flat = np.zeros(h * w, dtype=bool)
    flat[:RESERVE_PIXELS] = True
    inside = ~_cover_mask(shape, roi).ravel()
    return not bool((flat & inside).any())


def _pack_bits(value: int, nbits: int) -> list[int]:
    return [(value >> i) & 1 for i in range(nbits)]


def _unpack_bits(bits) -> int:
    value = 0
    for i, b in enumerate(bits):
        value |= int(b) << i
    return value


def _histogram(values: np.ndarray) -> np.ndarray:
    return np.bincount(values, minlength=256)


def _pick_peak_zero(hist: np.ndarray):
    peak = int(hist.argmax())  # argmax takes the smallest intensity on ties
    zeros = np.nonzero(hist == 0)[0]
    if zeros.size == 0:
        raise NoZeroBin("cover histogram has no empty bin")
    # nearest empty bin minimizes how many pixels the shift moves
    zero = int(zeros[np.abs(zeros - peak).argmin()])
    return peak, zero


def rdh_capacity(plane: GrayPlane, roi: Roi) -> int:
    """Largest embeddable payload, in bits.

    The peak-bin population of the non-ROI, non-reserve cover bounds the total
    embedded bits; the reserve originals that must travel as the payload
    prefix spend RESERVE_PIXELS of that budget, so the payload itself gets
    what remains. rdh_embed succeeds exactly when the payload fits this.
    """
    roi.check_inside(plane.width, plane.height)
    mask = _cover_mask(plane.pixels.shape, roi).ravel()
    mask[:RESERVE_PIXELS] = False
    cover = plane.pixels.ravel()[mask]
    if cover.size == 0:
        return 0
    hist = _histogram(cover)
    return max(int(hist.max()) - RESERVE_PIXELS, 0)


def rdh_embed(plane: GrayPlane, roi: Roi, payload) -> GrayPlane:
    """Hide a bit sequence in the non-ROI region; every pixel moves at most 1."""
    roi.check_inside(plane.width, plane.height)
    payload = np.asarray(payload, dtype=np.uint8).ravel()
    if payload.size and payload.max() > 1:
        raise ValueError("payload must be a sequence of bits")
    h, w = plane.pixels.shape
    if not _reserve_clear((h, w), roi):
        raise NoCoverRegion(
            f"roi overlaps the {RESERVE_PIXELS}-pixel reserve at the top of the raster"
        )
    flat = plane.pixels.astype(np.int16).ravel().copy()
    if flat.size < RESERVE_PIXELS:
        raise NoCoverRegion("plane smaller than the reserve")

    cover_mask = _cover_mask((h, w), roi).ravel()
    cover_mask[:RESERVE_PIXELS] = False
    cover_idx = np.nonzero(cover_mask)[0]
    if cover_idx.size == 0:
        raise NoCoverRegion("roi leaves no cover pixels")

    hist = _histogram(flat[cover_idx].astype(np.uint8))
    peak, zero = _pick_peak_zero(hist)
    if int(hist[peak]) < RESERVE_PIXELS:
        raise NoCoverRegion(
            f"cover peak bin holds {hist[peak]} pixels, below the {RESERVE_PIXELS}-bit reserve prefix"
        )
    reserve_lsbs = (flat[:RESERVE_PIXELS] & 1).astype(np.uint8)
    bits = np.concatenate([reserve_lsbs, payload]).astype(np.uint8)
    if bits.size > int(hist[peak]):
        raise CapacityExceeded(
            f"{payload.size} payload bits exceed the {hist[peak] - RESERVE_PIXELS}-bit capacity"
        )

    sign = 1 if zero > peak else -1
    cover = flat[cover_idx]
    lo, hi = min(peak, zero), max(peak, zero)
    between = (cover > lo) & (cover < hi)
    cover[between] += sign
    peak_pos = np.nonzero(cover == peak)[0][: bits.size]
    cover[peak_pos] += sign * bits[: peak_pos.size].astype(np.int16)
    flat[cover_idx] = cover

    header = (
        _pack_bits(peak, 8)
        + _pack_bits(zero, 8)
        + _pack_bits(int(payload.size), 32)
        + _pack_bits(RDH_VERSION, 8)
        + _pack_bits(0, 24)
        + _pack_bits(roi.x0, 16)
        + _pack_bits(roi.y0, 16)
        + _pack_bits(roi.width, 16)
        + _pack_bits(roi.height, 16)
    )
    flat[:RESERVE_PIXELS] = (flat[:RESERVE_PIXELS] & ~1) | np.asarray(header, dtype=np.int16)
    return GrayPlane(flat.reshape(h, w).astype(np.uint8))


def rdh_extract(plane: GrayPlane, roi: Roi | None = None):
    """Recover (payload bits, roi, restored plane) from an embedded plane.

    Fully blind: the reserve tells the extractor everything. Passing a roi
    only cross-checks it against the embedded one.
    """
    flat = plane.pixels.astype(np.int16).ravel().copy()
    if flat.size < RESERVE_PIXELS:
        raise MalformedHeader("plane smaller than the reserve")
    reserve = flat[:RESERVE_PIXELS] & 1
    peak = _unpack_bits(reserve[0:8])
    zero = _unpack_bits(reserve[8:16])
    payload_len = _unpack_bits(reserve[16:48])
    version = _unpack_bits(reserve[48:56])
    if version != RDH_VERSION:
        raise BadVersion(f"reserve version {version} unsupported")
    embedded_roi = Roi(
        _unpack_bits(reserve[80:96]),
        _unpack_bits(reserve[96:112]),
        _unpack_bits(reserve[112:128]),
        _unpack_bits(reserve[128:144]),
    )
    h, w = plane.pixels.shape
    embedded_roi.check_inside(w, h)
    if peak == zero:
        raise MalformedHeader("reserve peak equals zero bin")
    if roi is not None and roi != embedded_roi:
        raise MalformedHeader(f"expected roi {roi}, embedded roi is {embedded_roi}")

    cover_mask = _cover_mask((h, w), embedded_roi).ravel()
    cover_mask[:RESERVE_PIXELS] = False
    cover_idx = np.nonzero(cover_mask)[0]
    cover = flat[cover_idx]

    sign = 1 if zero > peak else -1
    total_bits = RESERVE_PIXELS + payload_len
    carriers = np.nonzero((cover == peak) | (cover == peak + sign))[0][:total_bits]
    if carriers.size != total_bits:
        raise MalformedHeader("embedded bit count exceeds the carriers present")
    bits = (cover[carriers] == peak + sign).astype(np.uint8)
    cover[carriers[bits == 1]] = peak

    lo, hi = min(peak, zero), max(peak, zero)
    if sign > 0:
        shifted = (cover > peak + 1) & (cover <= hi)
    else:
        shifted = (cover >= lo) & (cover < peak - 1)
    # re-shifting must skip the just-restored carriers (already at peak)
    cover[shifted] -= sign
    flat[cover_idx] = cover

    flat[:RESERVE_PIXELS] = (flat[:RESERVE_PIXELS] & ~1) | bits[:RESERVE_PIXELS].astype(np.int16)
    payload = bits[RESERVE_PIXELS:]
    restored = GrayPlane(flat.reshape(h, w).astype(np.uint8))
    return payload, embedded_roi, restored
