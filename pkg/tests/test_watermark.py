import numpy as np
import pytest

from rvw.errors import DimensionMismatch
from rvw.image import DifferencePlane, GrayPlane, Roi
from rvw.watermark import AlphaParams, alpha_embed, compensate

from conftest import make_host, make_watermark


def test_alpha_params_validation():
    roi = Roi(0, 0, 4, 4)
    for bad in (0.0, 1.0, -0.5, 1.5):
        with pytest.raises(ValueError):
            AlphaParams(alpha=bad, roi=roi)


def test_embed_watermark_equal_to_host_is_identity():
    host = make_host(32, 32, seed=1)
    roi = Roi(8, 8, 16, 16)
    ys, xs = roi.slices()
    mark = GrayPlane(host.pixels[ys, xs])
    for alpha in (0.25, 0.5, 0.75):
        out = alpha_embed(host, mark, AlphaParams(alpha, roi))
        assert np.array_equal(out.pixels, host.pixels)


def test_embed_midpoint_value():
    host = GrayPlane(np.full((4, 4), 100, dtype=np.uint8))
    mark = GrayPlane(np.full((2, 2), 200, dtype=np.uint8))
    out = alpha_embed(host, mark, AlphaParams(0.5, Roi(1, 1, 2, 2)))
    assert out.pixels[1, 1] == 150
    assert out.pixels[0, 0] == 100


def test_embed_leaves_outside_unchanged(rng):
    host = make_host(24, 24, seed=2)
    mark = make_watermark(8, 8, seed=3)
    roi = Roi(10, 4, 8, 8)
    out = alpha_embed(host, mark, AlphaParams(0.3, roi))
    mask = np.ones((24, 24), dtype=bool)
    ys, xs = roi.slices()
    mask[ys, xs] = False
    assert np.array_equal(out.pixels[mask], host.pixels[mask])


def test_embed_dimension_checks():
    host = make_host(16, 16, seed=4)
    mark = make_watermark(8, 8, seed=5)
    with pytest.raises(DimensionMismatch):
        alpha_embed(host, mark, AlphaParams(0.5, Roi(0, 0, 4, 4)))


def test_compensate_zero_error_identity():
    wm = make_host(16, 16, seed=6)
    err = DifferencePlane(np.zeros((8, 8), dtype=np.int16))
    out, overflow = compensate(wm, err, Roi(4, 4, 8, 8))
    assert np.array_equal(out.pixels, wm.pixels)
    assert overflow == []


def test_compensate_clamps_and_records():
    wm = GrayPlane(np.array([[250, 5]], dtype=np.uint8))
    err = DifferencePlane(np.array([[10, -10]], dtype=np.int16))
    out, overflow = compensate(wm, err, Roi(0, 0, 2, 1))
    assert out.pixels.tolist() == [[255, 0]]
    assert overflow == [(0, 0, 5), (1, 0, -5)]


def test_compensate_roundtrip_with_overflow(rng):
    wm = GrayPlane(rng.integers(0, 256, (12, 12), dtype=np.uint8))
    roi = Roi(2, 3, 8, 6)
    err = DifferencePlane(rng.integers(-80, 81, (6, 8)).astype(np.int16))
    out, overflow = compensate(wm, err, roi)
    # invert: subtract error, re-apply residuals
    back = out.pixels.astype(np.int32).copy()
    ys, xs = roi.slices()
    back[ys, xs] -= err.data
    for x, y, r in overflow:
        back[roi.y0 + y, roi.x0 + x] += r
    assert np.array_equal(back.astype(np.uint8), wm.pixels)


def test_compensate_identity_chain(rng):
    """compensated + residual == watermarked + error, pointwise."""
    wm = GrayPlane(rng.integers(0, 256, (10, 10), dtype=np.uint8))
    roi = Roi(1, 1, 8, 8)
    err = DifferencePlane(rng.integers(-120, 121, (8, 8)).astype(np.int16))
    out, overflow = compensate(wm, err, roi)
    lhs = out.pixels.astype(np.int64).copy()
    for x, y, r in overflow:
        lhs[roi.y0 + y, roi.x0 + x] += r
    rhs = wm.pixels.astype(np.int64).copy()
    ys, xs = roi.slices()
    rhs[ys, xs] += err.data
    assert np.array_equal(lhs, rhs)


def test_compensate_never_touches_outside(rng):
    wm = GrayPlane(rng.integers(0, 256, (12, 12), dtype=np.uint8))
    roi = Roi(4, 4, 4, 4)
    err = DifferencePlane(rng.integers(-255, 256, (4, 4)).astype(np.int16))
    out, _ = compensate(wm, err, roi)
    mask = np.ones((12, 12), dtype=bool)
    ys, xs = roi.slices()
    mask[ys, xs] = False
    assert np.array_equal(out.pixels[mask], wm.pixels[mask])


def test_no_overflow_when_margins_suffice():
    wm = GrayPlane(np.full((8, 8), 128, dtype=np.uint8))
    err = DifferencePlane(np.full((8, 8), 100, dtype=np.int16))
    _, overflow = compensate(wm, err, Roi(0, 0, 8, 8))
    assert overflow == []
