"""Shared generators for synthetic hosts, watermarks, and difference planes.

Hosts imitate natural images for histogram-shift embedding: big near-flat
plateaus (peaked histograms) with mild sensor-style noise. Watermarks are
piecewise smooth: a few flat regions, a stripe, and one smooth bump.
"""

import numpy as np
import pytest

from rvw.image import ColorImage, DifferencePlane, GrayPlane, Roi


def make_host(height, width, seed, levels=6, noise=0.6, lo=40, hi=215):
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    f1, f2, f3 = rng.uniform(30, 90, 3)
    p1, p2 = rng.uniform(0, 2 * np.pi, 2)
    base = np.sin(xx / f1 + p1) * np.cos(yy / f2 + p2) + 0.5 * np.cos((xx + yy) / f3)
    base = (base - base.min()) / (base.max() - base.min())
    img = lo + np.floor(base * levels) / levels * (hi - lo)
    if noise > 0:
        img = img + rng.normal(0, noise, (height, width))
    return GrayPlane(np.clip(np.floor(img + 0.5), 0, 255).astype(np.uint8))


def make_color_host(height, width, seed, **kw):
    return ColorImage(tuple(make_host(height, width, seed + i, **kw) for i in range(3)))


def make_watermark(height, width, seed):
    rng = np.random.default_rng(seed)
    arr = np.full((height, width), 60.0)
    arr[height // 6 : 5 * height // 6, width // 6 : 5 * width // 6] = 190.0
    arr[height // 3 : height // 2, :] = 120.0
    yy, xx = np.mgrid[0:height, 0:width]
    cx, cy = rng.uniform(0.3, 0.7, 2)
    arr += 30.0 * np.exp(
        -((xx - width * cx) ** 2 + (yy - height * cy) ** 2) / (2 * (width / 5.0) ** 2)
    )
    return GrayPlane(np.clip(arr, 0, 255).astype(np.uint8))


def make_color_watermark(height, width, seed):
    return ColorImage(tuple(make_watermark(height, width, seed + i) for i in range(3)))


def make_piecewise_diff(height, width, seed, noise=3.0, amp=55):
    """Difference plane with the structure alpha fusion produces: flat regions,
    sharp region borders, mild host noise bleeding through."""
    rng = np.random.default_rng(seed)
    arr = np.zeros((height, width))
    arr[height // 5 : 4 * height // 5, width // 4 : 3 * width // 4] = amp
    arr[height // 2 :, : width // 3] = -amp // 2
    if noise > 0:
        arr += rng.normal(0, noise, (height, width))
    return DifferencePlane(np.clip(np.rint(arr), -255, 255).astype(np.int16))


def centered_roi(plane, rw, rh) -> Roi:
    # offset from dead centre so the roi never touches the raster-leading reserve
    x0 = max((plane.width - rw) // 2, 8)
    y0 = max((plane.height - rh) // 2, 8)
    return Roi(x0, y0, rw, rh)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240811)
