"""Pixel rasters, ROI geometry, signed difference planes, and lossless file I/O.

All rasters are row-major with the origin at the top-left pixel. Gray planes
hold 8-bit samples; difference planes hold signed 16-bit samples in -255..255.
Every type is immutable after construction (backing arrays are write-locked)
and all operations are pure functions.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from PIL import Image as _PilImage

from .errors import (
    DimensionMismatch,
    MalformedHeader,
    RangeViolation,
    RoiOutOfBounds,
    UnsupportedFormat,
)

__all__ = [
    "GrayPlane",
    "ColorImage",
    "Roi",
    "DifferencePlane",
    "load_image",
    "save_image",
    "load_diff",
    "save_diff",
    "difference",
    "apply_difference",
]


def _locked(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class GrayPlane:
    """One 8-bit intensity raster, shape (height, width)."""

    pixels: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionMismatch(f"gray plane must be 2-D and non-empty, got shape {arr.shape}")
        if arr.dtype != np.uint8:
            if np.any(arr < 0) or np.any(arr > 255):
                raise RangeViolation("gray samples must lie in 0..255")
            arr = arr.astype(np.uint8)
        object.__setattr__(self, "pixels", _locked(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True, eq=False)
class ColorImage:
    """Exactly three gray planes (R, G, B) of identical dimensions."""

    channels: tuple[GrayPlane, GrayPlane, GrayPlane]

    def __post_init__(self):
        chans = tuple(self.channels)
        if len(chans) != 3:
            raise DimensionMismatch("color image needs exactly 3 channels")
        w, h = chans[0].width, chans[0].height
        for c in chans[1:]:
            if c.width != w or c.height != h:
                raise DimensionMismatch("channel dimensions differ")
        object.__setattr__(self, "channels", chans)

    @property
    def width(self) -> int:
        return self.channels[0].width

    @property
    def height(self) -> int:
        return self.channels[0].height


@dataclass(frozen=True)
class Roi:
    """Rectangle of interest: top-left corner plus extent, in pixels."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise RoiOutOfBounds(f"roi extent must be positive, got {self.width}x{self.height}")
        if self.x0 < 0 or self.y0 < 0:
            raise RoiOutOfBounds(f"roi origin must be non-negative, got ({self.x0},{self.y0})")

    def check_inside(self, plane_width: int, plane_height: int) -> None:
        if self.x0 + self.width > plane_width or self.y0 + self.height > plane_height:
            raise RoiOutOfBounds(
                f"roi {self} does not fit a {plane_width}x{plane_height} plane"
            )

    def slices(self) -> tuple[slice, slice]:
        return slice(self.y0, self.y0 + self.height), slice(self.x0, self.x0 + self.width)


@dataclass(frozen=True, eq=False)
class DifferencePlane:
    """Signed per-pixel difference over an ROI, each sample in -255..255."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim != 2 or arr.size == 0:
            raise DimensionMismatch(f"difference plane must be 2-D and non-empty, got {arr.shape}")
        if np.any(arr < -255) or np.any(arr > 255):
            raise RangeViolation("difference samples must lie in -255..255")
        object.__setattr__(self, "data", _locked(arr.astype(np.int16)))

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]


# --- file I/O -----------------------------------------------------------

def _read_pnm_token(buf: io.BufferedReader) -> bytes:
    # whitespace-delimited token, '#' starts a comment running to end of line
    tok = b""
    while True:
        c = buf.read(1)
        if c == b"":
            raise MalformedHeader("unexpected end of PNM header")
        if c == b"#":
            while c not in (b"\n", b""):
                c = buf.read(1)
            continue
        if c.isspace():
            if tok:
                return tok
            continue
        tok += c


def _load_pnm(buf: io.BufferedReader, magic: bytes):
    try:
        width = int(_read_pnm_token(buf))
        height = int(_read_pnm_token(buf))
        maxval = int(_read_pnm_token(buf))
    except ValueError as exc:
        raise MalformedHeader(f"bad PNM header field: {exc}") from exc
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad PNM dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 PNM supported, got {maxval}")
    nchan = 3 if magic == b"P6" else 1
    raw = buf.read(width * height * nchan)
    if len(raw) != width * height * nchan:
        raise MalformedHeader("PNM pixel data truncated")
    arr = np.frombuffer(raw, dtype=np.uint8)
    if nchan == 1:
        return GrayPlane(arr.reshape(height, width))
    arr = arr.reshape(height, width, 3)
    return ColorImage(tuple(GrayPlane(arr[:, :, i]) for i in range(3)))


def _load_png(path):
    with _PilImage.open(path) as im:
        if im.format != "PNG":
            raise UnsupportedFormat(f"not a PNG file: {path}")
        if im.mode == "L":
            return GrayPlane(np.asarray(im, dtype=np.uint8))
        if im.mode == "RGB":
            arr = np.asarray(im, dtype=np.uint8)
            return ColorImage(tuple(GrayPlane(arr[:, :, i]) for i in range(3)))
        raise UnsupportedFormat(
            f"PNG mode {im.mode!r} not supported (need 8-bit gray or RGB, no alpha/palette)"
        )


def load_image(path) -> GrayPlane | ColorImage:
    """Load a PGM (P5), PPM (P6) or 8-bit PNG raster, samples preserved exactly."""
    with open(path, "rb") as fh:
        magic = fh.read(2)
        if magic in (b"P5", b"P6"):
            return _load_pnm(fh, magic)
    if magic == b"\x89P":
        return _load_png(path)
    raise UnsupportedFormat(f"unrecognized image format in {path}")


def save_image(image: GrayPlane | ColorImage, path) -> None:
    """Write a raster losslessly; format chosen by extension (.pgm/.ppm/.png)."""
    name = str(path).lower()
    if name.endswith(".png"):
        if isinstance(image, GrayPlane):
            _PilImage.fromarray(image.pixels, mode="L").save(path, format="PNG")
        else:
            stacked = np.stack([c.pixels for c in image.channels], axis=-1)
            _PilImage.fromarray(stacked, mode="RGB").save(path, format="PNG")
        return
    if name.endswith(".pgm"):
        if not isinstance(image, GrayPlane):
            raise UnsupportedFormat("PGM holds a single gray plane; use .ppm or .png for color")
        header = f"P5\n{image.width} {image.height}\n255\n".encode()
        body = image.pixels.tobytes()
    elif name.endswith(".ppm"):
        if not isinstance(image, ColorImage):
            raise UnsupportedFormat("PPM holds RGB; use .pgm or .png for gray")
        header = f"P6\n{image.width} {image.height}\n255\n".encode()
        body = np.stack([c.pixels for c in image.channels], axis=-1).tobytes()
    else:
        raise UnsupportedFormat(f"unknown output extension for {path}")
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(body)


_DIFF_MAGIC = b"DIFF"


def load_diff(path) -> DifferencePlane:
    """Read the headered raw signed-16 difference format."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8 or data[:4] != _DIFF_MAGIC:
        raise MalformedHeader(f"not a DIFF file: {path}")
    width = int.from_bytes(data[4:6], "little")
    height = int.from_bytes(data[6:8], "little")
    need = width * height * 2
    if width == 0 or height == 0 or len(data) != 8 + need:
        raise MalformedHeader(f"DIFF payload size mismatch in {path}")
    samples = np.frombuffer(data[8:], dtype="<i2").reshape(height, width)
    return DifferencePlane(samples.astype(np.int16))


def save_diff(plane: DifferencePlane, path) -> None:
    with open(path, "wb") as fh:
        fh.write(_DIFF_MAGIC)
        fh.write(plane.width.to_bytes(2, "little"))
        fh.write(plane.height.to_bytes(2, "little"))
        fh.write(plane.data.astype("<i2").tobytes())


# --- difference arithmetic ------------------------------------------------

def difference(host: GrayPlane, watermarked: GrayPlane, roi: Roi) -> DifferencePlane:
    """Per-pixel host minus watermarked over the ROI, as signed integers."""
    if host.width != watermarked.width or host.height != watermarked.height:
        raise DimensionMismatch("host and watermarked dimensions differ")
    roi.check_inside(host.width, host.height)
    ys, xs = roi.slices()
    d = host.pixels[ys, xs].astype(np.int16) - watermarked.pixels[ys, xs].astype(np.int16)
    return DifferencePlane(d)


def apply_difference(
    watermarked: GrayPlane,
    diff: DifferencePlane,
    roi: Roi,
    overflow=(),
) -> GrayPlane:
    """Add a difference plane (plus recorded overflow residuals) back onto the ROI.

    Sums must land in 0..255; anything else signals corrupt inputs and raises
    rather than clamping.
    """
    roi.check_inside(watermarked.width, watermarked.height)
    if diff.width != roi.width or diff.height != roi.height:
        raise DimensionMismatch("difference plane does not match the roi extent")
    out = watermarked.pixels.astype(np.int32).copy()
    ys, xs = roi.slices()
    out[ys, xs] += diff.data
    for x, y, residual in overflow:
        if not (0 <= x < roi.width and 0 <= y < roi.height):
            raise RoiOutOfBounds(f"overflow entry ({x},{y}) outside the roi")
        out[roi.y0 + y, roi.x0 + x] += residual
    if out.min() < 0 or out.max() > 255:
        raise RangeViolation("restored samples left 0..255; inputs are inconsistent")
    return GrayPlane(out.astype(np.uint8))
