"""Contour detection and lossless chain coding.

Edges are flagged where the forward intensity difference jumps past a
threshold; the flag raster is then decomposed into 8-connected chains
(start point plus direction moves) that reproduce it exactly on decode.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CorruptStream
from .bitio import BitReader, BitWriter

__all__ = [
    "ContourMap",
    "detect_contours",
    "chains_from_flags",
    "flags_from_chains",
    "encode_contours",
    "decode_contours",
]

DEFAULT_THRESHOLD = 16.0

# 8-neighbourhood in fixed priority order: E, SE, S, SW, W, NW, N, NE
_MOVES = ((1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1))

_MAX_CHAIN = 0xFFFF  # moves per chain, u16 length field


@dataclass(frozen=True, eq=False)
class ContourMap:
    """Per-pixel edge flags plus their exact chain-code decomposition."""

    flags: np.ndarray
    chains: tuple

    @property
    def shape(self):
        return self.flags.shape


def detect_contours(plane, threshold: float = DEFAULT_THRESHOLD) -> ContourMap:
    """Flag pixels whose forward horizontal or vertical jump exceeds threshold."""
    arr = np.asarray(plane, dtype=np.float64)
    flags = np.zeros(arr.shape, dtype=bool)
    if arr.shape[1] > 1:
        flags[:, :-1] |= np.abs(arr[:, 1:] - arr[:, :-1]) > threshold
    if arr.shape[0] > 1:
        flags[:-1, :] |= np.abs(arr[1:, :] - arr[:-1, :]) > threshold
    return ContourMap(flags=flags, chains=chains_from_flags(flags))


def chains_from_flags(flags: np.ndarray) -> tuple:
    """Greedy raster-order decomposition into maximal 8-connected chains."""
    h, w = flags.shape
    visited = np.zeros_like(flags)
    chains = []
    for sy, sx in np.argwhere(flags):
        if visited[sy, sx]:
            continue
        visited[sy, sx] = True
        x, y = int(sx), int(sy)
        moves = []
        while len(moves) < _MAX_CHAIN:
            for code, (dx, dy) in enumerate(_MOVES):
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h and flags[ny, nx] and not visited[ny, nx]:
                    visited[ny, nx] = True
                    moves.append(code)
                    x, y = nx, ny
                    break
            else:
                break
        chains.append((int(sx), int(sy), tuple(moves)))
    return tuple(chains)


def flags_from_chains(chains, shape) -> np.ndarray:
    h, w = shape
    flags = np.zeros(shape, dtype=bool)
    for sx, sy, moves in chains:
        if not (0 <= sx < w and 0 <= sy < h):
            raise CorruptStream("chain start outside the plane")
        x, y = sx, sy
        flags[y, x] = True
        for code in moves:
            dx, dy = _MOVES[code]
            x += dx
            y += dy
            if not (0 <= x < w and 0 <= y < h):
                raise CorruptStream("chain walked off the plane")
            flags[y, x] = True
    return flags


def encode_contours(cmap: ContourMap) -> bytes:
    """Serialize chains: u32 count, then per chain x/y/length (u16) and 3-bit moves."""
    out = BitWriter()
    out.write_bits(len(cmap.chains), 32)
    for sx, sy, moves in cmap.chains:
        out.write_bits(sx, 16)
        out.write_bits(sy, 16)
        out.write_bits(len(moves), 16)
        for code in moves:
            out.write_bits(code, 3)
    return out.getvalue()


def decode_contours(data: bytes, shape) -> ContourMap:
    inp = BitReader(data)
    count = inp.read_bits(32)
    if count > shape[0] * shape[1]:
        raise CorruptStream("chain count exceeds plane size")
    chains = []
    for _ in range(count):
        sx = inp.read_bits(16)
        sy = inp.read_bits(16)
        n = inp.read_bits(16)
        moves = tuple(inp.read_bits(3) for _ in range(n))
        chains.append((sx, sy, moves))
    chains = tuple(chains)
    return ContourMap(flags=flags_from_chains(chains, shape), chains=chains)
