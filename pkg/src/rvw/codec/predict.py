"""Contour-aware intra prediction from previously reconstructed neighbours.

Each pixel of an 8x8 block is predicted from the nearest of 16 boundary
pixels (the row above and the column to the left of the block) reachable by
4-connected steps that never pass through a contour-flagged pixel. Flagged
pixels may still receive a prediction when first reached; flagged boundary
pixels are unusable as sources. Boundary positions outside the plane act as
zero-valued sources, so the first block predicts all zeros. Everything here
depends only on decoded data and the contour raster, so the decoder replays
it exactly.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .transforms import BLOCK

__all__ = ["intra_predict"]

# boundary sources: 8 above the block then 8 left of it, in scan order
_N_SRC = 2 * BLOCK


def _source_positions():
    top = [(-1, c) for c in range(BLOCK)]
    left = [(r, -1) for r in range(BLOCK)]
    return top + left


_SOURCES = _source_positions()


def _bfs_assign(blocked: np.ndarray, usable: np.ndarray) -> np.ndarray:
    """Multi-source BFS over the block grid; returns per-pixel source index or -1.

    blocked marks interior pixels that may be assigned but not traversed;
    usable masks the 16 boundary sources. FIFO order with a fixed source
    enumeration makes ties deterministic.
    """
    owner = np.full((BLOCK, BLOCK), -1, dtype=np.int64)
    queue = deque()
    for si, (r, c) in enumerate(_SOURCES):
        if not usable[si]:
            continue
        rr, cc = (0, c) if r == -1 else (r, 0)
        if owner[rr, cc] == -1:
            owner[rr, cc] = si
            queue.append((rr, cc))
    while queue:
        r, c = queue.popleft()
        if blocked[r, c]:
            continue
        src = owner[r, c]
        for nr, nc in ((r, c + 1), (r + 1, c), (r, c - 1), (r - 1, c)):
            if 0 <= nr < BLOCK and 0 <= nc < BLOCK and owner[nr, nc] == -1:
                owner[nr, nc] = src
                queue.append((nr, nc))
    return owner


# With no contours anywhere, every source is usable and nothing is blocked:
# the assignment map is a constant of the geometry.
_PLAIN_OWNER = _bfs_assign(
    np.zeros((BLOCK, BLOCK), dtype=bool), np.ones(_N_SRC, dtype=bool)
)


def _source_values(recon: np.ndarray, by: int, bx: int) -> np.ndarray:
    """Reconstructed boundary values; positions outside the plane read as zero."""
    h, w = recon.shape
    vals = np.zeros(_N_SRC)
    if by > 0:
        hi = min(bx + BLOCK, w)
        if bx < w:
            vals[: hi - bx] = recon[by - 1, bx:hi]
    if bx > 0:
        hi = min(by + BLOCK, h)
        if by < h:
            vals[BLOCK : BLOCK + hi - by] = recon[by:hi, bx - 1]
    return vals


def intra_predict(recon: np.ndarray, by: int, bx: int, flags: np.ndarray) -> np.ndarray:
    """Predictor for the block whose top-left pixel is (by, bx).

    recon is the evolving reconstruction plane (previously decoded blocks
    filled, raster order); flags is the full-plane contour raster.
    """
    h, w = flags.shape
    vals = _source_values(recon, by, bx)
    # fast path: no contour anywhere in the block or its boundary ring
    y0, x0 = max(by - 1, 0), max(bx - 1, 0)
    if not flags[y0 : by + BLOCK, x0 : bx + BLOCK].any():
        return vals[_PLAIN_OWNER]
    blocked = np.zeros((BLOCK, BLOCK), dtype=bool)
    ylim = min(BLOCK, h - by)
    xlim = min(BLOCK, w - bx)
    blocked[:ylim, :xlim] = flags[by : by + ylim, bx : bx + xlim]
    usable = np.ones(_N_SRC, dtype=bool)
    for si, (r, c) in enumerate(_SOURCES):
        ar, ac = by + r, bx + c
        if 0 <= ar < h and 0 <= ac < w and flags[ar, ac]:
            usable[si] = False
    owner = _bfs_assign(blocked, usable)
    pred = np.where(owner >= 0, vals[np.clip(owner, 0, None)], 0.0)
    return pred
