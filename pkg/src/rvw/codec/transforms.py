"""Block transforms: full-resolution DCT and a fixed bank of low-resolution GFTs.

Per-block coding picks between the orthonormal 8x8 DCT of the residual and a
16-point graph transform applied to the residual decimated to its even
coordinates. The graph templates are 4x4 grid graphs whose edges crossing a
horizontal, vertical, or diagonal cut are nearly severed, matching the
discontinuity layouts that survive smoothing; the bank is known to the
decoder, so choosing a template costs only its index.
"""

from __future__ import annotations

import numpy as np

from ..errors import BadTemplate
from ..graph import BlockGraph, GftBasis, gft_basis

__all__ = [
    "DCT_FULL",
    "gft_low",
    "is_gft",
    "template_of",
    "N_TEMPLATES",
    "N_CHOICES",
    "coeff_count",
    "transform_block",
    "inverse_coefficients",
    "template_basis",
]

BLOCK = 8
LOW = 4
N_TEMPLATES = 4

# choice codes: 0 is the full-resolution DCT, 1+k is low-resolution template k
DCT_FULL = 0
N_CHOICES = 1 + N_TEMPLATES


def gft_low(template_id: int) -> int:
    if not 0 <= template_id < N_TEMPLATES:
        raise BadTemplate(f"template id {template_id} outside bank of {N_TEMPLATES}")
    return 1 + template_id


def is_gft(choice: int) -> bool:
    return choice != DCT_FULL


def template_of(choice: int) -> int:
    if not 1 <= choice <= N_TEMPLATES:
        raise BadTemplate(f"choice {choice} is not a low-resolution transform")
    return choice - 1


def coeff_count(choice: int) -> int:
    if choice == DCT_FULL:
        return BLOCK * BLOCK
    if 1 <= choice <= N_TEMPLATES:
        return LOW * LOW
    raise BadTemplate(f"unknown transform choice {choice}")


def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    mat = np.cos(np.pi * (2 * i + 1) * k / (2 * n))
    mat[0, :] *= np.sqrt(1.0 / n)
    mat[1:, :] *= np.sqrt(2.0 / n)
    return mat


_DCT8 = _dct_matrix(BLOCK)


def _zigzag_order(n: int) -> np.ndarray:
    coords = sorted(
        ((r, c) for r in range(n) for c in range(n)),
        key=lambda rc: (rc[0] + rc[1], rc[1] if (rc[0] + rc[1]) % 2 else rc[0]),
    )
    return np.array([r * n + c for r, c in coords])


_ZIGZAG = _zigzag_order(BLOCK)
_UNZIGZAG = np.argsort(_ZIGZAG)


def _grid_template(cut: str) -> np.ndarray:
    """4-connected 4x4 grid adjacency; edges crossing the named cut get weight 0.01."""
    n = LOW * LOW
    adj = np.zeros((n, n))

    def side(r, c):
        if cut == "horizontal":
            return r < LOW // 2
        if cut == "vertical":
            return c < LOW // 2
        if cut == "diagonal":
            return r <= c
        return True  # uniform: one side only, no cut edges

    for r in range(LOW):
        for c in range(LOW):
            u = r * LOW + c
            for dr, dc in ((0, 1), (1, 0)):
                rr, cc = r + dr, c + dc
                if rr < LOW and cc < LOW:
                    v = rr * LOW + cc
                    w = 1.0 if side(r, c) == side(rr, cc) else 0.01
                    adj[u, v] = adj[v, u] = w
    return adj


def _bank() -> tuple[GftBasis, ...]:
    bases = []
    for cut in ("uniform", "horizontal", "vertical", "diagonal"):
        adj = _grid_template(cut)
        lap = np.diag(adj.sum(axis=1)) - adj
        bases.append(gft_basis(BlockGraph(adjacency=adj, laplacian=lap)))
    return tuple(bases)


_TEMPLATE_BASES = _bank()


def template_basis(template_id: int) -> GftBasis:
    if not 0 <= template_id < N_TEMPLATES:
        raise BadTemplate(f"template id {template_id} outside bank of {N_TEMPLATES}")
    return _TEMPLATE_BASES[template_id]


def transform_block(residual: np.ndarray, choice: int) -> np.ndarray:
    """Forward transform of an 8x8 residual into its scan-ordered coefficients."""
    if choice == DCT_FULL:
        coeffs = _DCT8 @ residual @ _DCT8.T
        return coeffs.ravel()[_ZIGZAG]
    basis = template_basis(template_of(choice))
    low = residual[0::2, 0::2].ravel()
    return basis.eigenvectors.T @ low


def inverse_coefficients(coeffs: np.ndarray, choice: int) -> np.ndarray:
    """Invert the transform; low-resolution choices return a 4x4 block."""
    if choice == DCT_FULL:
        block = coeffs[_UNZIGZAG].reshape(BLOCK, BLOCK)
        return _DCT8.T @ block @ _DCT8
    basis = template_basis(template_of(choice))
    return (basis.eigenvectors @ coeffs).reshape(LOW, LOW)
