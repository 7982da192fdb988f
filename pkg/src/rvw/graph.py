"""Block-level graph construction, Laplacian smoothness, and graph Fourier bases.

A fully-connected graph is built inside each pixel block with Gaussian-kernel
edge weights, the combinatorial Laplacian L = degree - adjacency measures
signal smoothness through the quadratic form x'Lx, and the orthonormal
eigenvectors of L give the block's Fourier basis. The smoothing operator
solves (I + mu*L) x = d per overlapping block and averages the overlaps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EigenFailure, InvalidSigma, SolveFailure
from .image import DifferencePlane

__all__ = [
    "BlockGraph",
    "GftBasis",
    "SmoothingParams",
    "build_block_graph",
    "glr",
    "gft_basis",
    "gft_forward",
    "gft_inverse",
    "smoothed_blocks",
    "glr_smooth",
    "glr_smooth_multi",
]


@dataclass(frozen=True, eq=False)
class BlockGraph:
    """Dense weighted graph on one block: adjacency and combinatorial Laplacian."""

    adjacency: np.ndarray
    laplacian: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True, eq=False)
class GftBasis:
    """Eigenpairs of a block Laplacian; eigenvalues ascending, columns orthonormal."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]


@dataclass(frozen=True)
class SmoothingParams:
    """Knobs for the edgewise-regularized smoothing pass."""

    mu: float
    block_size: int = 8
    step: int = 2
    sigma_floor: float = 1.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if self.block_size < 2:
            raise ValueError("block_size must be at least 2")
        if not 1 <= self.step <= self.block_size:
            raise ValueError("step must lie in 1..block_size")


def build_block_graph(block, sigma: float) -> BlockGraph:
    """Fully-connected graph over block intensities with Gaussian-kernel weights.

    Edge weight between vertices i and j is exp(-(d_i - d_j)^2 / sigma^2);
    the diagonal stays zero and the Laplacian is degree minus adjacency.
    """
    if sigma <= 0:
        raise InvalidSigma(f"sigma must be positive, got {sigma}")
    d = np.asarray(block, dtype=np.float64).ravel()
    if d.size < 2:
        raise DimensionMismatch("a block graph needs at least 2 vertices")
    pair = d[:, None] - d[None, :]
    adj = np.exp(-(pair * pair) / (sigma * sigma))
    np.fill_diagonal(adj, 0.0)
    lap = np.diag(adj.sum(axis=1)) - adj
    return BlockGraph(adjacency=adj, laplacian=lap)


def glr(signal, graph: BlockGraph) -> float:
    """Smoothness of a signal with respect to a graph: the quadratic form x'Lx."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size != graph.n:
        raise DimensionMismatch(f"signal length {x.size} != graph size {graph.n}")
    value = float(x @ graph.laplacian @ x)
    # PSD form; tiny negative round-off is clamped
    return value if value > 0.0 else 0.0


def gft_basis(graph: BlockGraph) -> GftBasis:
    """Eigendecomposition of the block Laplacian with a fixed sign convention.

    Eigenvalues are sorted ascending; each eigenvector is flipped so its first
    entry of magnitude above 1e-12 is positive, which pins the basis (and every
    bitstream derived from it) to one deterministic representative.
    """
    try:
        vals, vecs = np.linalg.eigh(graph.laplacian)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(f"eigendecomposition failed: {exc}") from exc
    for i in range(vecs.shape[1]):
        col = vecs[:, i]
        nz = np.nonzero(np.abs(col) > 1e-12)[0]
        if nz.size and col[nz[0]] < 0:
            vecs[:, i] = -col
    return GftBasis(eigenvalues=vals, eigenvectors=vecs)


def gft_forward(signal, basis: GftBasis) -> np.ndarray:
    """Project a block signal onto the graph frequency basis (U' x)."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size != basis.n:
        raise DimensionMismatch(f"signal length {x.size} != basis size {basis.n}")
    return basis.eigenvectors.T @ x

def gft_inverse(coefficients, basis: GftBasis) -> np.ndarray:
    """Rebuild a block signal from its graph frequency coefficients (U x^)."""
    c = np.asarray(coefficients, dtype=np.float64).ravel()
    if c.size != basis.n:
        raise DimensionMismatch(f"coefficient length {c.size} != basis size {basis.n}")
    return basis.eigenvectors @ c


# --- smoothing ------------------------------------------------------------

_SOLVE_CHUNK = 512  # blocks per batched LAPACK call, caps the (B, n, n) workspace


def _pad_for_blocks(plane: np.ndarray, l: int, t: int) -> np.ndarray:
    h, w = plane.shape
    ph = max(l, h)
    pw = max(l, w)
    ph += (-(ph - l)) % t
    pw += (-(pw - l)) % t
    if (ph, pw) == (h, w):
        return plane
    return np.pad(plane, ((0, ph - h), (0, pw - w)), mode="edge")


def _block_solutions(plane: np.ndarray, params: SmoothingParams, mus):
    """Batched closed-form solves (I + mu*L_block) v = block, for several mu at once.

    The per-block graph (sigma, adjacency, Laplacian) depends only on content,
    so it is built once per chunk and reused across the whole mu list. Yields
    (positions, {mu: solutions}) per chunk; positions are (y, x) block origins
    on the edge-padded plane, solutions are (chunk, n) rows in the same order.
    """
    l, t = params.block_size, params.step
    padded = _pad_for_blocks(np.asarray(plane, dtype=np.float64), l, t)
    ph, pw = padded.shape
    view = np.lib.stride_tricks.sliding_window_view(padded, (l, l))[::t, ::t]
    by, bx = view.shape[:2]
    all_blocks = view.reshape(by * bx, l * l)
    positions = [(y * t, x * t) for y in range(by) for x in range(bx)]
    n = l * l
    idx = np.arange(n)
    eye = np.eye(n)
    for start in range(0, len(positions), _SOLVE_CHUNK):
        chunk = positions[start : start + _SOLVE_CHUNK]
        blocks = np.ascontiguousarray(all_blocks[start : start + len(chunk)])
        sigma = np.maximum(blocks.std(axis=1), params.sigma_floor)
        adj = blocks[:, :, None] - blocks[:, None, :]
        np.multiply(adj, adj, out=adj)
        adj /= -(sigma * sigma)[:, None, None]
        np.exp(adj, out=adj)
        adj[:, idx, idx] = 0.0
        degrees = adj.sum(axis=2)
        lap = np.negative(adj, out=adj)
        lap[:, idx, idx] = degrees
        sols = {}
        for mu in mus:
            try:
                sols[mu] = np.linalg.solve(
                    eye[None, :, :] + mu * lap, blocks[:, :, None]
                )[:, :, 0]
            except np.linalg.LinAlgError as exc:  # impossible for mu >= 0 (SPD system)
                raise SolveFailure(f"smoothing system singular: {exc}") from exc
        yield chunk, sols


def smoothed_blocks(plane: np.ndarray, params: SmoothingParams):
    """Per-block smoothing solutions of an edge-padded plane, in raster order.

    Yields (y, x, solution) triples where the solution solves
    (I + mu*L_block) v = block for that block's own Gaussian graph with
    sigma = max(block standard deviation, sigma_floor).
    """
    l = params.block_size
    for chunk, sols in _block_solutions(plane, params, (params.mu,)):
        for (y, x), sol in zip(chunk, sols[params.mu]):
            yield y, x, sol.reshape(l, l)


def glr_smooth_multi(diff, params: SmoothingParams, mus) -> dict:
    """glr_smooth for several mu values sharing one pass of graph construction."""
    data = diff.data if isinstance(diff, DifferencePlane) else np.asarray(diff)
    data = data.astype(np.float64)
    h, w = data.shape
    l = params.block_size
    padded = _pad_for_blocks(data, l, params.step)
    mus = list(mus)
    acc = {mu: np.zeros_like(padded) for mu in mus}
    cnt = np.zeros_like(padded)
    for chunk, sols in _block_solutions(data, params, mus):
        for mu in mus:
            plane_acc = acc[mu]
            for (y, x), sol in zip(chunk, sols[mu]):
                plane_acc[y : y + l, x : x + l] += sol.reshape(l, l)
        for y, x in chunk:
            cnt[y : y + l, x : x + l] += 1.0
    return {mu: (acc[mu] / cnt)[:h, :w] for mu in mus}


def glr_smooth(diff, params: SmoothingParams) -> np.ndarray:
    """Piecewise smoothing of a difference plane by overlapping block solves.

    Every pixel's estimates from all covering blocks are averaged with uniform
    weights; block accumulation runs in raster order so the result does not
    depend on scheduling. Output has the input's dimensions and is real-valued.
    """
    return glr_smooth_multi(diff, params, (params.mu,))[params.mu]
