"""Difference-plane codec: smoothing-regularized transform coding with RD control.

The encoder sweeps the smoothing weight over a discrete grid, codes each
smoothed plane block by block (contour-aware intra prediction, per-block
transform choice, quantization, arithmetic coding), and scores every
candidate by distortion against the ORIGINAL difference plane plus the
lambda-weighted packet bit length. It then alternates: fix the winning
weight, greedily re-pick each block's transform by per-block RD cost, and
re-sweep, keeping the best state seen. The decoder replays the block loop
from the packet alone, so the encoder's reported reconstruction and the
decoded plane agree sample-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import CorruptStream, DimensionMismatch, QpOutOfRange, RvwError
from ..graph import SmoothingParams, glr_smooth_multi
from ..image import DifferencePlane, Roi
from .contours import DEFAULT_THRESHOLD, ContourMap, decode_contours, detect_contours, encode_contours
from .entropy import (
    decode_choices,
    decode_levels,
    encode_choices,
    encode_levels,
    estimate_choice_bits,
    estimate_level_bits,
)
from .packet import CodedPacket
from .predict import intra_predict
from .quant import dequantize, lambda_from_qp, quantize
from .transforms import (
    BLOCK,
    DCT_FULL,
    LOW,
    N_CHOICES,
    inverse_coefficients,
    is_gft,
    transform_block,
)

__all__ = [
    "CodecParams",
    "RdCost",
    "rd_cost",
    "EncodeResult",
    "EncodeTrace",
    "encode",
    "decode",
]


@dataclass(frozen=True)
class CodecParams:
    """Knobs of the rate-distortion controller."""

    qp: int = 28
    mu_grid: tuple = (1.0, 0.1, 0.01, 0.001, 0.0001)
    block_size: int = BLOCK
    max_alternations: int = 4
    convergence_rel: float = 1e-3
    contour_threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        if not 0 <= self.qp <= 51:
            raise QpOutOfRange(f"qp must lie in 0..51, got {self.qp}")
        grid = tuple(float(m) for m in self.mu_grid)
        if not grid:
            raise ValueError("mu_grid must not be empty")
        if any(b >= a for a, b in zip(grid, grid[1:])):
            raise ValueError("mu_grid must be strictly decreasing")
        if len(grid) > 255:
            raise ValueError("mu_grid longer than the packet's index byte")
        if self.block_size != BLOCK:
            raise ValueError(f"only block size {BLOCK} is supported")
        object.__setattr__(self, "mu_grid", grid)


@dataclass(frozen=True)
class RdCost:
    distortion: float
    rate_bits: int
    lam: float

    @property
    def cost(self) -> float:
        return self.distortion + self.lam * self.rate_bits


def rd_cost(original, reconstructed, rate_bits: int, lam: float) -> RdCost:
    """Sum of squared differences plus lambda-weighted rate."""
    a = original.data if isinstance(original, DifferencePlane) else np.asarray(original)
    b = reconstructed.data if isinstance(reconstructed, DifferencePlane) else np.asarray(reconstructed)
    if a.shape != b.shape:
        raise DimensionMismatch(f"plane shapes differ: {a.shape} vs {b.shape}")
    diff = a.astype(np.int64) - b.astype(np.int64)
    return RdCost(distortion=float((diff * diff).sum()), rate_bits=rate_bits, lam=lam)


@dataclass(frozen=True)
class EncodeTrace:
    """Controller instrumentation: what was tried and what won."""

    chosen_mu: float
    mu_index: int
    rounds: int
    cost_history: tuple          # best cost after each alternation round
    sweep_costs: tuple           # per round: ((mu, cost), ...) for the whole grid
    distortion: float
    rate_bits: int
    lam: float


@dataclass(frozen=True)
class EncodeResult:
    packet: CodedPacket
    reconstructed: DifferencePlane
    trace: EncodeTrace


def _padded_shape(h: int, w: int) -> tuple[int, int]:
    return (-(-h // BLOCK)) * BLOCK, (-(-w // BLOCK)) * BLOCK


def _pad_to_blocks(plane: np.ndarray) -> np.ndarray:
    h, w = plane.shape
    ph, pw = _padded_shape(h, w)
    if (ph, pw) == (h, w):
        return plane
    return np.pad(plane, ((0, ph - h), (0, pw - w)), mode="edge")


def _interpolate_lowres(res: np.ndarray, flags: np.ndarray) -> None:
    """Fill odd-coordinate residual pixels from their even-grid neighbours.

    A neighbour participates in the average only when it sits on the same side
    of the contour raster (equal flag value); with no such neighbour the first
    existing one in left/right/up/down order is copied, else the pixel stays 0.
    Two passes: axis-aligned midpoints first, then centre pixels, so every
    read hits an already-settled value.
    """
    def fill(r: int, c: int, cands) -> None:
        own = flags[r, c]
        usable = [res[rr, cc] for rr, cc in cands if flags[rr, cc] == own]
        if usable:
            res[r, c] = sum(usable) / len(usable)
        elif cands:
            res[r, c] = res[cands[0][0], cands[0][1]]

    for r in range(0, BLOCK, 2):
        for c in range(1, BLOCK, 2):
            cands = [(r, c - 1)]
            if c + 1 < BLOCK:
                cands.append((r, c + 1))
            fill(r, c, cands)
    for r in range(1, BLOCK, 2):
        for c in range(0, BLOCK, 2):
            cands = [(r - 1, c)]
            if r + 1 < BLOCK:
                cands.append((r + 1, c))
            fill(r, c, cands)
    for r in range(1, BLOCK, 2):
        for c in range(1, BLOCK, 2):
            cands = [(r, c - 1)]
            if c + 1 < BLOCK:
                cands.append((r, c + 1))
            cands.append((r - 1, c))
            if r + 1 < BLOCK:
                cands.append((r + 1, c))
            fill(r, c, cands)


def _upsample_operator() -> np.ndarray:
    """Linear map from the 16 even-grid values to the full block, no contours.

    Derived by pushing basis vectors through the scalar interpolation, so the
    fast path cannot drift from the general one.
    """
    op = np.zeros((BLOCK * BLOCK, LOW * LOW))
    flags = np.zeros((BLOCK, BLOCK), dtype=bool)
    for k in range(LOW * LOW):
        basis = np.zeros(LOW * LOW)
        basis[k] = 1.0
        res = np.zeros((BLOCK, BLOCK))
        res[0::2, 0::2] = basis.reshape(LOW, LOW)
        _interpolate_lowres(res, flags)
        op[:, k] = res.ravel()
    return op


def _residual_from_levels(levels: np.ndarray, choice: int, flags_block: np.ndarray, qp: int) -> np.ndarray:
    """Dequantize and invert one block's transform; low-res blocks get upsampled."""
    coeffs = dequantize(levels, qp)
    inv = inverse_coefficients(coeffs, choice)
    if not is_gft(choice):
        return inv
    if not flags_block.any():
        return (_UPSAMPLE @ inv.ravel()).reshape(BLOCK, BLOCK)
    res = np.zeros((BLOCK, BLOCK))
    res[0::2, 0::2] = inv
    _interpolate_lowres(res, flags_block)
    return res


_UPSAMPLE = _upsample_operator()


def _block_grid(ph: int, pw: int):
    return [(by, bx) for by in range(0, ph, BLOCK) for bx in range(0, pw, BLOCK)]


def _code_pass(flags: np.ndarray, choices, qp: int, ds=None, levels_in=None):
    """Shared sequential block loop.

    Encoder mode (ds given): derives levels from the smoothed plane.
    Decoder mode (levels_in given): replays them. Both walk blocks in raster
    order and predict from the same evolving reconstruction, which is what
    makes the two sides bit-exact.
    """
    ph, pw = flags.shape
    recon = np.zeros((ph, pw))
    out_levels = []
    for bi, (by, bx) in enumerate(_block_grid(ph, pw)):
        choice = choices[bi]
        pred = intra_predict(recon, by, bx, flags)
        if levels_in is None:
            residual = ds[by : by + BLOCK, bx : bx + BLOCK] - pred
            levels = quantize(transform_block(residual, choice), qp)
        else:
            levels = levels_in[bi]
        res = _residual_from_levels(levels, choice, flags[by : by + BLOCK, bx : bx + BLOCK], qp)
        recon[by : by + BLOCK, bx : bx + BLOCK] = pred + res
        out_levels.append(levels)
    return out_levels, recon


def _to_diff(recon: np.ndarray, h: int, w: int) -> DifferencePlane:
    return DifferencePlane(np.clip(np.rint(recon[:h, :w]), -255, 255).astype(np.int16))


def _ssd(a: np.ndarray, b: np.ndarray) -> int:
    d = a.astype(np.int64) - b.astype(np.int64)
    return int((d * d).sum())


def _greedy_choices(ds: np.ndarray, flags: np.ndarray, qp: int, lam: float, orig: np.ndarray):
    """Per-block transform re-selection by distortion-plus-estimated-rate cost."""
    h, w = orig.shape
    ph, pw = flags.shape
    recon = np.zeros((ph, pw))
    choices = []
    for by, bx in _block_grid(ph, pw):
        pred = intra_predict(recon, by, bx, flags)
        residual = ds[by : by + BLOCK, bx : bx + BLOCK] - pred
        flags_block = flags[by : by + BLOCK, bx : bx + BLOCK]
        ylim = min(BLOCK, h - by)
        xlim = min(BLOCK, w - bx)
        orig_block = orig[by : by + ylim, bx : bx + xlim] if ylim > 0 and xlim > 0 else None
        best_cost = None
        best_choice = DCT_FULL
        best_rec = None
        for choice in range(N_CHOICES):
            levels = quantize(transform_block(residual, choice), qp)
            res = _residual_from_levels(levels, choice, flags_block, qp)
            block_rec = pred + res
            dist = 0
            if orig_block is not None:
                dec = np.clip(np.rint(block_rec[:ylim, :xlim]), -255, 255)
                dist = _ssd(orig_block, dec)
            bits = estimate_choice_bits(choice) + estimate_level_bits(levels)
            cost = dist + lam * bits
            if best_cost is None or cost < best_cost:
                best_cost = cost
                best_choice = choice
                best_rec = block_rec
        recon[by : by + BLOCK, bx : bx + BLOCK] = best_rec
        choices.append(best_choice)
    return choices


def encode(diff: DifferencePlane, roi: Roi, params: CodecParams | None = None) -> EncodeResult:
    """Code a difference plane; returns the packet, its exact reconstruction, and a trace."""
    params = params or CodecParams()
    if diff.width != roi.width or diff.height != roi.height:
        raise DimensionMismatch("difference plane extent must match the roi")
    orig = diff.data.astype(np.int64)
    h, w = orig.shape
    lam = lambda_from_qp(params.qp)
    n_blocks = None

    prepared: dict[int, tuple] = {}

    def prep(mu_index: int):
        # the whole grid shares one pass of per-block graph construction
        if not prepared:
            smoothed = glr_smooth_multi(
                diff, SmoothingParams(mu=params.mu_grid[0]), params.mu_grid
            )
            for mi, mu in enumerate(params.mu_grid):
                ds = _pad_to_blocks(smoothed[mu])
                cmap = detect_contours(ds, params.contour_threshold)
                prepared[mi] = (ds, cmap, encode_contours(cmap))
        return prepared[mu_index]

    choices = None
    best = None  # (cost, mu_index, packet, dprime, distortion, bits)
    cost_history = []
    sweep_costs = []
    rounds = 0

    for _round in range(params.max_alternations):
        rounds += 1
        round_best = None
        this_sweep = []
        for mi in range(len(params.mu_grid)):
            ds, cmap, contour_bytes = prep(mi)
            if n_blocks is None:
                n_blocks = (ds.shape[0] // BLOCK) * (ds.shape[1] // BLOCK)
            if choices is None:
                choices = [DCT_FULL] * n_blocks
            levels, recon = _code_pass(cmap.flags, choices, params.qp, ds=ds)
            pkt = CodedPacket(
                roi=roi,
                qp=params.qp,
                mu_index=mi,
                block_size=BLOCK,
                contour_stream=contour_bytes,
                choice_stream=encode_choices(choices),
                coeff_stream=encode_levels(levels, choices),
            )
            bits = pkt.bit_length
            dprime = _to_diff(recon, h, w)
            dist = _ssd(orig, dprime.data)
            cost = dist + lam * bits
            this_sweep.append((params.mu_grid[mi], cost))
            if round_best is None or cost < round_best[0]:
                round_best = (cost, mi, pkt, dprime, dist, bits)
        sweep_costs.append(tuple(this_sweep))
        if best is None or round_best[0] < best[0]:
            best = round_best
        cost_history.append(best[0])
        if len(cost_history) > 1:
            prev, cur = cost_history[-2], cost_history[-1]
            if prev - cur < params.convergence_rel * max(prev, 1.0):
                break
        if _round == params.max_alternations - 1:
            break
        ds, cmap, _ = prep(round_best[1])
        new_choices = _greedy_choices(ds, cmap.flags, params.qp, lam, orig)
        if new_choices == choices:
            break
        choices = new_choices

    cost, mu_index, pkt, dprime, dist, bits = best
    trace = EncodeTrace(
        chosen_mu=params.mu_grid[mu_index],
        mu_index=mu_index,
        rounds=rounds,
        cost_history=tuple(cost_history),
        sweep_costs=tuple(sweep_costs),
        distortion=float(dist),
        rate_bits=bits,
        lam=lam,
    )
    return EncodeResult(packet=pkt, reconstructed=dprime, trace=trace)


def decode(packet: CodedPacket | bytes) -> DifferencePlane:
    """Blind reconstruction of the difference plane from a packet alone."""
    if isinstance(packet, (bytes, bytearray)):
        packet = CodedPacket.from_bytes(bytes(packet))
    if packet.block_size != BLOCK:
        raise CorruptStream(f"unsupported block size {packet.block_size}")
    h, w = packet.roi.height, packet.roi.width
    ph, pw = _padded_shape(h, w)
    try:
        cmap = decode_contours(packet.contour_stream, (ph, pw))
        n_blocks = (ph // BLOCK) * (pw // BLOCK)
        choices = decode_choices(packet.choice_stream, n_blocks)
        levels = decode_levels(packet.coeff_stream, choices)
        _, recon = _code_pass(cmap.flags, choices, packet.qp, levels_in=levels)
    except RvwError:
        raise
    except Exception as exc:  # malformed streams must fail loudly, never crash oddly
        raise CorruptStream(f"packet body failed to parse: {exc}") from exc
    return _to_diff(recon, h, w)
