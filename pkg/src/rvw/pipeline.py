"""End-to-end embedding and blind restoration.

Embedding: difference the host against the watermarked image over the ROI,
code the difference, add the coding error back onto the watermarked ROI
(recording clamping overflow inside the packet), then hide the packet in the
non-ROI region by histogram shifting. Restoration consumes only the final
image: the hidden packet locates the ROI, decodes the difference plane, and
adding it back yields the original host bit-exactly. Color images run the
whole chain independently per channel, each plane carrying its own packet
tagged with the channel index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .codec import CodecParams, CodedPacket, decode as codec_decode, encode as codec_encode
from .errors import DimensionMismatch, MalformedHeader
from .image import ColorImage, DifferencePlane, GrayPlane, Roi, apply_difference, difference
from .metrics import psnr_regions, raw_bits
from .rdh import rdh_embed, rdh_extract
from .util import parallel_map
from .watermark import AlphaParams, alpha_embed, compensate

__all__ = ["EmbedConfig", "EmbedReport", "ChannelReport", "embed", "restore"]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbedConfig:
    codec: CodecParams
    roi: Roi
    visible: AlphaParams | None = None

    def __post_init__(self):
        if self.visible is not None and self.visible.roi != self.roi:
            raise DimensionMismatch("visible-embedding roi differs from the pipeline roi")


@dataclass(frozen=True)
class ChannelReport:
    n_d: int
    n_c: int
    ratio: float
    chosen_mu: float
    alternation_rounds: int
    overflow_entries: int


@dataclass(frozen=True)
class EmbedReport:
    """Rate and quality summary of one embedding run.

    For color images chosen_mu and alternation_rounds are per-channel tuples;
    n_d and n_c sum over channels and the PSNRs average them.
    """

    n_d: int
    n_c: int
    ratio: float
    psnr_i: float
    psnr_n: float
    psnr_w: float
    chosen_mu: float | tuple
    alternation_rounds: int | tuple
    channels: tuple


def _embed_channel(host: GrayPlane, watermarked: GrayPlane, roi: Roi, params: CodecParams, tag: int | None):
    d = difference(host, watermarked, roi)
    result = codec_encode(d, roi, params)
    err = DifferencePlane(d.data - result.reconstructed.data)
    compensated, overflow = compensate(watermarked, err, roi)
    packet = result.packet.with_overflow(overflow)
    blob = packet.to_bytes()
    payload = blob if tag is None else bytes([tag]) + blob
    bits = np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
    final = rdh_embed(compensated, roi, bits)
    report = ChannelReport(
        n_d=raw_bits(roi.width, roi.height),
        n_c=8 * len(blob),
        ratio=8 * len(blob) / raw_bits(roi.width, roi.height),
        chosen_mu=result.trace.chosen_mu,
        alternation_rounds=result.trace.rounds,
        overflow_entries=len(overflow),
    )
    return final, report


def embed(host, watermarked, config: EmbedConfig):
    """Run the whole embedding chain; returns (final image, report).

    When config.visible is set, the second argument is the ROI-sized watermark
    raster and the toolkit performs the alpha fusion itself; otherwise it is
    the already-watermarked image from any external visible scheme.
    """
    roi = config.roi
    if isinstance(host, GrayPlane) != isinstance(watermarked, GrayPlane):
        raise DimensionMismatch("host and watermarked must both be gray or both color")
    if config.visible is not None:
        if isinstance(host, GrayPlane):
            watermarked = alpha_embed(host, watermarked, config.visible)
        else:
            fused = [
                alpha_embed(hc, wc, config.visible)
                for hc, wc in zip(host.channels, watermarked.channels)
            ]
            watermarked = ColorImage(tuple(fused))
    if host.width != watermarked.width or host.height != watermarked.height:
        raise DimensionMismatch("host and watermarked dimensions differ")
    roi.check_inside(host.width, host.height)

    if isinstance(host, GrayPlane):
        _warn_outside(host, watermarked, roi)
        final, chan = _embed_channel(host, watermarked, roi, config.codec, tag=None)
        psnr_i, psnr_n, psnr_w = psnr_regions(watermarked, final, roi)
        report = EmbedReport(
            n_d=chan.n_d,
            n_c=chan.n_c,
            ratio=chan.ratio,
            psnr_i=psnr_i,
            psnr_n=psnr_n,
            psnr_w=psnr_w,
            chosen_mu=chan.chosen_mu,
            alternation_rounds=chan.alternation_rounds,
            channels=(chan,),
        )
        return final, report

    for hc, wc in zip(host.channels, watermarked.channels):
        _warn_outside(hc, wc, roi)
    results = parallel_map(
        lambda iwc: _embed_channel(iwc[1][0], iwc[1][1], roi, config.codec, tag=iwc[0]),
        enumerate(zip(host.channels, watermarked.channels)),
    )
    finals = tuple(r[0] for r in results)
    chans = tuple(r[1] for r in results)
    final = ColorImage(finals)
    n_d = sum(c.n_d for c in chans)
    n_c = sum(c.n_c for c in chans)
    psnr_i, psnr_n, psnr_w = psnr_regions(watermarked, final, roi)
    report = EmbedReport(
        n_d=n_d,
        n_c=n_c,
        ratio=n_c / n_d,
        psnr_i=psnr_i,
        psnr_n=psnr_n,
        psnr_w=psnr_w,
        chosen_mu=tuple(c.chosen_mu for c in chans),
        alternation_rounds=tuple(c.alternation_rounds for c in chans),
        channels=chans,
    )
    return final, report


def _warn_outside(host: GrayPlane, watermarked: GrayPlane, roi: Roi) -> None:
    outside = host.pixels != watermarked.pixels
    ys, xs = roi.slices()
    outside = outside.copy()
    outside[ys, xs] = False
    if outside.any():
        log.warning(
            "host and watermarked differ on %d pixels outside the roi; "
            "those pixels restore from the watermarked image, not the host",
            int(outside.sum()),
        )


def _restore_channel(plane: GrayPlane, tag: int | None):
    bits, roi, intermediate = rdh_extract(plane)
    blob = np.packbits(bits).tobytes()
    if tag is not None:
        if not blob or blob[0] != tag:
            raise MalformedHeader(f"channel tag mismatch: expected {tag}")
        blob = blob[1:]
    packet = CodedPacket.from_bytes(blob)
    if packet.roi != roi:
        raise MalformedHeader("packet roi disagrees with the reserve roi")
    dprime = codec_decode(packet)
    host = apply_difference(intermediate, dprime, roi, packet.overflow)
    return host, intermediate


def restore(final):
    """Blindly recover (host, intermediate watermarked image) from the final image."""
    if isinstance(final, GrayPlane):
        return _restore_channel(final, tag=None)
    results = parallel_map(
        lambda ic: _restore_channel(ic[1], tag=ic[0]), enumerate(final.channels)
    )
    hosts = tuple(r[0] for r in results)
    inters = tuple(r[1] for r in results)
    return ColorImage(hosts), ColorImage(inters)
