"""Reversible visible watermarking toolkit.

Embeds a visible watermark plus a compact, self-describing reconstruction
payload into a host image and blindly restores the original host bit-exactly.
"""

from .codec import CodecParams, CodedPacket, decode, encode
from .errors import RvwError
from .image import (
    ColorImage,
    DifferencePlane,
    GrayPlane,
    Roi,
    apply_difference,
    difference,
    load_diff,
    load_image,
    save_diff,
    save_image,
)
from .metrics import compression_ratio, psnr, psnr_regions, raw_bits, rd_sweep
from .pipeline import EmbedConfig, EmbedReport, embed, restore
from .rdh import rdh_capacity, rdh_embed, rdh_extract
from .watermark import AlphaParams, alpha_embed, compensate

__version__ = "0.1.0"

__all__ = [
    "AlphaParams",
    "CodecParams",
    "CodedPacket",
    "ColorImage",
    "DifferencePlane",
    "EmbedConfig",
    "EmbedReport",
    "GrayPlane",
    "Roi",
    "RvwError",
    "alpha_embed",
    "apply_difference",
    "compensate",
    "compression_ratio",
    "decode",
    "difference",
    "embed",
    "encode",
    "load_diff",
    "load_image",
    "psnr",
    "psnr_regions",
    "raw_bits",
    "rd_sweep",
    "rdh_capacity",
    "rdh_embed",
    "rdh_extract",
    "restore",
    "save_diff",
    "save_image",
]
