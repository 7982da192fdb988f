"""Regularized graph-transform coding of difference planes."""

from .contours import (
    ContourMap,
    chains_from_flags,
    decode_contours,
    detect_contours,
    encode_contours,
    flags_from_chains,
)
from .core import CodecParams, EncodeResult, EncodeTrace, RdCost, decode, encode, rd_cost
from .entropy import entropy_decode, entropy_encode
from .packet import PACKET_VERSION, CodedPacket
from .predict import intra_predict
from .quant import dequantize, lambda_from_qp, qstep, quantize
from .transforms import (
    DCT_FULL,
    N_TEMPLATES,
    gft_low,
    inverse_coefficients,
    template_basis,
    transform_block,
)

__all__ = [
    "CodecParams",
    "CodedPacket",
    "ContourMap",
    "EncodeResult",
    "EncodeTrace",
    "PACKET_VERSION",
    "RdCost",
    "DCT_FULL",
    "N_TEMPLATES",
    "chains_from_flags",
    "decode",
    "decode_contours",
    "dequantize",
    "detect_contours",
    "encode",
    "encode_contours",
    "entropy_decode",
    "entropy_encode",
    "flags_from_chains",
    "gft_low",
    "intra_predict",
    "inverse_coefficients",
    "lambda_from_qp",
    "qstep",
    "quantize",
    "rd_cost",
    "template_basis",
    "transform_block",
]
