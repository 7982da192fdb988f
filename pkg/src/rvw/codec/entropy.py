"""Entropy coding of transform choices and quantized coefficient levels.

Choices and levels travel in two arithmetic-coded streams. Levels are
binarized as significance flag, bypass sign, and order-0 exp-Golomb
magnitude; significance and magnitude contexts are indexed by coefficient
position within the scan, kept separate for the full-resolution and
low-resolution transform families. Context state never outlives one
encode or decode call.
"""

from __future__ import annotations

import numpy as np

from ..errors import CorruptStream, EncodeOverflow
from .arith import ContextSet, Decoder, Encoder, decode_eg0, encode_eg0, eg0_length
from .transforms import DCT_FULL, N_TEMPLATES, coeff_count, is_gft, template_of

__all__ = [
    "MAG_CAP",
    "encode_choices",
    "decode_choices",
    "encode_levels",
    "decode_levels",
    "entropy_encode",
    "entropy_decode",
    "estimate_level_bits",
    "estimate_choice_bits",
]

MAG_CAP = 1 << 15  # binarization cap on |level|

_SIG_CTX = 16      # per-position significance contexts per family
_MAG_CTX = 10      # magnitude prefix contexts per family

# choice stream contexts: gft flag + 2 template bits
_CHOICE_CTX = 3


def _level_ctx_count() -> int:
    # per family: 1 coded-block flag + significance + magnitude prefixes
    return 2 * (1 + _SIG_CTX + _MAG_CTX)


def _family(choice: int) -> int:
    return 1 if is_gft(choice) else 0


def _cbf_ctx(fam: int) -> int:
    return fam

def _sig_ctx(fam: int, pos: int) -> int:
    return 2 + fam * _SIG_CTX + min(pos, _SIG_CTX - 1)


def _mag_base(fam: int) -> int:
    return 2 + 2 * _SIG_CTX + fam * _MAG_CTX


def encode_choices(choices) -> bytes:
    enc = Encoder()
    ctxs = ContextSet(_CHOICE_CTX)
    for choice in choices:
        if is_gft(choice):
            enc.encode_ctx(1, ctxs, 0)
            tid = template_of(choice)
            enc.encode_ctx((tid >> 1) & 1, ctxs, 1)
            enc.encode_ctx(tid & 1, ctxs, 2)
        else:
            enc.encode_ctx(0, ctxs, 0)
    return enc.finish()


def decode_choices(data: bytes, n_blocks: int) -> list[int]:
    dec = Decoder(data)
    ctxs = ContextSet(_CHOICE_CTX)
    choices = []
    for _ in range(n_blocks):
        if dec.decode_ctx(ctxs, 0):
            tid = dec.decode_ctx(ctxs, 1) << 1
            tid |= dec.decode_ctx(ctxs, 2)
            choices.append(1 + tid)
        else:
            choices.append(DCT_FULL)
    return choices


def encode_levels(levels_per_block, choices) -> bytes:
    enc = Encoder()
    ctxs = ContextSet(_level_ctx_count())
    for levels, choice in zip(levels_per_block, choices):
        fam = _family(choice)
        arr = np.asarray(levels, dtype=np.int64)
        if arr.size != coeff_count(choice):
            raise CorruptStream("level vector length does not match the choice")
        if np.any(np.abs(arr) >= MAG_CAP):
            raise EncodeOverflow("coefficient level exceeds the binarization cap")
        if not arr.any():
            enc.encode_ctx(0, ctxs, _cbf_ctx(fam))
            continue
        enc.encode_ctx(1, ctxs, _cbf_ctx(fam))
        mag_base = _mag_base(fam)
        for pos, level in enumerate(arr):
            if level == 0:
                enc.encode_ctx(0, ctxs, _sig_ctx(fam, pos))
                continue
            enc.encode_ctx(1, ctxs, _sig_ctx(fam, pos))
            enc.encode_bypass(1 if level < 0 else 0)
            encode_eg0(enc, int(abs(level)) - 1, ctxs, mag_base, _MAG_CTX)
    return enc.finish()


def decode_levels(data: bytes, choices) -> list[np.ndarray]:
    dec = Decoder(data)
    ctxs = ContextSet(_level_ctx_count())
    out = []
    for choice in choices:
        fam = _family(choice)
        n = coeff_count(choice)
        levels = np.zeros(n, dtype=np.int64)
        if dec.decode_ctx(ctxs, _cbf_ctx(fam)):
            mag_base = _mag_base(fam)
            for pos in range(n):
                if not dec.decode_ctx(ctxs, _sig_ctx(fam, pos)):
                    continue
                negative = dec.decode_bypass()
                mag = decode_eg0(dec, ctxs, mag_base, _MAG_CTX) + 1
                if mag >= MAG_CAP:
                    raise CorruptStream("decoded magnitude exceeds the cap")
                levels[pos] = -mag if negative else mag
        out.append(levels)
    return out


def entropy_encode(levels_per_block, choices) -> bytes:
    """Both streams, each length-prefixed, as one buffer (round-trip surface)."""
    cb = encode_choices(choices)
    lb = encode_levels(levels_per_block, choices)
    return (
        len(cb).to_bytes(4, "little") + cb + len(lb).to_bytes(4, "little") + lb
    )


def entropy_decode(data: bytes, n_blocks: int):
    if len(data) < 4:
        raise CorruptStream("entropy buffer too short")
    clen = int.from_bytes(data[:4], "little")
    if len(data) < 4 + clen + 4:
        raise CorruptStream("choice stream truncated")
    choices = decode_choices(data[4 : 4 + clen], n_blocks)
    llen = int.from_bytes(data[4 + clen : 8 + clen], "little")
    if len(data) < 8 + clen + llen:
        raise CorruptStream("level stream truncated")
    levels = decode_levels(data[8 + clen : 8 + clen + llen], choices)
    return levels, choices


# --- static rate estimates for mode decisions ------------------------------

def estimate_choice_bits(choice: int) -> int:
    return 3 if is_gft(choice) else 1


def estimate_level_bits(levels: np.ndarray) -> int:
    """Binarization length ignoring adaptation; ranks modes for RD selection."""
    arr = np.asarray(levels, dtype=np.int64)
    if not arr.any():
        return 1
    bits = 1 + arr.size  # coded-block flag + one significance bit per position
    for level in arr[arr != 0]:
        bits += 1 + eg0_length(int(abs(level)) - 1)
    return bits
