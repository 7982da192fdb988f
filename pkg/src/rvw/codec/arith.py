"""Adaptive binary arithmetic coder on 31-bit integer registers.

Encoder and decoder renormalize identically in pure integer arithmetic, so
the same sequence of (context, bit) calls is bit-exact on every platform.
Probabilities come from per-context 0/1 counters with periodic halving;
bypass coding uses fixed half-probability without touching any counter.
"""

from __future__ import annotations

from ..errors import CorruptStream

_BITS = 31
_MAX = (1 << _BITS) - 1
_HALF = 1 << (_BITS - 1)
_QUARTER = 1 << (_BITS - 2)
_THREE_QUARTER = _HALF + _QUARTER

_RESCALE = 1 << 10  # halve context counts when they reach this total


class ContextSet:
    """Adaptive 0/1 counts, one pair per context id."""

    def __init__(self, size: int):
        self.c0 = [1] * size
        self.c1 = [1] * size

    def update(self, ctx: int, bit: int) -> None:
        if bit:
            self.c1[ctx] += 1
        else:
            self.c0[ctx] += 1
        if self.c0[ctx] + self.c1[ctx] >= _RESCALE:
            self.c0[ctx] = max(1, self.c0[ctx] >> 1)
            self.c1[ctx] = max(1, self.c1[ctx] >> 1)


class Encoder:
    def __init__(self):
        self._low = 0
        self._high = _MAX
        self._pending = 0
        self._buf = bytearray()
        self._acc = 0
        self._nbits = 0

    def _emit(self, bit: int) -> None:
        self._acc = (self._acc << 1) | bit
        self._nbits += 1
        if self._nbits == 8:
            self._buf.append(self._acc)
            self._acc = 0
            self._nbits = 0

    def _emit_with_pending(self, bit: int) -> None:
        self._emit(bit)
        inv = bit ^ 1
        while self._pending:
            self._emit(inv)
            self._pending -= 1

    def encode(self, bit: int, c0: int, c1: int) -> None:
        total = c0 + c1
        span = self._high - self._low + 1
        split = self._low + (span * c0) // total - 1
        if bit:
            self._low = split + 1
        else:
            self._high = split
        while True:
            if self._high < _HALF:
                self._emit_with_pending(0)
            elif self._low >= _HALF:
                self._emit_with_pending(1)
                self._low -= _HALF
                self._high -= _HALF
            elif self._low >= _QUARTER and self._high < _THREE_QUARTER:
                self._pending += 1
                self._low -= _QUARTER
                self._high -= _QUARTER
            else:
                break
            self._low = self._low << 1
            self._high = (self._high << 1) | 1

    def encode_ctx(self, bit: int, ctxs: ContextSet, ctx: int) -> None:
        self.encode(bit, ctxs.c0[ctx], ctxs.c1[ctx])
        ctxs.update(ctx, bit)

    def encode_bypass(self, bit: int) -> None:
        self.encode(bit, 1, 1)

    def finish(self) -> bytes:
        # two disambiguation bits pin the final interval
        self._pending += 1
        if self._low < _QUARTER:
            self._emit_with_pending(0)
        else:
            self._emit_with_pending(1)
        if self._nbits:
            self._buf.append((self._acc << (8 - self._nbits)) & 0xFF)
        return bytes(self._buf)


class Decoder:
    def __init__(self, data: bytes):
        self._data = data
        self._pos = 0
        self._bit = 0
        self._low = 0
        self._high = _MAX
        self._code = 0
        for _ in range(_BITS):
            self._code = (self._code << 1) | self._next_bit()

    def _next_bit(self) -> int:
        # reads past the end return zeros, matching the encoder's implicit tail
        if self._pos >= len(self._data):
            return 0
        bit = (self._data[self._pos] >> (7 - self._bit)) & 1
        self._bit += 1
        if self._bit == 8:
            self._bit = 0
            self._pos += 1
        return bit

    def decode(self, c0: int, c1: int) -> int:
        total = c0 + c1
        span = self._high - self._low + 1
        split = self._low + (span * c0) // total - 1
        bit = 1 if self._code > split else 0
        if bit:
            self._low = split + 1
        else:
            self._high = split
        while True:
            if self._high < _HALF:
                pass
            elif self._low >= _HALF:
                self._low -= _HALF
                self._high -= _HALF
                self._code -= _HALF
            elif self._low >= _QUARTER and self._high < _THREE_QUARTER:
                self._low -= _QUARTER
                self._high -= _QUARTER
                self._code -= _QUARTER
            else:
                break
            self._low = self._low << 1
            self._high = (self._high << 1) | 1
            self._code = (self._code << 1) | self._next_bit()
        return bit

    def decode_ctx(self, ctxs: ContextSet, ctx: int) -> int:
        bit = self.decode(ctxs.c0[ctx], ctxs.c1[ctx])
        ctxs.update(ctx, bit)
        return bit

    def decode_bypass(self) -> int:
        return self.decode(1, 1)


# --- exp-Golomb binarization (order 0) -------------------------------------

_EG_PREFIX_CAP = 16


def encode_eg0(enc: Encoder, value: int, ctxs: ContextSet, base_ctx: int, n_prefix_ctx: int) -> None:
    """Code a non-negative integer: unary-coded prefix class, bypass suffix."""
    group = (value + 1).bit_length() - 1
    for i in range(group):
        enc.encode_ctx(1, ctxs, base_ctx + min(i, n_prefix_ctx - 1))
    enc.encode_ctx(0, ctxs, base_ctx + min(group, n_prefix_ctx - 1))
    rem = value + 1 - (1 << group)
    for shift in range(group - 1, -1, -1):
        enc.encode_bypass((rem >> shift) & 1)


def decode_eg0(dec: Decoder, ctxs: ContextSet, base_ctx: int, n_prefix_ctx: int) -> int:
    group = 0
    while dec.decode_ctx(ctxs, base_ctx + min(group, n_prefix_ctx - 1)):
        group += 1
        if group > _EG_PREFIX_CAP:
            raise CorruptStream("exp-Golomb prefix exceeds cap")
    rem = 0
    for _ in range(group):
        rem = (rem << 1) | dec.decode_bypass()
    return (1 << group) - 1 + rem


def eg0_length(value: int) -> int:
    """Bit length of the order-0 exp-Golomb code, used for rate estimates."""
    group = (value + 1).bit_length() - 1
    return 2 * group + 1
