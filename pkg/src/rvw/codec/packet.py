"""Serialized reconstruction payload: header, streams, overflow list, CRC.

Layout (all multi-byte integers little-endian):

    magic "RGFT" | version u8 | roi x0,y0,w,h u16 each | qp u8 | mu index u8
    | block size u8 | plane count u8
    | contour stream: u32 length + bytes
    | per plane: choice stream u32 length + bytes, coeff stream u32 length + bytes
    | overflow list: u32 count + (x u16, y u16, residual s16) triples
    | crc32 u32 over every preceding byte
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass, field, replace

from ..errors import CorruptStream, CrcMismatch, UnsupportedVersion
from ..image import Roi

__all__ = ["CodedPacket", "PACKET_VERSION"]

_MAGIC = b"RGFT"
PACKET_VERSION = 1

_HEADER = struct.Struct("<4sBHHHHBBBB")


@dataclass(frozen=True)
class CodedPacket:
    """One plane's coded reconstruction data plus restoration side info."""

    roi: Roi
    qp: int
    mu_index: int
    block_size: int
    contour_stream: bytes
    choice_stream: bytes
    coeff_stream: bytes
    overflow: tuple = field(default_factory=tuple)
    plane_count: int = 1

    def with_overflow(self, entries) -> "CodedPacket":
        return replace(self, overflow=tuple((int(x), int(y), int(r)) for x, y, r in entries))

    def to_bytes(self) -> bytes:
        out = bytearray()
        out += _HEADER.pack(
            _MAGIC,
            PACKET_VERSION,
            self.roi.x0,
            self.roi.y0,
            self.roi.width,
            self.roi.height,
            self.qp,
            self.mu_index,
            self.block_size,
            self.plane_count,
        )
        out += len(self.contour_stream).to_bytes(4, "little") + self.contour_stream
        out += len(self.choice_stream).to_bytes(4, "little") + self.choice_stream
        out += len(self.coeff_stream).to_bytes(4, "little") + self.coeff_stream
        out += len(self.overflow).to_bytes(4, "little")
        for x, y, residual in self.overflow:
            out += struct.pack("<HHh", x, y, residual)
        out += zlib.crc32(bytes(out)).to_bytes(4, "little")
        return bytes(out)

    @property
    def bit_length(self) -> int:
        return 8 * len(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "CodedPacket":
        if len(data) < _HEADER.size + 4:
            raise CorruptStream("packet shorter than its fixed header")
        stored = int.from_bytes(data[-4:], "little")
        if zlib.crc32(data[:-4]) != stored:
            raise CrcMismatch("packet checksum mismatch")
        try:
            magic, version, x0, y0, w, h, qp, mu_index, block_size, planes = _HEADER.unpack_from(
                data, 0
            )
        except struct.error as exc:
            raise CorruptStream(f"bad packet header: {exc}") from exc
        if magic != _MAGIC:
            raise CorruptStream("bad packet magic")
        if version != PACKET_VERSION:
            raise UnsupportedVersion(f"packet version {version} unsupported")
        if w == 0 or h == 0 or w * h > 1 << 26:
            raise CorruptStream("implausible roi extent")
        pos = _HEADER.size
        body = data[:-4]

        def take_stream() -> bytes:
            nonlocal pos
            if pos + 4 > len(body):
                raise CorruptStream("packet stream length truncated")
            n = int.from_bytes(body[pos : pos + 4], "little")
            pos += 4
            if pos + n > len(body):
                raise CorruptStream("packet stream body truncated")
            chunk = body[pos : pos + n]
            pos += n
            return chunk

        contour = take_stream()
        choice = take_stream()
        coeff = take_stream()
        if pos + 4 > len(body):
            raise CorruptStream("overflow count truncated")
        count = int.from_bytes(body[pos : pos + 4], "little")
        pos += 4
        if pos + 6 * count != len(body):
            raise CorruptStream("overflow list size mismatch")
        overflow = []
        for _ in range(count):
            x, y, residual = struct.unpack_from("<HHh", body, pos)
            pos += 6
            overflow.append((x, y, residual))
        return cls(
            roi=Roi(x0, y0, w, h),
            qp=qp,
            mu_index=mu_index,
            block_size=block_size,
            contour_stream=contour,
            choice_stream=choice,
            coeff_stream=coeff,
            overflow=tuple(overflow),
            plane_count=planes,
        )
