"""Fixed-layout binary encoding helpers and the payment_info convention."""

from __future__ import annotations

import os
import struct

from . import groups as grp


class DecodeError(ValueError):
    pass


class Reader:
    def __init__(self, data: bytes):
        self.data = bytes(data)
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise DecodeError("truncated encoding")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def u16(self) -> int:
        return struct.unpack(">H", self.take(2))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(4))[0]

    def _elem(self, cls, n):
        try:
            return cls.from_bytes(self.take(n))
        except DecodeError:
            raise
        except ValueError as exc:
            raise DecodeError(str(exc)) from None

    def g1(self):
        return self._elem(grp.G1, grp.G1_LEN)

    def g2(self):
        return self._elem(grp.G2, grp.G2_LEN)

    def gt(self):
        return self._elem(grp.GT, grp.GT_LEN)

    def scalar(self) -> int:
        try:
            return grp.scalar_from_bytes(self.take(grp.SCALAR_LEN))
        except DecodeError:
            raise
        except ValueError as exc:
            raise DecodeError(str(exc)) from None

    def done(self):
        if self.pos != len(self.data):
            raise DecodeError(f"{len(self.data) - self.pos} trailing bytes")


def pack(*items) -> bytes:
    out = bytearray()
    for it in items:
        if isinstance(it, (bytes, bytearray)):
            out += it
        elif isinstance(it, int):
            out += grp.scalar_to_bytes(it)
        else:
            out += it.to_bytes()
    return bytes(out)


NONCE_LEN = 16


def make_payment_info(provider_id: str, nonce: bytes | None = None, extra: bytes = b"") -> bytes:
    """provider_id || nonce || free bytes, with a 2-byte length on the id."""
    pid = provider_id.encode()
    if not pid or len(pid) > 0xFFFF:
        raise ValueError("provider id must be 1..65535 bytes")
    if nonce is None:
        nonce = os.urandom(NONCE_LEN)
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes")
    return struct.pack(">H", len(pid)) + pid + nonce + bytes(extra)


def provider_of(info: bytes) -> str:
    if len(info) < 2:
        raise DecodeError("payment_info too short")
    n = struct.unpack(">H", info[:2])[0]
    if n == 0 or len(info) < 2 + n + NONCE_LEN:
        raise DecodeError("payment_info lacks a provider id and nonce")
    try:
        return info[2 : 2 + n].decode()
    except UnicodeDecodeError:
        raise DecodeError("provider id is not UTF-8") from None
