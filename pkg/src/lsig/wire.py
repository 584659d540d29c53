"""Wire envelope for signing-round messages.

Layout (all integers big-endian)::

    version:1 | scheme:1 | session_id:16 | round:1 | sender:4 | length:4 | payload

Round 1 carries the commitment digest (an element of Theta), round 2 the
commitment, round 3 the response, each in the backend's byte encoding.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .idcore import DecodeError, SchemeTag

WIRE_VERSION = 1
_HEADER = struct.Struct(">BB16sBII")


@dataclass(frozen=True)
class Envelope:
    scheme: SchemeTag
    session_id: bytes
    round: int
    sender: int
    payload: bytes

    def encode(self) -> bytes:
        return _HEADER.pack(
            WIRE_VERSION, int(self.scheme), self.session_id, self.round, self.sender, len(self.payload)
        ) + self.payload

    @classmethod
    def decode(cls, data: bytes) -> "Envelope":
        if len(data) < _HEADER.size:
            raise DecodeError("truncated envelope header")
        version, scheme, sid, rnd, sender, length = _HEADER.unpack_from(data)
        if version != WIRE_VERSION:
            raise DecodeError(f"unsupported wire version {version}")
        if rnd not in (1, 2, 3):
            raise DecodeError(f"bad round number {rnd}")
        if len(data) != _HEADER.size + length:
            raise DecodeError("payload length mismatch")
        try:
            tag = SchemeTag(scheme)
        except ValueError:
            raise DecodeError(f"unknown scheme tag {scheme}") from None
        return cls(tag, sid, rnd, sender, data[_HEADER.size:])


def encode_payload(scheme, round_no: int, value) -> bytes:
    if round_no == 1:
        return scheme.encode_challenge(value)
    if round_no == 2:
        return scheme.encode_cmt(value)
    return scheme.encode_rsp(value)


def decode_payload(scheme, round_no: int, data: bytes):
    if round_no == 1:
        return scheme.decode_challenge(data)
    if round_no == 2:
        return scheme.decode_cmt(data)
    return scheme.decode_rsp(data)
