"""Versioned container for keys, aggregated keys and signatures.

Layout (integers big-endian)::

    "LSIG" | version:1 | scheme:1 | len:4 | params | len:4 | payload | crc32:4

The checksum covers every preceding byte. A payload starts with a kind byte
followed by length-prefixed fields, so each file type can be told apart and
parsed without knowing field widths in advance.
"""
from __future__ import annotations

import enum
import struct
import zlib
from dataclasses import dataclass

from .idcore import DecodeError, SchemeMismatch, SchemeTag
from .multisig import AggregatedKey, MultiSignature
from .rlwe import RlweScheme
from .schnorr import SchnorrScheme

MAGIC = b"LSIG"
FORMAT_VERSION = 1
_U32 = struct.Struct(">I")


class Kind(enum.IntEnum):
    PUBLIC_KEY = 1
    SECRET_KEY = 2
    AGGREGATED_KEY = 3
    SIGNATURE = 4


@dataclass(frozen=True)
class LsigFile:
    scheme_tag: SchemeTag
    params: bytes
    payload: bytes

    def encode(self) -> bytes:
        body = (
            MAGIC
            + bytes([FORMAT_VERSION, int(self.scheme_tag)])
            + _U32.pack(len(self.params)) + self.params
            + _U32.pack(len(self.payload)) + self.payload
        )
        return body + _U32.pack(zlib.crc32(body))

    @classmethod
    def decode(cls, data: bytes) -> "LsigFile":
        if len(data) < 4 + 2 + 4 + 4 + 4:
            raise DecodeError("file too short")
        if data[:4] != MAGIC:
            raise DecodeError("bad magic, not an LSIG file")
        body, (crc,) = data[:-4], _U32.unpack(data[-4:])
        if zlib.crc32(body) != crc:
            raise DecodeError("checksum mismatch (file corrupted or truncated)")
        version, tag = body[4], body[5]
        if version != FORMAT_VERSION:
            raise DecodeError(f"unsupported format version {version}")
        try:
            scheme_tag = SchemeTag(tag)
        except ValueError:
            raise DecodeError(f"unknown scheme tag {tag:#04x}") from None
        params, pos = _take(body, 6)
        payload, pos = _take(body, pos)
        if pos != len(body):
            raise DecodeError("trailing bytes after payload")
        return cls(scheme_tag, params, payload)


def _take(data: bytes, pos: int) -> tuple[bytes, int]:
    if pos + 4 > len(data):
        raise DecodeError("truncated length field")
    (n,) = _U32.unpack_from(data, pos)
    end = pos + 4 + n
    if end > len(data):
        raise DecodeError("truncated field")
    return data[pos + 4:end], end


def _fields(*parts: bytes) -> bytes:
    return b"".join(_U32.pack(len(p)) + p for p in parts)


def _kind_name(kind: Kind) -> str:
    return kind.name.lower().replace("_", " ")


def _split(payload: bytes, kind: Kind, count: int) -> list[bytes]:
    if not payload or payload[0] != kind:
        try:
            found = _kind_name(Kind(payload[0])) + " file"
        except (IndexError, ValueError):
            found = "an unknown payload kind"
        raise DecodeError(f"expected a {_kind_name(kind)} file, found {found}")
    out, pos = [], 1
    for _ in range(count):
        part, pos = _take(payload, pos)
        out.append(part)
    if pos != len(payload):
        raise DecodeError("trailing bytes in payload")
    return out


# -- scheme-aware helpers ------------------------------------------------------

def scheme_from_params(tag: SchemeTag, params: bytes):
    if tag is SchemeTag.SCHNORR:
        return SchnorrScheme.decode_params(params)
    return RlweScheme.decode_params(params)


def _wrap(scheme, kind: Kind, *parts: bytes) -> bytes:
    return LsigFile(scheme.tag, scheme.encode_params(), bytes([kind]) + _fields(*parts)).encode()


def _unwrap(data: bytes, kind: Kind, count: int, scheme=None):
    f = LsigFile.decode(data)
    file_scheme = scheme_from_params(f.scheme_tag, f.params)
    if scheme is not None and (scheme.tag != f.scheme_tag or scheme.encode_params() != f.params):
        raise SchemeMismatch("file was produced under a different scheme or parameter set")
    return file_scheme, _split(f.payload, kind, count)


def dump_public_key(scheme, pk) -> bytes:
    return _wrap(scheme, Kind.PUBLIC_KEY, scheme.encode_pk(pk))


def load_public_key(data: bytes, scheme=None):
    scheme, (pk,) = _unwrap(data, Kind.PUBLIC_KEY, 1, scheme)
    return scheme, scheme.decode_pk(pk)


def dump_secret_key(scheme, sk, pk) -> bytes:
    return _wrap(scheme, Kind.SECRET_KEY, scheme.encode_sk(sk), scheme.encode_pk(pk))


def load_secret_key(data: bytes, scheme=None):
    scheme, (sk, pk) = _unwrap(data, Kind.SECRET_KEY, 2, scheme)
    return scheme, scheme.decode_sk(sk), scheme.decode_pk(pk)


def dump_aggregated_key(agg: AggregatedKey) -> bytes:
    return _wrap(agg.scheme, Kind.AGGREGATED_KEY, _U32.pack(agg.t), agg.scheme.encode_pk(agg.pk_bar))


def load_aggregated_key(data: bytes, scheme=None) -> AggregatedKey:
    scheme, (t, pk) = _unwrap(data, Kind.AGGREGATED_KEY, 2, scheme)
    if len(t) != 4:
        raise DecodeError("bad signer count field")
    (t,) = _U32.unpack(t)
    if t < 1:
        raise DecodeError("signer count must be positive")
    return AggregatedKey(scheme, scheme.decode_pk(pk), t)


def dump_signature(scheme, sig: MultiSignature) -> bytes:
    return _wrap(scheme, Kind.SIGNATURE, scheme.encode_cmt(sig.cmt_bar), scheme.encode_rsp(sig.rsp_bar))


def load_signature(data: bytes, scheme=None):
    scheme, (cmt, rsp) = _unwrap(data, Kind.SIGNATURE, 2, scheme)
    return scheme, MultiSignature(scheme.decode_cmt(cmt), scheme.decode_rsp(rsp))
