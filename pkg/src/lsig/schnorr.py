"""Schnorr identification over a prime-order subgroup of Z_p^*.

Keys, commitments and the module action follow Z_q acting on <g> by
exponentiation; responses and secrets live in Z_q. The verification
parameter t is accepted for interface uniformity and ignored.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .algebra.group import GroupParams, group_exp, group_inv, in_subgroup, powmod
from .idcore import CommitState, DecodeError, LinearIdScheme, SchemeTag


@dataclass(frozen=True)
class SchnorrScheme(LinearIdScheme):
    params: GroupParams
    tag = SchemeTag.SCHNORR

    def keygen(self, rng):
        s = rng.randrange(self.params.q)
        return s, group_exp(self.params, self.params.g, s)

    def keygen_from_secret(self, s: int):
        return s % self.params.q, group_exp(self.params, self.params.g, s)

    def commit(self, rng):
        x = rng.randrange(self.params.q)
        return CommitState(x), group_exp(self.params, self.params.g, x)

    def respond(self, sk, state, ch, rng=None):
        x = state.consume()
        return (sk * ch + x) % self.params.q

    def verify(self, pk, t, cmt, ch, rsp) -> bool:
        P = self.params
        if not (self.is_pk(pk) and self.is_cmt(cmt) and self.is_rsp(rsp) and self.is_challenge(ch)):
            return False
        return powmod(P.g, rsp, P.p) == powmod(pk, ch, P.p) * cmt % P.p

    def simulate(self, pk, ch, rng):
        P = self.params
        z = rng.randrange(P.q)
        X = powmod(P.g, z, P.p) * group_inv(P, powmod(pk, ch, P.p)) % P.p
        return X, z

    # -- Theta = Z_q -------------------------------------------------------
    def sample_challenge(self, rng):
        return rng.randrange(self.params.q)

    def challenge_from_xof(self, read):
        q = self.params.q
        bits = q.bit_length()
        nbytes = (bits + 7) // 8
        mask = (1 << bits) - 1
        while True:
            v = int.from_bytes(read(nbytes), "big") & mask
            if v < q:
                return v

    # -- module structure --------------------------------------------------
    def combine_pks(self, weights, pks):
        P = self.params
        acc = 1
        for lam, x in zip(weights, pks):
            acc = acc * powmod(x, lam, P.p) % P.p
        return acc

    combine_cmts = combine_pks

    def combine_rsps(self, weights, rsps):
        return sum(lam * z for lam, z in zip(weights, rsps)) % self.params.q

    # -- membership --------------------------------------------------------
    def is_pk(self, pk) -> bool:
        return type(pk) is int and in_subgroup(self.params, pk)

    is_cmt = is_pk

    def is_rsp(self, rsp) -> bool:
        return type(rsp) is int and 0 <= rsp < self.params.q

    is_challenge = is_rsp

    # -- encodings ---------------------------------------------------------
    def encode_params(self) -> bytes:
        P = self.params
        w = P.element_bytes
        return struct.pack("<H", w) + b"".join(v.to_bytes(w, "little") for v in (P.p, P.q, P.g))

    @classmethod
    def decode_params(cls, data: bytes) -> "SchnorrScheme":
        if len(data) < 2:
            raise DecodeError("truncated group parameters")
        (w,) = struct.unpack_from("<H", data)
        if len(data) != 2 + 3 * w:
            raise DecodeError("group parameter block has wrong length")
        p, q, g = (int.from_bytes(data[2 + i * w:2 + (i + 1) * w], "little") for i in range(3))
        try:
            return cls(GroupParams(p, q, g).validate())
        except ValueError as exc:
            raise DecodeError(str(exc)) from None

    def _enc_elem(self, x: int) -> bytes:
        return x.to_bytes(self.params.element_bytes, "big")

    def _dec_elem(self, data: bytes) -> int:
        if len(data) != self.params.element_bytes:
            raise DecodeError("group element has wrong length")
        x = int.from_bytes(data, "big")
        if not in_subgroup(self.params, x):
            raise DecodeError("value is not in the prime-order subgroup")
        return x

    def _enc_scalar(self, s: int) -> bytes:
        return s.to_bytes(self.params.scalar_bytes, "big")

    def _dec_scalar(self, data: bytes) -> int:
        if len(data) != self.params.scalar_bytes:
            raise DecodeError("scalar has wrong length")
        s = int.from_bytes(data, "big")
        if s >= self.params.q:
            raise DecodeError("scalar out of range")
        return s

    encode_pk = encode_cmt = _enc_elem
    decode_pk = decode_cmt = _dec_elem
    encode_sk = encode_rsp = encode_challenge = _enc_scalar
    decode_sk = decode_rsp = decode_challenge = _dec_scalar
