"""Lattice identification over R_q = Z_q[x]/(x^n + 1).

The prover commits to mu slots v_j = a*y1_j + y2_j, answers a small
challenge c by computing s_b*c + y_b_j for every slot, keeps the slots whose
two candidates land in Z, and reveals z_b = s_b*c + sum_j y_b_j. The
verifier checks one linear relation and an infinity-norm bound that grows
with the number of aggregated signers.
"""
from __future__ import annotations

import random
import struct
from dataclasses import dataclass
from importlib import resources
from typing import NamedTuple

from .algebra import ring as R
from .algebra.ring import InvalidRingParams, NotInvertible, RingElement, RingParams, RingVector
from .algebra.sampling import (
    in_box,
    in_C,
    sample_gaussian,
    sample_uniform_C,
    sample_uniform_Rq,
    sample_uniform_Y,
    sample_uniform_Z,
)
from .idcore import (
    ChallengeOutOfSet,
    CommitState,
    DecodeError,
    LinearIdScheme,
    SchemeTag,
    SigningAborted,
)

COEFF_BYTES = 8


class RlweSecret(NamedTuple):
    s1: RingElement
    s2: RingElement


class RlweResponse(NamedTuple):
    z1: RingElement
    z2: RingElement


class RespondDetail(NamedTuple):
    response: RlweResponse
    j_star: int
    accepted: tuple  # slot indices in A
    z1_slot: RingElement
    z2_slot: RingElement


def rlwe_setup(n: int, q: int, sigma: float, mu: int, rng) -> "RlweScheme":
    """Fresh parameters with a uniformly random invertible ``a``."""
    ring = RingParams(n=n, q=q, sigma=sigma, mu=mu)
    while True:
        a = sample_uniform_Rq(ring, rng)
        if R.is_invertible(ring, a):
            return RlweScheme(ring, a)


@dataclass(frozen=True)
class RlweScheme(LinearIdScheme):
    ring: RingParams
    a: RingElement
    tag = SchemeTag.RLWE

    def __post_init__(self):
        if not R.is_valid(self.ring, self.a):
            raise ValueError("a is not a canonical element of R_q")

    # -- keys --------------------------------------------------------------
    def keygen(self, rng):
        s1 = sample_gaussian(self.ring, rng)
        s2 = sample_gaussian(self.ring, rng)
        return self.keygen_from_secret(s1, s2)

    def keygen_from_secret(self, s1, s2):
        u = R.ring_add(self.ring, R.ring_mul(self.ring, self.a, s1), s2)
        return RlweSecret(tuple(s1), tuple(s2)), u

    # -- protocol ----------------------------------------------------------
    def _slot(self, y1, y2) -> RingElement:
        return R.ring_add(self.ring, R.ring_mul(self.ring, self.a, y1), y2)

    def commit(self, rng):
        mu = self.ring.mu
        y1 = tuple(sample_uniform_Y(self.ring, rng) for _ in range(mu))
        y2 = tuple(sample_uniform_Y(self.ring, rng) for _ in range(mu))
        v = tuple(self._slot(y1[j], y2[j]) for j in range(mu))
        return CommitState((y1, y2)), v

    def respond_detailed(self, sk: RlweSecret, state: CommitState, ch, rng) -> RespondDetail:
        if not in_C(self.ring, ch):
            raise ChallengeOutOfSet("challenge is not in C")
        y1, y2 = state.consume()
        ring = self.ring
        g1 = R.ring_mul(ring, sk.s1, ch)
        g2 = R.ring_mul(ring, sk.s2, ch)
        zb = ring.z_bound
        z1s, z2s, accepted = [], [], []
        for j in range(ring.mu):
            # y and s*c are tiny next to q, so integer sums are exact here
            z1 = tuple(x + y for x, y in zip(g1, y1[j]))
            z2 = tuple(x + y for x, y in zip(g2, y2[j]))
            z1s.append(z1)
            z2s.append(z2)
            if in_box(z1, zb) and in_box(z2, zb):
                accepted.append(j)
        if not accepted:
            raise SigningAborted("no commitment slot produced a response inside Z")
        j_star = accepted[rng.randrange(len(accepted))]
        rest1 = R.ring_sum(ring, (y1[j] for j in range(ring.mu) if j != j_star))
        rest2 = R.ring_sum(ring, (y2[j] for j in range(ring.mu) if j != j_star))
        rsp = RlweResponse(
            R.ring_add(ring, R.canon(ring, z1s[j_star]), rest1),
            R.ring_add(ring, R.canon(ring, z2s[j_star]), rest2),
        )
        return RespondDetail(rsp, j_star, tuple(accepted), z1s[j_star], z2s[j_star])

    def respond(self, sk, state, ch, rng=None):
        if rng is None:
            rng = random.SystemRandom()
        return self.respond_detailed(sk, state, ch, rng).response

    def verify(self, pk, t, cmt, ch, rsp) -> bool:
        ring = self.ring
        if t < 1 or not (self.is_pk(pk) and self.is_cmt(cmt) and self.is_rsp(rsp)):
            return False
        if not R.is_valid(ring, ch):
            return False
        eta = ring.eta(t)
        if R.inf_norm(rsp.z1) > eta or R.inf_norm(rsp.z2) > eta:
            return False
        lhs = R.ring_sum(ring, cmt)
        rhs = R.ring_sub(
            ring,
            R.ring_add(ring, R.ring_mul(ring, self.a, rsp.z1), rsp.z2),
            R.ring_mul(ring, pk, ch),
        )
        return lhs == rhs

    def simulate_detailed(self, pk, ch, rng):
        ring = self.ring
        mu = ring.mu
        j_star = rng.randrange(mu)
        z1_slot = sample_uniform_Z(ring, rng)
        z2_slot = sample_uniform_Z(ring, rng)
        v, rest1, rest2 = [], [], []
        for j in range(mu):
            if j == j_star:
                v.append(R.ring_sub(ring, self._slot(z1_slot, z2_slot), R.ring_mul(ring, pk, ch)))
            else:
                y1 = sample_uniform_Y(ring, rng)
                y2 = sample_uniform_Y(ring, rng)
                v.append(self._slot(y1, y2))
                rest1.append(y1)
                rest2.append(y2)
        rsp = RlweResponse(
            R.ring_sum(ring, [z1_slot, *rest1]),
            R.ring_sum(ring, [z2_slot, *rest2]),
        )
        return tuple(v), rsp, j_star, z1_slot, z2_slot

    def simulate(self, pk, ch, rng):
        v, rsp, *_ = self.simulate_detailed(pk, ch, rng)
        return v, rsp

    # -- Theta = C ---------------------------------------------------------
    def sample_challenge(self, rng):
        return sample_uniform_C(self.ring, rng)

    def challenge_from_xof(self, read):
        m = 2 * self.ring.c_bound + 1
        limit = 256 - 256 % m
        half = self.ring.n // 2
        coeffs = []
        while len(coeffs) < half:
            for b in read(half - len(coeffs)):
                if b < limit and len(coeffs) < half:
                    coeffs.append(b % m - self.ring.c_bound)
        return tuple(coeffs) + (0,) * (self.ring.n - half)

    def challenge_from_index(self, index: int) -> RingElement:
        """Bijection from [0, |C|) onto C via base-(2 log n + 1) digits."""
        m = 2 * self.ring.c_bound + 1
        coeffs = []
        for _ in range(self.ring.n // 2):
            index, d = divmod(index, m)
            coeffs.append(d - self.ring.c_bound)
        return tuple(coeffs) + (0,) * (self.ring.n - self.ring.n // 2)

    @property
    def challenge_space_size(self) -> int:
        return (2 * self.ring.c_bound + 1) ** (self.ring.n // 2)

    # -- module structure --------------------------------------------------
    def _lincomb(self, weights, elems):
        ring = self.ring
        return R.ring_sum(ring, (R.ring_mul(ring, w, e) for w, e in zip(weights, elems)))

    def combine_pks(self, weights, pks):
        return self._lincomb(weights, pks)

    def combine_cmts(self, weights, cmts):
        return tuple(
            self._lincomb(weights, [c[j] for c in cmts]) for j in range(self.ring.mu)
        )

    def combine_rsps(self, weights, rsps):
        return RlweResponse(
            self._lincomb(weights, [r.z1 for r in rsps]),
            self._lincomb(weights, [r.z2 for r in rsps]),
        )

    def combine_sks(self, weights, sks):
        return RlweSecret(
            self._lincomb(weights, [s.s1 for s in sks]),
            self._lincomb(weights, [s.s2 for s in sks]),
        )

    # -- membership --------------------------------------------------------
    def is_pk(self, pk) -> bool:
        return R.is_valid(self.ring, pk)

    def is_cmt(self, cmt) -> bool:
        return (
            isinstance(cmt, tuple)
            and len(cmt) == self.ring.mu
            and all(R.is_valid(self.ring, v) for v in cmt)
        )

    def is_rsp(self, rsp) -> bool:
        return isinstance(rsp, RlweResponse) and all(R.is_valid(self.ring, z) for z in rsp)

    def is_challenge(self, ch) -> bool:
        return in_C(self.ring, ch)

    # -- encodings ---------------------------------------------------------
    def encode_params(self) -> bytes:
        r = self.ring
        return struct.pack("<IQdI", r.n, r.q, r.sigma, r.mu) + self._enc_poly(self.a)

    @classmethod
    def decode_params(cls, data: bytes) -> "RlweScheme":
        head = struct.calcsize("<IQdI")
        if len(data) < head:
            raise DecodeError("truncated ring parameters")
        n, q, sigma, mu = struct.unpack_from("<IQdI", data)
        if len(data) != head + n * COEFF_BYTES:
            raise DecodeError("ring parameter block has wrong length")
        try:
            ring = RingParams(n=n, q=q, sigma=sigma, mu=mu)
            scheme = cls(ring, _dec_poly_raw(data[head:], n))
        except ValueError as exc:
            raise DecodeError(str(exc)) from None
        if not R.is_invertible(ring, scheme.a):
            raise DecodeError("public parameter a is not invertible")
        return scheme

    def _enc_poly(self, u) -> bytes:
        return struct.pack(f"<{len(u)}q", *u)

    def _dec_poly(self, data: bytes) -> RingElement:
        if len(data) != self.ring.n * COEFF_BYTES:
            raise DecodeError("ring element has wrong length")
        u = _dec_poly_raw(data, self.ring.n)
        if not R.is_valid(self.ring, u):
            raise DecodeError("coefficient outside canonical range")
        return u

    def _dec_polys(self, data: bytes, count: int) -> tuple:
        size = self.ring.n * COEFF_BYTES
        if len(data) != count * size:
            raise DecodeError("wrong length for ring elements")
        return tuple(self._dec_poly(data[i * size:(i + 1) * size]) for i in range(count))

    encode_pk = _enc_poly
    decode_pk = _dec_poly

    def encode_challenge(self, ch) -> bytes:
        return self._enc_poly(ch)

    def decode_challenge(self, data: bytes):
        c = self._dec_poly(data)
        if not in_C(self.ring, c):
            raise DecodeError("challenge is not in C")
        return c

    def encode_sk(self, sk) -> bytes:
        return self._enc_poly(sk.s1) + self._enc_poly(sk.s2)

    def decode_sk(self, data: bytes):
        return RlweSecret(*self._dec_polys(data, 2))

    def encode_cmt(self, cmt) -> bytes:
        return b"".join(self._enc_poly(v) for v in cmt)

    def decode_cmt(self, data: bytes):
        return self._dec_polys(data, self.ring.mu)

    def encode_rsp(self, rsp) -> bytes:
        return self._enc_poly(rsp.z1) + self._enc_poly(rsp.z2)

    def decode_rsp(self, data: bytes):
        return RlweResponse(*self._dec_polys(data, 2))


def _dec_poly_raw(data: bytes, n: int) -> RingElement:
    return struct.unpack(f"<{n}q", data)


def load_rlwe_params(text: str) -> RlweScheme:
    """Parse ``key = value`` lines; ``a`` is a comma-separated coefficient list."""
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    try:
        ring = RingParams(
            n=int(fields["n"]), q=int(fields["q"]), sigma=float(fields["sigma"]), mu=int(fields["mu"])
        )
        a = tuple(int(c) for c in fields["a"].split(","))
    except KeyError as exc:
        raise InvalidRingParams(f"missing field {exc}") from None
    if len(a) != ring.n:
        raise InvalidRingParams(f"a has {len(a)} coefficients, expected {ring.n}")
    scheme = RlweScheme(ring, a)
    if not R.is_invertible(ring, a):
        raise ValueError("public parameter a is not invertible")
    return scheme


def dump_rlwe_params(scheme: RlweScheme) -> str:
    r = scheme.ring
    return (
        f"n = {r.n}\nq = {r.q}\nsigma = {r.sigma!r}\nmu = {r.mu}\n"
        f"a = {', '.join(map(str, scheme.a))}\n"
    )


def desk_scheme() -> RlweScheme:
    """Desk-scale parameters shipped with the package (n=16, sigma=2, mu=16)."""
    text = resources.files("lsig.data").joinpath("rlwe-desk.params").read_text()
    return load_rlwe_params(text)


__all__ = [
    "NotInvertible",
    "RespondDetail",
    "RlweResponse",
    "RlweScheme",
    "RlweSecret",
    "RingVector",
    "rlwe_setup",
]
