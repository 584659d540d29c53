"""Key-and-signature compact multi-signatures from a linear ID scheme.

Each signer weights its key by lambda_i = H0(pk_i, PK). Signing is three
broadcast rounds: a hash of the commitment, the commitment itself, then the
response to CH = H1(pk_bar | CMT_bar | M). The signature (CMT_bar, Rsp_bar)
verifies against (pk_bar, t) alone.

Sessions are reactive state machines. They never talk to a network and
never restart: any inconsistency ends the session in ``Phase.ABORTED``.
"""
from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .idcore import (
    LinearIdScheme,
    SigningAborted,
    aggregate_commitments,
    aggregate_keys,
    aggregate_responses,
)

log = logging.getLogger(__name__)

H0 = 0x00
H1 = 0x01


# -- hashing into Theta ------------------------------------------------------

def frame(*fields: bytes) -> bytes:
    """Length-prefix each field (8-byte big-endian) and concatenate."""
    return b"".join(len(f).to_bytes(8, "big") + f for f in fields)


class XofReader:
    """Sequential reader over the SHAKE-256 output stream of ``data``."""

    def __init__(self, data: bytes):
        self._xof = hashlib.shake_256(data)
        self._buf = b""
        self._pos = 0

    def read(self, k: int) -> bytes:
        end = self._pos + k
        if end > len(self._buf):
            self._buf = self._xof.digest(max(2 * len(self._buf), end, 64))
        out = self._buf[self._pos:end]
        self._pos = end
        return out


def hash_to_theta(domain: int, data: bytes, scheme: LinearIdScheme):
    """Random-oracle style map from bytes to the challenge set of ``scheme``."""
    return scheme.challenge_from_xof(XofReader(bytes([domain]) + data).read)


# -- keys --------------------------------------------------------------------

class DuplicateKeys(ValueError):
    pass


class SignerSet:
    """A set of distinct public keys, held in canonical (sorted) order."""

    def __init__(self, scheme: LinearIdScheme, pks: Sequence):
        encoded = [(scheme.encode_pk(pk), pk) for pk in pks]
        encoded.sort(key=lambda e: e[0])
        for (a, _), (b, _) in zip(encoded, encoded[1:]):
            if a == b:
                raise DuplicateKeys("public keys in a signer set must be distinct")
        if not encoded:
            raise ValueError("empty signer set")
        self.scheme = scheme
        self.pks = tuple(pk for _, pk in encoded)
        self._encoded = tuple(e for e, _ in encoded)
        self.canonical_encoding = b"".join(self._encoded)
        self._weights = None  # both derived from the keys alone, so computed once
        self._agg = None

    def __len__(self):
        return len(self.pks)

    def __contains__(self, pk):
        return pk in self.pks

    def index(self, pk) -> int:
        return self.pks.index(pk)

    def encoded(self, i: int) -> bytes:
        return self._encoded[i]


@dataclass(frozen=True)
class AggregatedKey:
    scheme: LinearIdScheme
    pk_bar: Any
    t: int


@dataclass(frozen=True)
class MultiSignature:
    cmt_bar: Any
    rsp_bar: Any


def aggregation_weights(signer_set: SignerSet) -> tuple:
    if signer_set._weights is None:
        scheme = signer_set.scheme
        signer_set._weights = tuple(
            hash_to_theta(H0, frame(signer_set.encoded(i), signer_set.canonical_encoding), scheme)
            for i in range(len(signer_set))
        )
    return signer_set._weights


def key_aggregate(signer_set: SignerSet) -> AggregatedKey:
    if signer_set._agg is None:
        weights = aggregation_weights(signer_set)
        pk_bar = aggregate_keys(signer_set.scheme, weights, signer_set.pks)
        signer_set._agg = AggregatedKey(signer_set.scheme, pk_bar, len(signer_set))
    return signer_set._agg


def commitment_digest(scheme: LinearIdScheme, cmt, pk):
    return hash_to_theta(H0, frame(scheme.encode_cmt(cmt), scheme.encode_pk(pk)), scheme)


def signing_challenge(agg_key: AggregatedKey, cmt_bar, message: bytes):
    scheme = agg_key.scheme
    data = frame(scheme.encode_pk(agg_key.pk_bar), scheme.encode_cmt(cmt_bar), message)
    return hash_to_theta(H1, data, scheme)


def verify(agg_key: AggregatedKey, message: bytes, sig: MultiSignature) -> bool:
    """Check ``sig`` on ``message`` against the aggregated key only."""
    scheme = agg_key.scheme
    if not (scheme.is_cmt(sig.cmt_bar) and scheme.is_rsp(sig.rsp_bar)):
        return False
    ch = signing_challenge(agg_key, sig.cmt_bar, message)
    return scheme.verify(agg_key.pk_bar, agg_key.t, sig.cmt_bar, ch, sig.rsp_bar)


# -- signing sessions --------------------------------------------------------

class Phase(enum.Enum):
    INIT = "init"
    SENT_R1 = "sent_r1"
    SENT_CMT = "sent_cmt"
    SENT_RSP = "sent_rsp"
    DONE = "done"
    ABORTED = "aborted"


class PhaseError(RuntimeError):
    pass


class MissingMessages(RuntimeError):
    """Not every signer's message for the round is present; state unchanged."""


class SessionAborted(Exception):
    """The session ended without a signature (the protocol's bottom output)."""


class CommitmentMismatch(SessionAborted):
    pass


@dataclass
class SignSession:
    scheme: LinearIdScheme
    sk: Any
    pk: Any
    signer_set: SignerSet
    message: bytes
    phase: Phase = Phase.INIT
    received_r1: dict = field(default_factory=dict)
    received_cmts: dict = field(default_factory=dict)
    received_rsps: dict = field(default_factory=dict)
    abort_reason: str | None = None
    signature: MultiSignature | None = None

    def __post_init__(self):
        if self.pk not in self.signer_set:
            raise ValueError("own public key is not in the signer set")
        self.my_index = self.signer_set.index(self.pk)
        self.weights = aggregation_weights(self.signer_set)
        self.agg_key = key_aggregate(self.signer_set)
        self._state = None
        self._cmt = None
        self._rng = None

    @property
    def t(self) -> int:
        return len(self.signer_set)

    def _expect(self, phase: Phase):
        if self.phase is not phase:
            raise PhaseError(f"expected phase {phase.value}, session is {self.phase.value}")

    def _require_all(self, received: Mapping):
        missing = [j for j in range(self.t) if j not in received]
        if missing:
            raise MissingMessages(f"waiting for signers {missing}")

    def abort(self, reason: str, exc=SessionAborted):
        self.phase = Phase.ABORTED
        self.abort_reason = reason
        log.debug("signer %d aborted: %s", self.my_index, reason)
        raise exc(reason)

    def round1(self, rng):
        """Commit and return r_i = H0(CMT_i | pk_i) for broadcast."""
        self._expect(Phase.INIT)
        self._rng = rng
        self._state, self._cmt = self.scheme.commit(rng)
        r = commitment_digest(self.scheme, self._cmt, self.pk)
        self.phase = Phase.SENT_R1
        return r

    def round2(self, received_r1: Mapping[int, Any]):
        """Register every r_j and release our own commitment."""
        self._expect(Phase.SENT_R1)
        self._require_all(received_r1)
        for j in range(self.t):
            if not self.scheme.is_challenge(received_r1[j]):
                self.abort(f"malformed round-1 digest from signer {j}")
        self.received_r1 = {j: received_r1[j] for j in range(self.t)}
        self.phase = Phase.SENT_CMT
        return self._cmt

    def round3(self, received_cmts: Mapping[int, Any]):
        """Check commitments against their digests and answer the challenge."""
        self._expect(Phase.SENT_CMT)
        self._require_all(received_cmts)
        scheme = self.scheme
        for j in range(self.t):
            cmt = received_cmts[j]
            if not scheme.is_cmt(cmt):
                self.abort(f"malformed commitment from signer {j}", CommitmentMismatch)
            if commitment_digest(scheme, cmt, self.signer_set.pks[j]) != self.received_r1[j]:
                self.abort(f"commitment of signer {j} does not match its digest", CommitmentMismatch)
        self.received_cmts = {j: received_cmts[j] for j in range(self.t)}
        cmt_bar = aggregate_commitments(scheme, self.weights, [self.received_cmts[j] for j in range(self.t)])
        self._cmt_bar = cmt_bar
        ch = signing_challenge(self.agg_key, cmt_bar, self.message)
        try:
            rsp = scheme.respond(self.sk, self._state, ch, self._rng)
        except SigningAborted as exc:
            self.abort(f"prover aborted: {exc}")
        self.phase = Phase.SENT_RSP
        return rsp

    def finish(self, received_rsps: Mapping[int, Any]) -> MultiSignature:
        self._expect(Phase.SENT_RSP)
        self._require_all(received_rsps)
        for j in range(self.t):
            if not self.scheme.is_rsp(received_rsps[j]):
                self.abort(f"malformed response from signer {j}")
        self.received_rsps = {j: received_rsps[j] for j in range(self.t)}
        rsp_bar = aggregate_responses(
            self.scheme, self.weights, [self.received_rsps[j] for j in range(self.t)]
        )
        self.signature = MultiSignature(self._cmt_bar, rsp_bar)
        self.phase = Phase.DONE
        return self.signature
