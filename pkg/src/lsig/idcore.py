"""Canonical linear identification schemes.

A backend supplies the three-move protocol (commit, respond, verify), a
transcript simulator, sampling from the challenge set Theta and the module
structure on keys, commitments and responses. The aggregation helpers here
are backend-agnostic: they validate that every operand belongs to the
scheme before any arithmetic happens.
"""
from __future__ import annotations

import abc
import enum
from dataclasses import dataclass
from typing import Any, Callable, Sequence


class SchemeTag(enum.IntEnum):
    SCHNORR = 1
    RLWE = 2


class SchemeMismatch(ValueError):
    """An operand does not belong to the scheme it is used with."""


class DecodeError(ValueError):
    pass


class NonceReuseError(RuntimeError):
    """A commit state was handed to respond a second time."""


class ChallengeOutOfSet(ValueError):
    pass


class SigningAborted(Exception):
    """The prover has no usable commitment slot (lattice backend only)."""


@dataclass
class CommitState:
    """Secret prover state between commit and respond; single use."""
    secret: Any
    spent: bool = False

    def consume(self):
        if self.spent:
            raise NonceReuseError("commit state already used")
        self.spent = True
        return self.secret


@dataclass(frozen=True)
class Transcript:
    cmt: Any
    ch: Any
    rsp: Any


class LinearIdScheme(abc.ABC):
    tag: SchemeTag

    # -- protocol ----------------------------------------------------------
    @abc.abstractmethod
    def keygen(self, rng) -> tuple[Any, Any]:
        """Return (sk, pk)."""

    @abc.abstractmethod
    def commit(self, rng) -> tuple[CommitState, Any]:
        ...

    @abc.abstractmethod
    def respond(self, sk, state: CommitState, ch, rng=None):
        ...

    @abc.abstractmethod
    def verify(self, pk, t: int, cmt, ch, rsp) -> bool:
        ...

    @abc.abstractmethod
    def simulate(self, pk, ch, rng) -> tuple[Any, Any]:
        """Return (cmt, rsp) forming an accepting transcript with ``ch``."""

    # -- challenge set -----------------------------------------------------
    @abc.abstractmethod
    def sample_challenge(self, rng):
        ...

    @abc.abstractmethod
    def challenge_from_xof(self, read: Callable[[int], bytes]):
        """Map an unbounded byte stream to a uniform element of Theta."""

    # -- module structure --------------------------------------------------
    @abc.abstractmethod
    def combine_pks(self, weights: Sequence, pks: Sequence):
        ...

    @abc.abstractmethod
    def combine_cmts(self, weights: Sequence, cmts: Sequence):
        ...

    @abc.abstractmethod
    def combine_rsps(self, weights: Sequence, rsps: Sequence):
        ...

    # -- membership --------------------------------------------------------
    @abc.abstractmethod
    def is_pk(self, pk) -> bool: ...

    @abc.abstractmethod
    def is_cmt(self, cmt) -> bool: ...

    @abc.abstractmethod
    def is_rsp(self, rsp) -> bool: ...

    @abc.abstractmethod
    def is_challenge(self, ch) -> bool: ...

    # -- encodings ---------------------------------------------------------
    @abc.abstractmethod
    def encode_params(self) -> bytes: ...

    @abc.abstractmethod
    def encode_pk(self, pk) -> bytes: ...

    @abc.abstractmethod
    def decode_pk(self, data: bytes): ...

    @abc.abstractmethod
    def encode_sk(self, sk) -> bytes: ...

    @abc.abstractmethod
    def decode_sk(self, data: bytes): ...

    @abc.abstractmethod
    def encode_cmt(self, cmt) -> bytes: ...

    @abc.abstractmethod
    def decode_cmt(self, data: bytes): ...

    @abc.abstractmethod
    def encode_rsp(self, rsp) -> bytes: ...

    @abc.abstractmethod
    def decode_rsp(self, data: bytes): ...

    @abc.abstractmethod
    def encode_challenge(self, ch) -> bytes: ...

    @abc.abstractmethod
    def decode_challenge(self, data: bytes): ...


def _check(scheme: LinearIdScheme, weights, items, member, what: str):
    if len(weights) != len(items):
        raise ValueError(f"{len(weights)} weights for {len(items)} {what}")
    if not items:
        raise ValueError(f"no {what} to aggregate")
    for w in weights:
        if not scheme.is_challenge(w):
            raise SchemeMismatch(f"weight {w!r} is not in the challenge set")
    for x in items:
        if not member(x):
            raise SchemeMismatch(f"operand is not a {scheme.tag.name} {what[:-1]}")


def aggregate_keys(scheme: LinearIdScheme, weights: Sequence, pks: Sequence):
    """Module-weighted sum of public keys."""
    _check(scheme, weights, pks, scheme.is_pk, "keys")
    return scheme.combine_pks(weights, pks)


def aggregate_commitments(scheme: LinearIdScheme, weights: Sequence, cmts: Sequence):
    _check(scheme, weights, cmts, scheme.is_cmt, "commitments")
    return scheme.combine_cmts(weights, cmts)


def aggregate_responses(scheme: LinearIdScheme, weights: Sequence, rsps: Sequence):
    _check(scheme, weights, rsps, scheme.is_rsp, "responses")
    return scheme.combine_rsps(weights, rsps)


def verify_aggregated(scheme: LinearIdScheme, agg_pk, t: int, transcript: Transcript) -> bool:
    if t < 1:
        raise ValueError("t must be positive")
    try:
        return scheme.verify(agg_pk, t, transcript.cmt, transcript.ch, transcript.rsp)
    except (TypeError, ValueError, ArithmeticError):
        return False
