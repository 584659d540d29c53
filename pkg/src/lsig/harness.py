"""In-process multi-signer simulation.

Signers exchange wire envelopes over a :class:`Bus`. Scheduling is
round-synchronous: every round-k message is sent before any signer
processes round k+1. An :class:`Interceptor` sits on the bus and may drop,
rewrite or reorder traffic, which is how the adversarial scenarios are
expressed. With a fixed seed the whole run, including the message trace, is
reproducible byte for byte.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Any

from .algebra.group import group_exp, group_inv
from .idcore import DecodeError, LinearIdScheme, SchemeTag, SigningAborted
from .multisig import (
    H1,
    AggregatedKey,
    MissingMessages,
    MultiSignature,
    Phase,
    SessionAborted,
    SignerSet,
    SignSession,
    frame,
    hash_to_theta,
    key_aggregate,
    verify,
)
from .schnorr import SchnorrScheme
from .wire import Envelope, decode_payload, encode_payload


def make_rng(seed=None) -> random.Random:
    return random.SystemRandom() if seed is None else random.Random(seed)


def generate_keypairs(scheme: LinearIdScheme, t: int, rng) -> list:
    """t key pairs with pairwise distinct public keys."""
    pairs, seen = [], set()
    while len(pairs) < t:
        sk, pk = scheme.keygen(rng)
        enc = scheme.encode_pk(pk)
        if enc not in seen:
            seen.add(enc)
            pairs.append((sk, pk))
    return pairs


# -- bus and interception ----------------------------------------------------

class Policy(enum.Enum):
    PASS = "pass"
    DROP = "drop"
    SUBSTITUTE = "substitute"
    REORDER = "reorder"


@dataclass
class Interceptor:
    """Deterministic man-in-the-middle on the bus.

    DROP and SUBSTITUTE act on the single broadcast matching (round, sender);
    a SUBSTITUTE without ``payload`` writes random bytes of the original
    length. REORDER shuffles every delivery batch.
    """
    policy: Policy = Policy.PASS
    round: int | None = None
    sender: int | None = None
    payload: bytes | None = None
    seed: int = 0
    observed: int = 0

    def __post_init__(self):
        self._rng = random.Random(self.seed)

    def _targets(self, env: Envelope) -> bool:
        return env.round == self.round and env.sender == self.sender

    def on_send(self, env: Envelope) -> Envelope | None:
        self.observed += 1
        if self.policy is Policy.DROP and self._targets(env):
            return None
        if self.policy is Policy.SUBSTITUTE and self._targets(env):
            payload = self.payload
            if payload is None:
                payload = self._rng.getrandbits(8 * len(env.payload)).to_bytes(len(env.payload), "big")
            return Envelope(env.scheme, env.session_id, env.round, env.sender, payload)
        return env

    def order(self, batch: list) -> list:
        if self.policy is Policy.REORDER:
            batch = list(batch)
            self._rng.shuffle(batch)
        return batch


class Bus:
    """Broadcast bus with per-recipient inboxes of encoded envelopes."""

    def __init__(self, recipients: int, interceptor: Interceptor | None = None):
        self.interceptor = interceptor or Interceptor()
        self.inboxes = [[] for _ in range(recipients)]
        self.trace: list[tuple[str, bytes]] = []

    def broadcast(self, env: Envelope):
        sent = env.encode()
        out = self.interceptor.on_send(env)
        if out is None:
            self.trace.append(("drop", sent))
            return
        wire = out.encode()
        self.trace.append(("send" if wire == sent else "rewrite", wire))
        for box in self.inboxes:
            box.append(wire)

    def drain(self, recipient: int) -> list[bytes]:
        batch, self.inboxes[recipient] = self.inboxes[recipient], []
        return self.interceptor.order(batch)


# -- protocol runner ---------------------------------------------------------

@dataclass
class Report:
    scheme: SchemeTag
    t: int
    agg_key: AggregatedKey
    outcomes: list = field(default_factory=list)
    reasons: list = field(default_factory=list)
    signature: MultiSignature | None = None
    accepted: bool | None = None
    trace: list = field(default_factory=list)
    prover_aborts: int = 0
    responses: int = 0

    @property
    def aborted(self) -> list[int]:
        return [i for i, o in enumerate(self.outcomes) if o == Phase.ABORTED.value]

    def records(self) -> str:
        lines = [
            f"scheme={self.scheme.name.lower()}",
            f"t={self.t}",
            f"signature={'yes' if self.signature is not None else 'no'}",
            f"accepted={'none' if self.accepted is None else str(self.accepted).lower()}",
            f"prover_aborts={self.prover_aborts}",
            f"messages={len(self.trace)}",
        ]
        for i, (o, r) in enumerate(zip(self.outcomes, self.reasons)):
            lines.append(f"signer.{i}={o}" + (f" reason={r!r}" if r else ""))
        return "\n".join(lines)


def _collect(bus: Bus, session: SignSession, round_no: int, session_id: bytes) -> dict:
    scheme = session.scheme
    received = {}
    for wire in bus.drain(session.my_index):
        try:
            env = Envelope.decode(wire)
        except DecodeError:
            continue
        if env.session_id != session_id or env.round != round_no or env.scheme != scheme.tag:
            continue
        if not 0 <= env.sender < session.t or env.sender in received:
            continue
        try:
            received[env.sender] = decode_payload(scheme, round_no, env.payload)
        except DecodeError as exc:
            session.abort(f"undecodable round-{round_no} message from signer {env.sender}: {exc}")
    return received


def run_protocol(
    scheme: LinearIdScheme,
    keypairs: list,
    message: bytes,
    interceptor: Interceptor | None = None,
    seed=None,
) -> Report:
    """Drive one signing session per key pair to completion over a bus."""
    master = make_rng(seed)
    session_id = master.getrandbits(128).to_bytes(16, "big")
    signer_set = SignerSet(scheme, [pk for _, pk in keypairs])
    sessions = sorted(
        (SignSession(scheme, sk, pk, signer_set, message) for sk, pk in keypairs),
        key=lambda s: s.my_index,
    )
    t = len(sessions)
    rngs = [make_rng(None if seed is None else master.getrandbits(256)) for _ in sessions]
    bus = Bus(t, interceptor)
    report = Report(scheme.tag, t, key_aggregate(signer_set))

    def send(round_no, i, value):
        bus.broadcast(Envelope(scheme.tag, session_id, round_no, i, encode_payload(scheme, round_no, value)))

    for s, rng in zip(sessions, rngs):
        send(1, s.my_index, s.round1(rng))

    steps = ((1, "round2"), (2, "round3"), (3, "finish"))
    for round_no, step in steps:
        outputs = []
        for s in sessions:
            if s.phase is Phase.ABORTED:
                bus.drain(s.my_index)
                continue
            try:
                received = _collect(bus, s, round_no, session_id)
                if step == "round3":
                    report.responses += 1
                outputs.append((s.my_index, getattr(s, step)(received)))
            except MissingMessages as exc:
                try:
                    s.abort(f"round {round_no}: {exc}")
                except SessionAborted:
                    pass
            except SessionAborted:
                if s.abort_reason and s.abort_reason.startswith("prover aborted"):
                    report.prover_aborts += 1
        if round_no < 3:
            for i, value in outputs:
                send(round_no + 1, i, value)

    report.outcomes = [s.phase.value for s in sessions]
    report.reasons = [s.abort_reason for s in sessions]
    report.trace = list(bus.trace)
    sigs = [s.signature for s in sessions if s.phase is Phase.DONE]
    if sigs and all(sig == sigs[0] for sig in sigs):
        report.signature = sigs[0]
        report.accepted = verify(report.agg_key, message, sigs[0])
    return report


def run_honest(scheme: LinearIdScheme, t: int, message: bytes, seed=None):
    """Honest t-signer run; raises SessionAborted if any signer outputs bottom."""
    if t < 1:
        raise ValueError("t must be positive")
    rng = make_rng(seed)
    keypairs = generate_keypairs(scheme, t, rng)
    report = run_protocol(scheme, keypairs, message, seed=None if seed is None else rng.getrandbits(256))
    if report.aborted:
        raise SessionAborted("; ".join(r for r in report.reasons if r))
    return report.agg_key, report.signature, report.outcomes


def run_adversarial(scheme: LinearIdScheme, t: int, message: bytes, interceptor: Interceptor, seed=None) -> Report:
    rng = make_rng(seed)
    keypairs = generate_keypairs(scheme, t, rng)
    return run_protocol(
        scheme, keypairs, message, interceptor, seed=None if seed is None else rng.getrandbits(256)
    )


# -- rogue-key attack --------------------------------------------------------

@dataclass
class RogueKeyReport:
    naive_forged: bool
    compiled_forged: bool
    compiled_attempts: int
    compiled_successes: int

    def records(self) -> str:
        return "\n".join(
            [
                f"naive_forged={str(self.naive_forged).lower()}",
                f"compiled_forged={str(self.compiled_forged).lower()}",
                f"compiled_attempts={self.compiled_attempts}",
                f"compiled_successes={self.compiled_successes}",
            ]
        )


def _sign_alone(scheme: SchnorrScheme, agg: AggregatedKey, secret: int, message: bytes, rng) -> MultiSignature:
    # single-party Schnorr signature under agg.pk_bar using a secret we hope matches it
    state, X = scheme.commit(rng)
    c = hash_to_theta(H1, frame(scheme.encode_pk(agg.pk_bar), scheme.encode_cmt(X), message), scheme)
    return MultiSignature(X, scheme.respond(secret, state, c))


def rogue_key_demo(group_params, honest_count: int, seed=None, attempts: int = 1000,
                   message: bytes = b"pay the attacker") -> RogueKeyReport:
    """Rogue-key attack against naive product aggregation and the compiler.

    The attacker sees the honest keys, picks s and publishes
    pk_adv = g^s * (prod pk_i)^-1, so the plain product of all keys is g^s.
    Under hash-weighted aggregation the same strategy leaves the attacker
    without the aggregate secret.
    """
    if honest_count < 1:
        raise ValueError("need at least one honest signer")
    scheme = SchnorrScheme(group_params)
    P = group_params
    rng = make_rng(seed)

    def rogue_key(honest):
        s = rng.randrange(1, P.q)
        prod = 1
        for pk in honest:
            prod = prod * pk % P.p
        return s, group_exp(P, P.g, s) * group_inv(P, prod) % P.p

    honest = [pk for _, pk in generate_keypairs(scheme, honest_count, rng)]
    s, pk_adv = rogue_key(honest)
    naive = 1
    for pk in honest + [pk_adv]:
        naive = naive * pk % P.p
    naive_key = AggregatedKey(scheme, naive, honest_count + 1)
    naive_forged = verify(naive_key, message, _sign_alone(scheme, naive_key, s, message, rng))

    successes = 0
    for _ in range(attempts):
        honest = [pk for _, pk in generate_keypairs(scheme, honest_count, rng)]
        s, pk_adv = rogue_key(honest)
        if pk_adv in honest:
            continue
        agg = key_aggregate(SignerSet(scheme, honest + [pk_adv]))
        if verify(agg, message, _sign_alone(scheme, agg, s, message, rng)):
            successes += 1
    return RogueKeyReport(naive_forged, successes > 0, attempts, successes)


# -- aggregated-key impersonation experiment ---------------------------------

class Strategy:
    """Adversary interface for the identification experiment."""

    needs_secret = False

    def choose_keys(self, scheme, pk1, t, rng, sk1=None) -> list:
        raise NotImplementedError

    def commit(self, weights) -> Any:
        raise NotImplementedError

    def respond(self, ch) -> Any:
        raise NotImplementedError


class HonestStrategy(Strategy):
    """Runs the honest prover for every slot; handed sk1 so it can answer."""

    needs_secret = True

    def choose_keys(self, scheme, pk1, t, rng, sk1=None):
        self.scheme, self.rng = scheme, rng
        others = generate_keypairs(scheme, t - 1, rng)
        self.keys = [(sk1, pk1)] + others
        return [pk for _, pk in others]

    def commit(self, weights):
        self.weights = weights
        pairs = [self.scheme.commit(self.rng) for _ in self.keys]
        self.states = [st for st, _ in pairs]
        return self.scheme.combine_cmts(weights, [c for _, c in pairs])

    def respond(self, ch):
        rsps = [self.scheme.respond(sk, st, ch, self.rng) for (sk, _), st in zip(self.keys, self.states)]
        return self.scheme.combine_rsps(self.weights, rsps)


class RandomResponseStrategy(Strategy):
    """Honest-looking commitment, uniformly random response."""

    def choose_keys(self, scheme, pk1, t, rng, sk1=None):
        self.scheme, self.rng = scheme, rng
        return [pk for _, pk in generate_keypairs(scheme, t - 1, rng)]

    def commit(self, weights):
        _, cmt = self.scheme.commit(self.rng)
        return cmt

    def respond(self, ch):
        scheme = self.scheme
        if scheme.tag is SchemeTag.SCHNORR:
            return self.rng.randrange(scheme.params.q)
        from .algebra.sampling import sample_uniform_Y
        from .rlwe import RlweResponse
        return RlweResponse(sample_uniform_Y(scheme.ring, self.rng), sample_uniform_Y(scheme.ring, self.rng))


def run_id_experiment(scheme: LinearIdScheme, t: int, strategy: Strategy, seed=None) -> int:
    """One run of the aggregated-key impersonation game; returns the verdict bit."""
    if t < 1:
        raise ValueError("t must be positive")
    rng = make_rng(seed)
    sk1, pk1 = scheme.keygen(rng)
    others = strategy.choose_keys(scheme, pk1, t, rng, sk1 if strategy.needs_secret else None)
    pks = [pk1] + list(others)
    if len(pks) != t or not all(scheme.is_pk(pk) for pk in pks):
        return 0
    weights = [scheme.sample_challenge(rng) for _ in range(t)]
    agg = scheme.combine_pks(weights, pks)
    try:
        cmt = strategy.commit(weights)
        ch = scheme.sample_challenge(rng)
        rsp = strategy.respond(ch)
    except SigningAborted:
        return 0
    try:
        return int(bool(scheme.verify(agg, t, cmt, ch, rsp)))
    except (TypeError, ValueError, ArithmeticError):
        return 0


# -- scenario files ----------------------------------------------------------

@dataclass
class Scenario:
    scheme: str = "schnorr-tiny"
    t: int = 3
    policy: Policy = Policy.PASS
    round: int | None = None
    sender: int | None = None
    payload: bytes | None = None
    seed: int = 0
    message: bytes = b"scenario"


def load_scenario(text: str) -> Scenario:
    """Parse ``key = value`` lines into a Scenario."""
    sc = Scenario()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = (part.strip() for part in line.partition("="))
        if key == "scheme":
            sc.scheme = value
        elif key in ("t", "round", "sender", "seed"):
            setattr(sc, key, int(value))
        elif key == "policy":
            sc.policy = Policy(value.lower())
        elif key == "payload":
            sc.payload = None if value.lower() == "random" else bytes.fromhex(value)
        elif key == "message":
            sc.message = value.encode()
        else:
            raise ValueError(f"unknown scenario key {key!r}")
    return sc


def run_scenario(sc: Scenario) -> Report:
    from .presets import preset
    interceptor = Interceptor(sc.policy, sc.round, sc.sender, sc.payload, seed=sc.seed)
    return run_adversarial(preset(sc.scheme), sc.t, sc.message, interceptor, seed=sc.seed)
