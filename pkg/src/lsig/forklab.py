"""Nested forking algorithm and Monte-Carlo estimates of acc and frk.

A rewindable algorithm is any callable ``alg(x, hs, rho) -> (I, J, side)``
that is a pure function of its arguments: the oracle answers ``hs`` are
integers in ``range(N)`` and ``rho`` is a byte string from which all
internal randomness is derived.

``fork`` runs the algorithm four times. Run 1 resamples the oracle answers
from J0 on, run 2 from I0 on, and run 3 reruns run 2 with the answers from
J0 on resampled again. The fork succeeds when all four runs agree on
(I, J) and the three rewound answers at I0/J0 differ from the ones they
replace.
"""
from __future__ import annotations

import hashlib
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .algebra.ring import ring_add, ring_mul, ring_sub
from .idcore import SigningAborted
from .rlwe import RlweScheme
from .schnorr import SchnorrScheme

COIN_BYTES = 32

RewindableAlgorithm = Callable[[Any, tuple, bytes], tuple]


@dataclass(frozen=True)
class ForkOutcome:
    ok: bool
    I: int = 0
    J: int = 0
    sides: tuple = ()
    hs: tuple = ()        # the four oracle answer lists, for inspection

    def __bool__(self):
        return self.ok


FAIL = ForkOutcome(False)


def _fresh(rng, N: int, count: int) -> list:
    return [rng.randrange(N) for _ in range(count)]


def fork(alg: RewindableAlgorithm, x, q: int, N: int, rng) -> ForkOutcome:
    if q < 2 or N < 2:
        raise ValueError("need q >= 2 and N >= 2")
    rho = rng.getrandbits(8 * COIN_BYTES).to_bytes(COIN_BYTES, "big")
    h0 = _fresh(rng, N, q)
    I0, J0, s0 = alg(x, tuple(h0), rho)
    if I0 == 0 or J0 == 0 or I0 >= J0:
        return FAIL

    h1 = h0[: J0 - 1] + _fresh(rng, N, q - J0 + 1)
    I1, J1, s1 = alg(x, tuple(h1), rho)
    if I1 == 0 or J1 == 0:
        return FAIL

    h2 = h0[: I0 - 1] + _fresh(rng, N, q - I0 + 1)
    I2, J2, s2 = alg(x, tuple(h2), rho)
    if I2 == 0 or J2 == 0:
        return FAIL

    h3 = h2[: J0 - 1] + _fresh(rng, N, q - J0 + 1)
    I3, J3, s3 = alg(x, tuple(h3), rho)
    if I3 == 0 or J3 == 0:
        return FAIL

    assert h1[: J0 - 1] == h0[: J0 - 1]
    assert h2[: I0 - 1] == h0[: I0 - 1]
    assert h3[: J0 - 1] == h2[: J0 - 1]
    assert len(h0) == len(h1) == len(h2) == len(h3) == q

    flag1 = I0 == I1 == I2 == I3 and J0 == J1 == J2 == J3
    i, j = I0 - 1, J0 - 1
    flag2 = h0[i] != h2[i] and h0[j] != h1[j] and h2[j] != h3[j]
    if flag1 and flag2:
        return ForkOutcome(True, I0, J0, (s0, s1, s2, s3), tuple(map(tuple, (h0, h1, h2, h3))))
    return FAIL


# -- estimation ----------------------------------------------------------------

@dataclass(frozen=True)
class Estimate:
    p: float
    stderr: float
    trials: int
    hits: int


def _estimate(hits: int, trials: int) -> Estimate:
    p = hits / trials
    return Estimate(p, math.sqrt(p * (1 - p) / trials), trials, hits)


def estimate_acc(alg, input_gen, q: int, N: int, trials: int, rng=None) -> Estimate:
    """Fraction of single runs with I >= 1 and J >= 1."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = rng or random.SystemRandom()
    hits = 0
    for _ in range(trials):
        x = input_gen(rng)
        rho = rng.getrandbits(8 * COIN_BYTES).to_bytes(COIN_BYTES, "big")
        I, J, _ = alg(x, tuple(_fresh(rng, N, q)), rho)
        hits += I >= 1 and J >= 1
    return _estimate(hits, trials)


def estimate_frk(alg, input_gen, q: int, N: int, trials: int, rng=None) -> Estimate:
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = rng or random.SystemRandom()
    hits = sum(bool(fork(alg, input_gen(rng), q, N, rng)) for _ in range(trials))
    return _estimate(hits, trials)


def lemma1_bound(acc, q: int, N: int):
    """8 acc^4 / (q^3 (q-1)^3) - 3/N; exact when given a Fraction or int."""
    if not 0 <= acc <= 1:
        raise ValueError("acc must lie in [0, 1]")
    if isinstance(acc, float):
        return 8 * acc ** 4 / (q ** 3 * (q - 1) ** 3) - 3 / N
    acc = Fraction(acc)
    return 8 * acc ** 4 / (q ** 3 * (q - 1) ** 3) - Fraction(3, N)


# -- synthetic adversaries -------------------------------------------------------

def no_input(rng):
    return None


def never(x, hs, rho):
    return 0, 0, None


def always(I: int = 1, J: int = 2) -> RewindableAlgorithm:
    def alg(x, hs, rho):
        return I, J, hs
    alg.__name__ = f"always_{I}_{J}"
    return alg


def threshold(N: int, k1: int, k2: int) -> RewindableAlgorithm:
    """Accept iff h1 < k1 and h2 < k2 (q = 2); acc = k1 k2 / N^2."""
    def alg(x, hs, rho):
        if hs[0] < k1 and hs[1] < k2:
            return 1, 2, (hs[0], hs[1])
        return 0, 0, None
    return alg


def coin_gated(p: float, I: int = 1, J: int = 2) -> RewindableAlgorithm:
    """Accept iff the coin falls below p; answers are irrelevant."""
    cut = int(p * 2 ** 64)

    def alg(x, hs, rho):
        if int.from_bytes(rho[:8], "big") < cut:
            return I, J, rho[:8]
        return 0, 0, None
    return alg


def hash_index(N: int) -> RewindableAlgorithm:
    """Index I depends on h1, acceptance on the last answer; acc = 1/2 for even N."""
    def alg(x, hs, rho):
        q = len(hs)
        if hs[-1] >= N // 2:
            return 0, 0, None
        I = 1 + hs[0] % (q - 1)
        return I, q, hs
    return alg


ADVERSARIES = ("never", "always", "threshold", "coin", "hash-index")


DEFAULT_ACC = {"threshold": 0.5, "coin": 0.1}


def make_adversary(name: str, q: int, N: int, acc: float | None = None) -> RewindableAlgorithm:
    if acc is None:
        acc = DEFAULT_ACC.get(name, 0.5)
    if name == "never":
        return never
    if name == "always":
        return always(1, q)
    if name == "threshold":
        if q != 2:
            raise ValueError("the threshold adversary uses q = 2")
        k = max(1, round(N * math.sqrt(acc)))
        return threshold(N, k, k)
    if name == "coin":
        return coin_gated(acc, 1, q)
    if name == "hash-index":
        return hash_index(N)
    raise KeyError(f"unknown adversary {name!r}; choose from {', '.join(ADVERSARIES)}")


# -- cooperative-prover wrappers over the ID schemes -----------------------------

def _sub_rng(rho: bytes, label: bytes) -> random.Random:
    return random.Random(hashlib.sha256(label + rho).digest())


@dataclass
class SchnorrForker:
    """Impersonation algorithm over Schnorr with an honest prover inside.

    h1 is the weight of slot 1 and h2 the challenge, both read as elements of
    Z_q (so N should be the group order). The prover knows every secret and
    always convinces the verifier, so acc = 1.
    """
    scheme: SchnorrScheme
    t: int
    sk1: int

    @property
    def N(self) -> int:
        return self.scheme.params.q

    def __call__(self, pk1, hs, rho):
        S, P = self.scheme, self.scheme.params
        r0, r1 = _sub_rng(rho, b"keys"), _sub_rng(rho, b"weights")
        others = [S.keygen(r0) for _ in range(self.t - 1)]
        lam = [hs[0] % P.q] + [r1.randrange(P.q) for _ in range(self.t - 1)]
        state, X = S.commit(r0)
        c = hs[1] % P.q
        secrets = [self.sk1] + [sk for sk, _ in others]
        pks = [pk1] + [pk for _, pk in others]
        z = (sum(l * s for l, s in zip(lam, secrets)) * c + state.secret) % P.q
        agg = S.combine_pks(lam, pks)
        if not S.verify(agg, self.t, X, c, z):
            return 0, 0, None
        return 1, 2, (lam[0], X, z, c)


def extract_schnorr(outcome: ForkOutcome, q: int) -> int | None:
    """Recover a1 from the four transcripts of a successful fork."""
    if not outcome:
        return None
    (l0, _, z0, c0), (_, _, z1, c1), (l2, _, z2, c2), (_, _, z3, c3) = outcome.sides
    if c0 == c1 or c2 == c3 or l0 == l2:
        return None
    k0 = (z0 - z1) * pow(c0 - c1, -1, q) % q
    k2 = (z2 - z3) * pow(c2 - c3, -1, q) % q
    return (k0 - k2) * pow(l0 - l2, -1, q) % q


@dataclass
class RlweForker:
    """Lattice counterpart of :class:`SchnorrForker`.

    Oracle answers index the challenge set C (N = |C|). acc is the
    probability that no signer's prover aborts.
    """
    scheme: RlweScheme
    t: int
    sk1: Any

    @property
    def N(self) -> int:
        return self.scheme.challenge_space_size

    def __call__(self, pk1, hs, rho):
        S = self.scheme
        r0, r1 = _sub_rng(rho, b"keys"), _sub_rng(rho, b"weights")
        others = [S.keygen(r0) for _ in range(self.t - 1)]
        lam = [S.challenge_from_index(hs[0])] + [S.sample_challenge(r1) for _ in range(self.t - 1)]
        secrets = [self.sk1] + [sk for sk, _ in others]
        pks = [pk1] + [pk for _, pk in others]
        commits = [S.commit(r0) for _ in secrets]
        cmt = S.combine_cmts(lam, [v for _, v in commits])
        c = S.challenge_from_index(hs[1])
        try:
            rsps = [S.respond(sk, st, c, r0) for sk, (st, _) in zip(secrets, commits)]
        except SigningAborted:
            return 0, 0, None
        z = S.combine_rsps(lam, rsps)
        if not S.verify(S.combine_pks(lam, pks), self.t, cmt, c, z):
            return 0, 0, None
        return 1, 2, (lam[0], z, c)


def extract_rlwe(outcome: ForkOutcome, ring) -> tuple | None:
    """Short (alpha1, alpha2, alpha3) with a*alpha1 + alpha2 + u1*alpha3 = 0."""
    if not outcome:
        return None
    (lam, z, c), (_, zh, ch), (lam_b, zb, cb), (_, zu, cu) = outcome.sides
    d_hat = ring_sub(ring, ch, c)
    d_low = ring_sub(ring, cu, cb)
    a1 = ring_sub(ring, ring_mul(ring, ring_sub(ring, zu.z1, zb.z1), d_hat),
                  ring_mul(ring, ring_sub(ring, zh.z1, z.z1), d_low))
    a2 = ring_sub(ring, ring_mul(ring, ring_sub(ring, zu.z2, zb.z2), d_hat),
                  ring_mul(ring, ring_sub(ring, zh.z2, z.z2), d_low))
    a3 = ring_mul(ring, ring_mul(ring, ring_sub(ring, lam, lam_b), d_hat), d_low)
    return a1, a2, a3


def sis_residue(scheme: RlweScheme, u1, alphas, sign: int = 1):
    """a*alpha1 + alpha2 + sign*u1*alpha3 in R_q; zero for a valid solution."""
    ring = scheme.ring
    a1, a2, a3 = alphas
    term = ring_mul(ring, u1, a3)
    lhs = ring_add(ring, ring_mul(ring, scheme.a, a1), a2)
    return ring_add(ring, lhs, term) if sign > 0 else ring_sub(ring, lhs, term)


# -- CSV driver --------------------------------------------------------------------

CSV_HEADER = "adversary,q,N,trials,acc,acc_stderr,frk,frk_stderr,bound,holds"


def lab_row(name: str, q: int, N: int, trials: int, rng, acc_target: float | None = None) -> str:
    alg = make_adversary(name, q, N, acc_target)
    acc = estimate_acc(alg, no_input, q, N, trials, rng)
    frk = estimate_frk(alg, no_input, q, N, trials, rng)
    bound = lemma1_bound(max(0.0, acc.p - 3 * acc.stderr), q, N)
    holds = frk.p + 3 * frk.stderr >= bound
    return (
        f"{name},{q},{N},{trials},{acc.p:.6f},{acc.stderr:.6f},"
        f"{frk.p:.6f},{frk.stderr:.6f},{bound:.6f},{str(holds).lower()}"
    )
