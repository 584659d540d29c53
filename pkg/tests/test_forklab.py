import random
from fractions import Fraction

import pytest

from lsig.algebra.ring import inf_norm
from lsig.forklab import (
    CSV_HEADER,
    RlweForker,
    SchnorrForker,
    always,
    coin_gated,
    estimate_acc,
    estimate_frk,
    extract_rlwe,
    extract_schnorr,
    fork,
    hash_index,
    lab_row,
    lemma1_bound,
    make_adversary,
    never,
    no_input,
    sis_residue,
    threshold,
)

N16 = 2 ** 16


def test_guards():
    rng = random.Random(1)
    assert not fork(never, None, 2, N16, rng)
    assert not fork(always(2, 1), None, 2, N16, rng)
    assert not fork(always(1, 1), None, 2, N16, rng)
    with pytest.raises(ValueError):
        fork(never, None, 1, N16, rng)
    with pytest.raises(ValueError):
        fork(never, None, 2, 1, rng)


def test_fork_structure():
    rng = random.Random(2)
    out = fork(always(2, 4), None, 5, 1000, rng)
    h0, h1, h2, h3 = out.hs
    assert out and (out.I, out.J) == (2, 4)
    assert h1[:3] == h0[:3] and h2[:1] == h0[:1] and h3[:3] == h2[:3]
    assert h2[1] != h0[1] and h1[3] != h0[3] and h3[3] != h2[3]
    assert out.sides == (h0, h1, h2, h3)


def test_replay_determinism():
    algs = [threshold(N16, 30000, 30000), coin_gated(0.5), hash_index(N16)]
    rng = random.Random(3)
    for alg in algs:
        for _ in range(100):
            hs = tuple(rng.randrange(N16) for _ in range(4))
            rho = rng.randbytes(32)
            assert alg(None, hs, rho) == alg(None, hs, rho)


def test_lemma1_bound_examples():
    assert lemma1_bound(0, 2, N16) == Fraction(-3, N16)
    assert lemma1_bound(1, 2, N16) == 1 - Fraction(3, N16)
    for acc in (Fraction(1, 3), Fraction(1, 2)):
        assert lemma1_bound(acc, 2, N16) == acc ** 4 - Fraction(3, N16)
    assert lemma1_bound(1, 3, 100) == Fraction(8, 27 * 8) - Fraction(3, 100)
    assert abs(lemma1_bound(0.5, 2, N16) - (0.0625 - 3 / N16)) < 1e-12
    with pytest.raises(ValueError):
        lemma1_bound(1.5, 2, N16)


def test_never_and_always():
    rng = random.Random(4)
    assert estimate_acc(never, no_input, 2, N16, 200, rng).p == 0
    assert estimate_frk(never, no_input, 2, N16, 200, rng).p == 0
    frk = estimate_frk(always(1, 2), no_input, 2, N16, 5000, rng)
    assert frk.p >= 1 - 3 / N16 - 3 * max(frk.stderr, 1 / 5000)


def test_always_small_N_hits_freshness_rate():
    # with N = 8 only Flag2 can fail: each of the three inequalities fails w.p. 1/8
    rng = random.Random(5)
    est = estimate_frk(always(1, 2), no_input, 2, 8, 20_000, rng)
    assert abs(est.p - (7 / 8) ** 3) < 4 * est.stderr


def test_threshold_acc_matches_closed_form():
    rng = random.Random(6)
    k1, k2 = 20000, 45000
    est = estimate_acc(threshold(N16, k1, k2), no_input, 2, N16, 20_000, rng)
    assert abs(est.p - k1 * k2 / N16 ** 2) <= 3 * est.stderr


def test_empirical_lemma1_small():
    rng = random.Random(7)
    for name, q in (("threshold", 2), ("coin", 3), ("hash-index", 4), ("always", 3)):
        alg = make_adversary(name, q, N16)
        acc = estimate_acc(alg, no_input, q, N16, 4000, rng)
        frk = estimate_frk(alg, no_input, q, N16, 4000, rng)
        assert frk.p + 3 * frk.stderr >= lemma1_bound(max(0.0, acc.p - 3 * acc.stderr), q, N16)


def test_make_adversary_errors():
    with pytest.raises(KeyError):
        make_adversary("oracle", 2, N16)
    with pytest.raises(ValueError):
        make_adversary("threshold", 3, N16)


def test_lab_row_format():
    row = lab_row("always", 2, N16, 100, random.Random(8))
    assert len(row.split(",")) == len(CSV_HEADER.split(","))
    assert row.startswith("always,2,65536,100,1.000000")


def test_schnorr_extraction(tiny):
    rng = random.Random(9)
    hits = 0
    for _ in range(200):
        sk, pk = tiny.keygen(rng)
        f = SchnorrForker(tiny, 3, sk)
        a1 = extract_schnorr(fork(f, pk, 2, f.N, rng), 11)
        if a1 is not None:
            assert a1 == sk
            hits += 1
    assert hits > 100


def test_schnorr_extraction_on_desk_group(desk_group):
    rng = random.Random(10)
    sk, pk = desk_group.keygen(rng)
    f = SchnorrForker(desk_group, 4, sk)
    assert extract_schnorr(fork(f, pk, 2, f.N, rng), desk_group.params.q) == sk


def test_rlwe_extraction_relation(rlwe):
    rng = random.Random(11)
    sk, u = rlwe.keygen(rng)
    f = RlweForker(rlwe, 2, sk)
    found = 0
    for _ in range(20):
        out = fork(f, u, 2, f.N, rng)
        if not out:
            continue
        alphas = extract_rlwe(out, rlwe.ring)
        # the four transcripts give a*alpha1 + alpha2 + u1*alpha3 = 0
        assert sis_residue(rlwe, u, alphas, +1) == (0,) * 16
        assert sis_residue(rlwe, u, alphas, -1) != (0,) * 16
        assert any(alphas[2])
        assert max(inf_norm(a) for a in alphas) < rlwe.ring.eta(2)
        found += 1
    assert found > 5
