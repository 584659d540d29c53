import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from lsig.algebra.group import (
    TINY_GROUP,
    GroupParams,
    InvalidGroupParams,
    default_group,
    group_exp,
    group_inv,
    in_subgroup,
    load_group_params,
)
from lsig.algebra.ring import (
    InvalidRingParams,
    NotInvertible,
    RingParams,
    canon,
    inf_norm,
    is_invertible,
    is_valid,
    one,
    ring_add,
    ring_invert,
    ring_mul,
    ring_mul_schoolbook,
    ring_neg,
    ring_sub,
    vec_add,
    vec_scale,
    zero,
)
from lsig.algebra.sampling import (
    gaussian_cdf_table,
    in_box,
    in_C,
    sample_gaussian,
    sample_uniform_C,
    sample_uniform_Rq,
    sample_uniform_Y,
)
from lsig.rlwe import rlwe_setup

DESK = RingParams(n=16, q=4294967371, sigma=2.0, mu=16)


# -- group -------------------------------------------------------------------

def test_group_exp_examples():
    assert group_exp(TINY_GROUP, 2, 3) == 8
    assert group_exp(TINY_GROUP, 8, 5) == 16
    for x in range(1, 23):
        if in_subgroup(TINY_GROUP, x):
            assert group_exp(TINY_GROUP, x, 0) == 1


def test_tiny_subgroup_has_eleven_elements():
    members = [x for x in range(1, 23) if in_subgroup(TINY_GROUP, x)]
    assert len(members) == 11
    assert sorted(members) == sorted(pow(2, e, 23) for e in range(11))


def test_module_laws_on_tiny_group():
    P = TINY_GROUP
    for e in range(11):
        m = pow(2, e, 23)
        assert group_exp(P, m, 1) == m
        for r in range(11):
            for s in range(11):
                assert group_exp(P, m, r + s) == group_exp(P, m, r) * group_exp(P, m, s) % 23
                assert group_exp(P, m, r * s) == group_exp(P, group_exp(P, m, s), r)
        assert group_exp(P, m, 1) * group_inv(P, m) % 23 == 1


def test_bad_group_params_rejected():
    with pytest.raises(InvalidGroupParams):
        GroupParams(23, 11, 5).validate()     # 5 has order 22
    with pytest.raises(InvalidGroupParams):
        GroupParams(23, 7, 2).validate()      # 7 does not divide 22
    with pytest.raises(InvalidGroupParams):
        GroupParams(21, 5, 4).validate()      # 21 is composite
    with pytest.raises(InvalidGroupParams):
        load_group_params("p = 23\nq = 11\n")


def test_shipped_2048_group_is_valid():
    P = default_group()
    assert P.p.bit_length() == 2048 and P.q.bit_length() == 256
    P.validate()
    assert (P.p - 1) % P.q == 0 and pow(P.g, P.q, P.p) == 1 and P.g != 1


# -- ring parameters and bounds ------------------------------------------------

def test_ring_params_constraints():
    with pytest.raises(InvalidRingParams):
        RingParams(n=12, q=19, sigma=2.0, mu=16)
    with pytest.raises(InvalidRingParams):
        RingParams(n=16, q=4294967311, sigma=2.0, mu=16)   # prime, but 7 mod 8
    with pytest.raises(InvalidRingParams):
        RingParams(n=16, q=35, sigma=2.0, mu=16)           # 3 mod 8, composite
    with pytest.raises(InvalidRingParams):
        RingParams(n=16, q=19, sigma=0.0, mu=16)
    with pytest.raises(InvalidRingParams):
        RingParams(n=16, q=4294967371, sigma=2.0, mu=15)   # mu < log^2 n
    RingParams(n=16, q=4294967371, sigma=2.0, mu=16)


def test_desk_modulus_is_smallest_valid_prime_above_2_32():
    import gmpy2
    q = 2 ** 32 + 1
    while not (q % 8 == 3 and gmpy2.is_prime(q)):
        q += 1
    assert q == DESK.q == 4294967371


def test_desk_bounds():
    assert DESK.log_n == 4
    assert DESK.c_bound == 4
    assert DESK.y_bound == 8192                 # 64 * 2 * 64
    assert DESK.z_bound == 7680                 # 15 * 4 * 2 * 64
    assert DESK.eta(1) == 41_943_040            # 5 * 2 * 256 * 4 * 4096
    assert DESK.eta(4) == 2 * DESK.eta(1)
    assert DESK.eta_tight == 393_216            # 3 * 2 * 64 * 4 * 256
    assert DESK.gaussian_tail == 24


def test_eta_matches_float_formula():
    for t in range(1, 40):
        exact = DESK.eta(t)
        approx = 5 * 2 * 256 * math.sqrt(t * 16) * 4 ** 6
        assert exact == math.floor(approx) or abs(exact - approx) < 1


# -- ring arithmetic -------------------------------------------------------------

def test_ring_mul_examples(small_ring):
    R = small_ring
    assert ring_mul(R, (1, 1, 0, 0), (1, 0, 0, 1)) == (0, 1, 0, 1)
    assert ring_mul(R, (0, 1, 0, 0), (0, 0, 0, 1)) == (-1, 0, 0, 0)
    a = (3, -5, 7, 1)
    assert ring_mul(R, a, one(R)) == a


def test_inf_norm_examples(small_ring):
    assert inf_norm(zero(small_ring)) == 0
    assert inf_norm((3, -5, 0, 0)) == 5
    assert inf_norm((9, 9, 9, 9)) == 9 == (19 - 1) // 2


def test_ring_invert_examples(small_ring):
    R = small_ring
    assert ring_invert(R, (0, 1, 0, 0)) == (0, 0, 0, -1)
    assert ring_invert(R, (2, 0, 0, 0)) == (-9, 0, 0, 0)    # 10 = -9 mod 19
    with pytest.raises(NotInvertible):
        ring_invert(R, zero(R))


def _elems(params):
    h = params.half
    return st.lists(st.integers(-h, h), min_size=params.n, max_size=params.n).map(tuple)


@settings(max_examples=300, deadline=None)
@given(_elems(DESK), _elems(DESK))
def test_kronecker_matches_schoolbook(a, b):
    assert ring_mul(DESK, a, b) == ring_mul_schoolbook(DESK, a, b)


@settings(max_examples=200, deadline=None)
@given(_elems(DESK), _elems(DESK), _elems(DESK))
def test_ring_laws(a, b, c):
    R = DESK
    assert ring_mul(R, a, b) == ring_mul(R, b, a)
    assert ring_mul(R, ring_mul(R, a, b), c) == ring_mul(R, a, ring_mul(R, b, c))
    assert ring_mul(R, a, ring_add(R, b, c)) == ring_add(R, ring_mul(R, a, b), ring_mul(R, a, c))
    assert ring_sub(R, ring_add(R, a, b), b) == a
    assert ring_add(R, a, ring_neg(R, a)) == zero(R)
    for u in (ring_mul(R, a, b), ring_add(R, a, b), ring_sub(R, a, c)):
        assert is_valid(R, u)


def test_ring_laws_bulk(rng):
    R = DESK
    for _ in range(1000):
        a, b, c = (sample_uniform_Rq(R, rng) for _ in range(3))
        assert ring_mul(R, ring_mul(R, a, b), c) == ring_mul(R, a, ring_mul(R, b, c))
        assert ring_mul(R, a, ring_add(R, b, c)) == ring_add(R, ring_mul(R, a, b), ring_mul(R, a, c))


def test_vector_module_laws(rng):
    R = DESK
    for _ in range(50):
        lam, kap = sample_uniform_C(R, rng), sample_uniform_C(R, rng)
        u = tuple(sample_uniform_Rq(R, rng) for _ in range(3))
        v = tuple(sample_uniform_Rq(R, rng) for _ in range(3))
        assert vec_scale(R, lam, vec_add(R, u, v)) == vec_add(R, vec_scale(R, lam, u), vec_scale(R, lam, v))
        assert vec_scale(R, ring_mul(R, lam, kap), u) == vec_scale(R, lam, vec_scale(R, kap, u))
        assert vec_scale(R, ring_add(R, lam, kap), u) == vec_add(R, vec_scale(R, lam, u), vec_scale(R, kap, u))
        assert vec_scale(R, one(R), u) == u


def test_invert_roundtrip(rng):
    for R in (DESK, RingParams(n=8, q=11, sigma=1.0, mu=9)):
        for _ in range(200):
            u = sample_uniform_Rq(R, rng)
            try:
                w = ring_invert(R, u)
            except NotInvertible:
                continue
            assert ring_mul(R, u, w) == one(R)


def test_non_invertible_rate(small_ring, rng):
    # x^4+1 splits into two quadratics mod 19, so Pr[not invertible] = 2/19^2 - 1/19^4
    R = small_ring
    trials = 10_000
    bad = sum(not is_invertible(R, sample_uniform_Rq(R, rng)) for _ in range(trials))
    exact = 2 / 19 ** 2 - 1 / 19 ** 4
    assert bad / trials <= 4 * 19 ** -2 + 3 * math.sqrt(exact / trials)


def test_setup_resample_count(rng):
    # expected draws per invertible a: 1/(1 - 2*19^-2) ~ 1.006
    draws = 0
    R = RingParams(n=4, q=19, sigma=2.0, mu=4)
    for _ in range(2000):
        while True:
            draws += 1
            if is_invertible(R, sample_uniform_Rq(R, rng)):
                break
    assert abs(draws / 2000 - 1 / (1 - 2 / 361)) < 0.02
    scheme = rlwe_setup(4, 19, 2.0, 4, rng)
    assert is_invertible(scheme.ring, scheme.a)


def test_canon_range(small_ring):
    assert canon(small_ring, [19, 20, -10, 9]) == (0, 1, 9, 9)


# -- samplers ---------------------------------------------------------------------

def _exact_dz_moments(sigma, tail):
    ws = {k: math.exp(-math.pi * k * k / sigma ** 2) for k in range(-tail, tail + 1)}
    total = sum(ws.values())
    mean = sum(k * w for k, w in ws.items()) / total
    var = sum(k * k * w for k, w in ws.items()) / total - mean ** 2
    return mean, var


def test_gaussian_moments(rng):
    draws = [c for _ in range(100_000 // 16) for c in sample_gaussian(DESK, rng)]
    mean = sum(draws) / len(draws)
    var = sum((d - mean) ** 2 for d in draws) / (len(draws) - 1)
    _, exact_var = _exact_dz_moments(2.0, 48)
    assert abs(mean) < 0.1
    assert abs(var - exact_var) < 0.1 * exact_var
    assert max(abs(d) for d in draws) <= 24


def test_gaussian_table_tail_mass_negligible():
    cdf = gaussian_cdf_table(2.0, 24)
    assert cdf[-1] == 2 ** 128
    assert all(a <= b for a, b in zip(cdf, cdf[1:]))
    # mass of the outermost entries is far below one unit in 2^128
    tail = sum(math.exp(-math.pi * k * k / 4) for k in range(25, 60))
    assert tail < 2 ** -100


def test_gaussian_chi_square(rng):
    R = DESK
    draws = [sample_gaussian(R, rng)[0] for _ in range(20_000)]
    ks = range(-3, 4)
    ws = {k: math.exp(-math.pi * k * k / 4) for k in range(-24, 25)}
    total = sum(ws.values())
    expected = [len(draws) * ws[k] / total for k in ks]
    observed = [draws.count(k) for k in ks]
    rest_exp = len(draws) - sum(expected)
    rest_obs = len(draws) - sum(observed)
    stat, p = stats.chisquare(observed + [rest_obs], expected + [rest_exp])
    assert p > 0.001


def test_uniform_C(rng):
    R = DESK
    coeff0 = []
    for _ in range(100_000):
        c = sample_uniform_C(R, rng)
        assert in_C(R, c)
        coeff0.append(c[0])
    alphabet = sorted(set(coeff0))
    assert alphabet == list(range(-4, 5)) and len(alphabet) == 1 + 2 * R.log_n
    _, p = stats.chisquare([coeff0.count(k) for k in alphabet])
    assert p > 0.001


def test_uniform_Y_membership_in_Z(rng):
    R = DESK
    ratio = Fraction(2 * R.z_bound + 1, 2 * R.y_bound + 1) ** R.n
    trials = 10_000
    hits = 0
    for _ in range(trials):
        y = sample_uniform_Y(R, rng)
        assert in_box(y, R.y_bound)
        hits += in_box(y, R.z_bound)
    assert abs(hits / trials - float(ratio)) < 0.05
