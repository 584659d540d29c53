"""Samplers for the small-norm sets used by the lattice ID scheme.

Every sampler takes an explicit ``rng`` exposing the :class:`random.Random`
interface (``randrange``, ``getrandbits``). Pass ``random.SystemRandom()``
for real keys and a seeded ``random.Random`` for reproducible runs.
"""
from __future__ import annotations

import bisect
import decimal
from functools import lru_cache

from .ring import RingElement, RingParams

_CDF_BITS = 128


@lru_cache(maxsize=None)
def gaussian_cdf_table(sigma: float, tail: int) -> tuple[int, ...]:
    """Integer CDF of D_{Z,sigma} restricted to [-tail, tail].

    Mass at k is proportional to exp(-pi k^2 / sigma^2); the table is scaled
    to 2^128 and its last entry is exactly 2^128.
    """
    ctx = decimal.Context(prec=80)
    pi = decimal.Decimal(
        "3.14159265358979323846264338327950288419716939937510582097494459230781640628620899"
    )
    s2 = ctx.multiply(decimal.Decimal(sigma), decimal.Decimal(sigma))
    weights = [
        ctx.exp(ctx.divide(-pi * k * k, s2)) for k in range(-tail, tail + 1)
    ]
    total = sum(weights, decimal.Decimal(0))
    scale = decimal.Decimal(2) ** _CDF_BITS
    cdf, acc = [], decimal.Decimal(0)
    for w in weights:
        acc += w
        cdf.append(int(ctx.divide(acc * scale, total).to_integral_value(decimal.ROUND_HALF_EVEN)))
    cdf[-1] = 1 << _CDF_BITS
    return tuple(cdf)


def sample_dz(sigma: float, tail: int, rng) -> int:
    cdf = gaussian_cdf_table(sigma, tail)
    return bisect.bisect_right(cdf, rng.getrandbits(_CDF_BITS)) - tail


def sample_gaussian(params: RingParams, rng) -> RingElement:
    """n independent draws from D_{Z,sigma}, truncated at +-ceil(12 sigma)."""
    cdf = gaussian_cdf_table(params.sigma, params.gaussian_tail)
    tail = params.gaussian_tail
    return tuple(
        bisect.bisect_right(cdf, rng.getrandbits(_CDF_BITS)) - tail
        for _ in range(params.n)
    )


def _uniform_box(n: int, bound: int, rng) -> RingElement:
    lo, hi = -bound, bound + 1
    return tuple(rng.randrange(lo, hi) for _ in range(n))


def sample_uniform_C(params: RingParams, rng) -> RingElement:
    """Uniform over C: degree below n/2, coefficients in [-log n, log n]."""
    half = params.n // 2
    return _uniform_box(half, params.c_bound, rng) + (0,) * (params.n - half)


def sample_uniform_Y(params: RingParams, rng) -> RingElement:
    return _uniform_box(params.n, params.y_bound, rng)


def sample_uniform_Z(params: RingParams, rng) -> RingElement:
    return _uniform_box(params.n, params.z_bound, rng)


def sample_uniform_Rq(params: RingParams, rng) -> RingElement:
    return _uniform_box(params.n, params.half, rng)


def in_C(params: RingParams, c) -> bool:
    n, bound = params.n, params.c_bound
    return (
        isinstance(c, tuple)
        and len(c) == n
        and all(-bound <= x <= bound for x in c)
        and not any(c[n // 2:])
    )


def in_box(u: RingElement, bound: int) -> bool:
    return all(-bound <= x <= bound for x in u)
