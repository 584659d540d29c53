"""Arithmetic in R_q = Z_q[x]/(x^n + 1).

Ring elements are tuples of ``n`` ints holding canonical representatives in
[-(q-1)/2, (q-1)/2], lowest degree first. Vectors of ring elements (the
commitment slots) are tuples of ring elements.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import ceil, isqrt
from typing import Sequence

import gmpy2

RingElement = tuple  # tuple[int, ...] of length n
RingVector = tuple  # tuple[RingElement, ...] of length mu


class InvalidRingParams(ValueError):
    pass


class NotInvertible(ArithmeticError):
    """The element shares a factor with x^n + 1 over Z_q."""


def _floor_sqrt_times(k: Fraction, m: int) -> int:
    """floor(k * sqrt(m)) for rational k >= 0, exactly."""
    return isqrt(k.numerator ** 2 * m) // k.denominator


@dataclass(frozen=True)
class RingParams:
    n: int
    q: int
    sigma: float
    mu: int

    def __post_init__(self):
        n, q = self.n, self.q
        if n < 2 or n & (n - 1):
            raise InvalidRingParams(f"n={n} is not a power of two >= 2")
        if q % 8 != 3 or not gmpy2.is_prime(q):
            raise InvalidRingParams(f"q={q} is not a prime congruent to 3 mod 8")
        if not self.sigma > 0:
            raise InvalidRingParams("sigma must be positive")
        if self.mu < self.log_n ** 2:
            raise InvalidRingParams(f"mu={self.mu} is below log2(n)^2={self.log_n ** 2}")

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1

    @property
    def half(self) -> int:
        return (self.q - 1) // 2

    @cached_property
    def _sigma(self) -> Fraction:
        return Fraction(self.sigma)

    @property
    def c_bound(self) -> int:
        """Infinity-norm bound of the challenge set C."""
        return self.log_n

    @cached_property
    def y_bound(self) -> int:
        # floor(n^1.5 * sigma * log^3 n)
        return _floor_sqrt_times(self.n * self._sigma * self.log_n ** 3, self.n)

    @cached_property
    def z_bound(self) -> int:
        # floor((n-1) * n^0.5 * sigma * log^3 n)
        return _floor_sqrt_times((self.n - 1) * self._sigma * self.log_n ** 3, self.n)

    @cached_property
    def sc_bound(self) -> int:
        # floor(sigma * n^0.5 * log^3 n): the product s*c stays below this w.h.p.
        return _floor_sqrt_times(self._sigma * self.log_n ** 3, self.n)

    @cached_property
    def gaussian_tail(self) -> int:
        return ceil(12 * self._sigma)

    def eta(self, t: int) -> int:
        """Verification bound floor(5 sigma n^2 sqrt(t mu) log^6 n)."""
        if t < 1:
            raise ValueError("t must be positive")
        return _floor_sqrt_times(5 * self._sigma * self.n ** 2 * self.log_n ** 6, t * self.mu)

    @cached_property
    def eta_tight(self) -> int:
        """floor(3 sigma n^1.5 sqrt(mu) log^4 n), enough for honest single transcripts."""
        return _floor_sqrt_times(3 * self._sigma * self.n * self.log_n ** 4, self.n * self.mu)

    @cached_property
    def _slot_bytes(self) -> int:
        # room for a sum of n products of residues in [0, q)
        bits = 2 * (self.q - 1).bit_length() + self.n.bit_length()
        return (bits + 7) // 8


def canon(params: RingParams, coeffs: Sequence[int]) -> RingElement:
    q, half = params.q, params.half
    out = []
    for c in coeffs:
        c %= q
        out.append(c - q if c > half else c)
    return tuple(out)


def zero(params: RingParams) -> RingElement:
    return (0,) * params.n


def one(params: RingParams) -> RingElement:
    return (1,) + (0,) * (params.n - 1)


def is_valid(params: RingParams, u) -> bool:
    half = params.half
    return (
        isinstance(u, tuple)
        and len(u) == params.n
        and all(isinstance(c, int) and -half <= c <= half for c in u)
    )


def ring_add(params: RingParams, a: RingElement, b: RingElement) -> RingElement:
    return canon(params, [x + y for x, y in zip(a, b)])


def ring_sub(params: RingParams, a: RingElement, b: RingElement) -> RingElement:
    return canon(params, [x - y for x, y in zip(a, b)])


def ring_neg(params: RingParams, a: RingElement) -> RingElement:
    return tuple(-x for x in a)


def ring_sum(params: RingParams, elems) -> RingElement:
    acc = [0] * params.n
    for e in elems:
        for k, c in enumerate(e):
            acc[k] += c
    return canon(params, acc)


def ring_mul_schoolbook(params: RingParams, a: RingElement, b: RingElement) -> RingElement:
    """Reference negacyclic product, O(n^2)."""
    n = params.n
    acc = [0] * (2 * n)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                acc[i + j] += ai * bj
    return canon(params, [acc[k] - acc[k + n] for k in range(n)])


def _pack(coeffs, q: int, width_bits: int) -> int:
    x = 0
    for c in reversed(coeffs):
        x = (x << width_bits) | (c % q)
    return x


def ring_mul(params: RingParams, a: RingElement, b: RingElement) -> RingElement:
    """Negacyclic product via Kronecker substitution.

    Both operands are lifted to [0, q), packed into one big integer each and
    multiplied once; every slot of the product is a non-negative sum of at
    most n terms below q^2, so slots never overlap. Bit-exact with
    :func:`ring_mul_schoolbook`.
    """
    n, q = params.n, params.q
    w = params._slot_bytes
    x = _pack(a, q, 8 * w) * _pack(b, q, 8 * w)
    raw = x.to_bytes(2 * n * w, "little")
    slots = [int.from_bytes(raw[i * w:(i + 1) * w], "little") for i in range(2 * n)]
    return canon(params, [slots[k] - slots[k + n] for k in range(n)])


def inf_norm(u: RingElement) -> int:
    return max((abs(c) for c in u), default=0)


def scale(params: RingParams, k: int, a: RingElement) -> RingElement:
    return canon(params, [k * c for c in a])


# -- vectors ---------------------------------------------------------------

def vec_add(params: RingParams, u: RingVector, v: RingVector) -> RingVector:
    return tuple(ring_add(params, x, y) for x, y in zip(u, v))


def vec_scale(params: RingParams, lam: RingElement, v: RingVector) -> RingVector:
    return tuple(ring_mul(params, lam, x) for x in v)


# -- inversion ---------------------------------------------------------------

def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a: list, b: list, q: int):
    a = list(a)
    inv_lead = pow(b[-1], -1, q)
    quot = [0] * max(len(a) - len(b) + 1, 0)
    db = len(b) - 1
    for i in range(len(a) - len(b), -1, -1):
        coef = a[i + db] * inv_lead % q
        quot[i] = coef
        if coef:
            for j, bj in enumerate(b):
                a[i + j] = (a[i + j] - coef * bj) % q
    return _trim(quot), _trim(a[:db] if db else [])


def _poly_mul(a: list, b: list, q: int) -> list:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim([c % q for c in out])


def _poly_sub(a: list, b: list, q: int) -> list:
    m = max(len(a), len(b))
    a = a + [0] * (m - len(a))
    b = b + [0] * (m - len(b))
    return _trim([(x - y) % q for x, y in zip(a, b)])


def ring_invert(params: RingParams, u: RingElement) -> RingElement:
    """Inverse of ``u`` in R_q by extended Euclid against x^n + 1.

    Raises NotInvertible when gcd(u, x^n + 1) is non-constant.
    """
    n, q = params.n, params.q
    r0 = [1] + [0] * (n - 1) + [1]
    r1 = _trim([c % q for c in u])
    s0, s1 = [], [1]
    while r1:
        quot, rem = _poly_divmod(r0, r1, q)
        r0, r1 = r1, rem
        s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, q), q)
    if len(r0) != 1:
        raise NotInvertible("element is a zero divisor in R_q")
    inv_g = pow(r0[0], -1, q)
    # s0 * u == r0 (mod x^n + 1); fold s0 negacyclically just in case
    folded = [0] * n
    for k, c in enumerate(s0):
        folded[k % n] += -c if (k // n) % 2 else c
    return canon(params, [c * inv_g for c in folded])


def is_invertible(params: RingParams, u: RingElement) -> bool:
    try:
        ring_invert(params, u)
    except NotInvertible:
        return False
    return True
