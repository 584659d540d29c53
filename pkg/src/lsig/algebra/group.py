"""Prime-order subgroups of Z_p^* acting as Z_q-modules.

Elements are plain ints in [1, p-1]; scalars are ints in [0, q-1].
"""
from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

import gmpy2


class InvalidGroupParams(ValueError):
    pass


@dataclass(frozen=True)
class GroupParams:
    p: int
    q: int
    g: int

    def validate(self) -> "GroupParams":
        if not gmpy2.is_prime(self.p):
            raise InvalidGroupParams("p is not prime")
        if not gmpy2.is_prime(self.q):
            raise InvalidGroupParams("q is not prime")
        if (self.p - 1) % self.q:
            raise InvalidGroupParams("q does not divide p-1")
        if not 1 < self.g < self.p or pow(self.g, self.q, self.p) != 1:
            raise InvalidGroupParams("g does not generate the order-q subgroup")
        return self

    @property
    def element_bytes(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_bytes(self) -> int:
        return (self.q.bit_length() + 7) // 8


TINY_GROUP = GroupParams(p=23, q=11, g=2).validate()


def load_group_params(text: str) -> GroupParams:
    """Parse ``key = value`` lines (values decimal or 0x-hex) and validate."""
    fields = {}
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, value = line.partition("=")
        fields[key.strip()] = int(value.strip(), 0)
    try:
        params = GroupParams(p=fields["p"], q=fields["q"], g=fields["g"])
    except KeyError as exc:
        raise InvalidGroupParams(f"missing field {exc}") from None
    return params.validate()


def default_group() -> GroupParams:
    """The 2048-bit Schnorr group shipped with the package."""
    text = resources.files("lsig.data").joinpath("schnorr-2048.params").read_text()
    return load_group_params(text)


def powmod(base: int, e: int, m: int) -> int:
    """Modular exponentiation through GMP; several times faster than pow() at 2048 bits."""
    return int(gmpy2.powmod(base, e, m))


def in_subgroup(params: GroupParams, m: int) -> bool:
    return 0 < m < params.p and powmod(m, params.q, params.p) == 1


def group_exp(params: GroupParams, base: int, e: int) -> int:
    return powmod(base, e % params.q, params.p)


def group_mul(params: GroupParams, x: int, y: int) -> int:
    return x * y % params.p


def group_inv(params: GroupParams, x: int) -> int:
    return int(gmpy2.invert(x, params.p))
