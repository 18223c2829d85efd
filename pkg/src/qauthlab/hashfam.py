"""Polynomial hash families over binary extension fields.

A key ``(a, b, c)`` of three field elements defines the degree-two hash
``m -> a*m^2 + b*m + c`` over GF(2^w), truncated to the low ``tag_bits``
bits.  Any three distinct points are mapped to independent uniform values
when the key is uniform, which is the property the authentication schemes
rely on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

#: Irreducible reduction polynomials, written with the leading bit included.
DEFAULT_MODULI = {
    1: 0b10,  # x; arithmetic reduces to GF(2)
    2: 0b111,  # x^2 + x + 1
    3: 0b1011,  # x^3 + x + 1
    4: 0b10011,  # x^4 + x + 1
    5: 0b100101,  # x^5 + x^2 + 1
    6: 0b1000011,  # x^6 + x + 1
    7: 0b10000011,  # x^7 + x + 1
    8: 0x11B,  # x^8 + x^4 + x^3 + x + 1
}


def clmul(x: int, y: int) -> int:
    """Carry-less product of two bit strings."""
    out = 0
    while y:
        if y & 1:
            out ^= x
        x <<= 1
        y >>= 1
    return out


def poly_mod(x: int, modulus: int) -> int:
    deg = modulus.bit_length() - 1
    while x.bit_length() - 1 >= deg and x:
        x ^= modulus << (x.bit_length() - 1 - deg)
    return x


def is_irreducible(modulus: int) -> bool:
    """Trial division by every polynomial of degree at most half."""
    deg = modulus.bit_length() - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for d in range(2, 1 << (deg // 2 + 1)):
        if poly_mod(modulus, d) == 0:
            return False
    return True


@dataclass(frozen=True)
class GF2Field:
    """GF(2^w) with elements encoded as integers in ``[0, 2^w)``."""

    width: int
    modulus: int = 0
    check: bool = True

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("field width must be at least 1")
        modulus = self.modulus or DEFAULT_MODULI.get(self.width, 0)
        if not modulus:
            raise ValueError(f"no default reduction polynomial for w={self.width}")
        if modulus.bit_length() - 1 != self.width:
            raise ValueError("reduction polynomial degree must equal the field width")
        if self.check and not is_irreducible(modulus):
            raise ValueError(f"reduction polynomial {modulus:#b} is reducible")
        object.__setattr__(self, "modulus", modulus)

    @property
    def order(self) -> int:
        return 1 << self.width

    def add(self, x: int, y: int) -> int:
        return x ^ y

    def mul(self, x: int, y: int) -> int:
        if self.width == 1:
            return x & y
        return poly_mod(clmul(x, y), self.modulus)

    def pow(self, x: int, e: int) -> int:
        out = 1
        while e:
            if e & 1:
                out = self.mul(out, x)
            x = self.mul(x, x)
            e >>= 1
        return out

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("zero has no inverse")
        return self.pow(x, self.order - 2)

    @cached_property
    def mul_table(self) -> np.ndarray:
        """Full multiplication table, used for vectorized hashing."""
        q = self.order
        table = np.zeros((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(x, q):
                table[x, y] = table[y, x] = self.mul(x, y)
        return table

    def inverse_check(self) -> bool:
        """True when every non-zero element has a two-sided inverse."""
        return all(self.mul(x, self.inv(x)) == 1 for x in range(1, self.order))


@dataclass(frozen=True)
class PolyHashKey:
    """Coefficients of ``a*m^2 + b*m + c``."""

    a: int
    b: int
    c: int

    def to_int(self, width: int) -> int:
        """Big-endian ``a || b || c`` packing into ``3*width`` bits."""
        return (self.a << (2 * width)) | (self.b << width) | self.c

    @classmethod
    def from_int(cls, value: int, width: int) -> "PolyHashKey":
        mask = (1 << width) - 1
        return cls((value >> (2 * width)) & mask, (value >> width) & mask, value & mask)


@dataclass(frozen=True)
class PolyHashFamily:
    """Truncated degree-two polynomial hashes over ``field``.

    With ``pairwise_only`` the leading coefficient is fixed to zero, giving the
    affine family that is only pairwise independent.
    """

    field: GF2Field
    tag_bits: int
    pairwise_only: bool = False

    def __post_init__(self):
        if not 0 <= self.tag_bits <= self.field.width:
            raise ValueError("tag bits must lie between 0 and the field width")

    @property
    def num_keys(self) -> int:
        q = self.field.order
        return q * q if self.pairwise_only else q ** 3

    def keys(self) -> Iterator[PolyHashKey]:
        q = self.field.order
        a_range = [0] if self.pairwise_only else range(q)
        for a, b, c in itertools.product(a_range, range(q), range(q)):
            yield PolyHashKey(a, b, c)

    def sample_key(self, rng: np.random.Generator) -> PolyHashKey:
        q = self.field.order
        a = 0 if self.pairwise_only else int(rng.integers(q))
        return PolyHashKey(a, int(rng.integers(q)), int(rng.integers(q)))

    def full_hash(self, key: PolyHashKey, m: int) -> int:
        f = self.field
        m2 = f.mul(m, m)
        return f.mul(key.a, m2) ^ f.mul(key.b, m) ^ key.c

    def __call__(self, key: PolyHashKey, m: int) -> int:
        if not 0 <= m < self.field.order:
            raise ValueError("message does not embed into the field")
        return self.full_hash(key, m) & ((1 << self.tag_bits) - 1)

    def tag_table(self, messages: Sequence[int]) -> np.ndarray:
        """Tags of every key on ``messages``, shape ``(num_keys, len(messages))``.

        Rows follow the order of :meth:`keys`.
        """
        q = self.field.order
        table = self.field.mul_table
        msgs = np.asarray(messages, dtype=np.int64)
        if np.any(msgs >= q) or np.any(msgs < 0):
            raise ValueError("message does not embed into the field")
        sq = table[msgs, msgs]
        a = np.zeros(1, dtype=np.int64) if self.pairwise_only else np.arange(q)
        bc = np.arange(q)
        # broadcast over (a, b, c, message)
        term_a = table[a][:, sq][:, None, None, :]
        term_b = table[bc][:, msgs][None, :, None, :]
        term_c = bc[None, None, :, None]
        full = term_a ^ term_b ^ term_c
        return (full & ((1 << self.tag_bits) - 1)).reshape(-1, len(msgs))


def verify_t_wise_uniform(family: PolyHashFamily, points: Sequence[int]) -> bool:
    """Exhaustively check that the hash values at ``points`` are uniform.

    Counts every tag tuple over all keys and requires each to appear exactly
    ``num_keys / T^t`` times.
    """
    pts = list(points)
    if len(set(pts)) != len(pts):
        raise ValueError("points must be distinct")
    tags = family.tag_table(pts)
    num_tags = 1 << family.tag_bits
    if family.num_keys % (num_tags ** len(pts)):
        return False
    codes = np.zeros(tags.shape[0], dtype=np.int64)
    for col in range(tags.shape[1]):
        codes = codes * num_tags + tags[:, col]
    counts = np.bincount(codes, minlength=num_tags ** len(pts))
    return bool(np.all(counts == family.num_keys // num_tags ** len(pts)))
