"""Leveled multilinear groups with an exponent-table reference backend.

A degree-k sequence of groups G_1 .. G_k of prime order p, each with a
canonical generator g_i, supports pairings e(g_i^a, g_j^b) = g_{i+j}^{ab}
whenever i + j <= k.  The reference backend here represents an element of
G_i by its discrete logarithm relative to g_i, so every group law and
pairing is exact arithmetic mod p.

Discrete log is trivial by construction: this backend exists to make the
algebra of schemes built on top of it checkable.  It provides no hardness
whatsoever and must never protect real data.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

import gmpy2

__all__ = [
    "MapError",
    "LevelOutOfRange",
    "LevelOverflow",
    "LevelMismatch",
    "GroupMismatch",
    "OracleUnavailable",
    "GroupDescriptor",
    "LevelledElement",
    "ExponentBackend",
    "group_setup",
    "encode",
    "generator",
    "identity",
    "oracle_exponent",
    "element_line",
    "parse_element_line",
    "group_line",
    "parse_group_line",
]


class MapError(Exception):
    """Base class for group/pairing usage errors."""


class LevelOutOfRange(MapError):
    """Requested level is not in [1, k]."""


class LevelOverflow(MapError):
    """A pairing would land above the top level; the ladder only goes up."""


class LevelMismatch(MapError):
    """Group law applied to elements at different levels."""


class GroupMismatch(MapError):
    """Operands belong to different group sequences."""


class OracleUnavailable(MapError):
    """The exponent oracle only works on the reference representation."""


@dataclass(frozen=True)
class GroupDescriptor:
    """Public description of a group sequence: prime order p and degree k."""

    p: int
    k: int

    def __post_init__(self):
        if not isinstance(self.k, int) or self.k < 1:
            raise ValueError(f"degree must be an integer >= 1, got {self.k!r}")
        if not isinstance(self.p, int) or self.p < 3 or not gmpy2.is_prime(self.p):
            raise ValueError(f"group order must be a prime >= 3, got {self.p!r}")


def group_setup(security_bits: int, k: int, rng: random.Random) -> GroupDescriptor:
    """Create a degree-k group sequence whose prime order exceeds 2**security_bits.

    Deterministic for a given rng state: a uniform candidate is drawn in
    [max(2**security_bits, 2), 2*that) and bumped to the next prime.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"degree must be an integer >= 1, got {k!r}")
    if not isinstance(security_bits, int) or security_bits < 0:
        raise ValueError(f"security_bits must be a non-negative integer, got {security_bits!r}")
    lower = max(1 << security_bits, 2)
    candidate = lower + rng.randrange(lower)
    return GroupDescriptor(p=int(gmpy2.next_prime(candidate)), k=k)


def _check_level(gd: GroupDescriptor, level) -> None:
    if not isinstance(level, int) or not 1 <= level <= gd.k:
        raise LevelOutOfRange(f"level {level!r} outside [1, {gd.k}]")


def _check_scalar(gd: GroupDescriptor, value) -> None:
    if not isinstance(value, int):
        raise TypeError(f"scalar must be an integer, got {type(value).__name__}")
    if not 0 <= value < gd.p:
        raise ValueError(f"scalar {value} outside [0, {gd.p})")


@dataclass(frozen=True)
class LevelledElement:
    """Element of G_level, stored as its exponent over the level's generator."""

    gd: GroupDescriptor
    level: int
    exp: int

    def __post_init__(self):
        _check_level(self.gd, self.level)
        _check_scalar(self.gd, self.exp)

    def _same_group(self, other: "LevelledElement") -> None:
        if not isinstance(other, LevelledElement):
            raise TypeError(f"expected a group element, got {type(other).__name__}")
        if other.gd != self.gd:
            raise GroupMismatch("operands come from different group sequences")

    def pair(self, other: "LevelledElement") -> "LevelledElement":
        """e(g_i^a, g_j^b) = g_{i+j}^{ab}; raises LevelOverflow past the top."""
        self._same_group(other)
        lvl = self.level + other.level
        if lvl > self.gd.k:
            raise LevelOverflow(
                f"pairing levels {self.level}+{other.level} exceeds degree {self.gd.k}"
            )
        return LevelledElement(self.gd, lvl, self.exp * other.exp % self.gd.p)

    def mul(self, other: "LevelledElement") -> "LevelledElement":
        """Group law within one level."""
        self._same_group(other)
        if other.level != self.level:
            raise LevelMismatch(
                f"cannot multiply level {self.level} by level {other.level}"
            )
        return LevelledElement(self.gd, self.level, (self.exp + other.exp) % self.gd.p)

    __mul__ = mul

    def inv(self) -> "LevelledElement":
        return LevelledElement(self.gd, self.level, -self.exp % self.gd.p)

    def pow(self, value: int) -> "LevelledElement":
        _check_scalar(self.gd, value)
        return LevelledElement(self.gd, self.level, self.exp * value % self.gd.p)

    def is_identity(self) -> bool:
        return self.exp == 0


def encode(gd: GroupDescriptor, value: int, level: int) -> LevelledElement:
    """g_level^value.  The scalar must already be reduced into [0, p)."""
    return LevelledElement(gd, level, value)


def generator(gd: GroupDescriptor, level: int) -> LevelledElement:
    return LevelledElement(gd, level, 1)


def identity(gd: GroupDescriptor, level: int) -> LevelledElement:
    return LevelledElement(gd, level, 0)


def oracle_exponent(element) -> int:
    """Discrete log of an element (test/verification use only).

    Works only on representations that store exponents; scheme code must
    never depend on it.
    """
    inner = getattr(element, "inner", None)
    if inner is not None:
        return oracle_exponent(inner)
    if isinstance(element, LevelledElement):
        return element.exp
    raise OracleUnavailable(f"no exponent view for {type(element).__name__}")


_ELEMENT_RE = re.compile(r"^L(\d+):(\d+)$")
_GROUP_RE = re.compile(r"^GROUP p=(\d+) k=(\d+)$")


def element_line(element) -> str:
    """Canonical one-line text form, 'L<level>:<exponent>'."""
    inner = getattr(element, "inner", None)
    if inner is not None:
        return element_line(inner)
    if not isinstance(element, LevelledElement):
        raise TypeError(f"cannot serialize {type(element).__name__}")
    return f"L{element.level}:{element.exp}"


def parse_element_line(gd: GroupDescriptor, line: str) -> LevelledElement:
    m = _ELEMENT_RE.match(line)
    if m is None:
        raise ValueError(f"malformed element {line!r}")
    level, exp = int(m.group(1)), int(m.group(2))
    _check_level(gd, level)
    _check_scalar(gd, exp)
    return LevelledElement(gd, level, exp)


def group_line(gd: GroupDescriptor) -> str:
    return f"GROUP p={gd.p} k={gd.k}"


def parse_group_line(line: str) -> GroupDescriptor:
    m = _GROUP_RE.match(line)
    if m is None:
        raise ValueError(f"malformed group line {line!r}")
    return GroupDescriptor(p=int(m.group(1)), k=int(m.group(2)))


class ExponentBackend:
    """Scheme-facing handle bundling a group sequence with sampling and encoding.

    Scalars on this backend are plain integers mod p.  rand_small and
    rand_wire draw from the identical uniform distribution; the split exists
    so that size-tracking decorators can assign different growth classes to
    short blinding exponents versus per-wire randomness.
    """

    def __init__(self, gd: GroupDescriptor):
        self.gd = gd

    @property
    def p(self) -> int:
        return self.gd.p

    @property
    def k(self) -> int:
        return self.gd.k

    def rand_small(self, rng: random.Random) -> int:
        return rng.randrange(self.gd.p)

    def rand_wire(self, level: int, rng: random.Random) -> int:
        _check_level(self.gd, level)
        return rng.randrange(self.gd.p)

    def s_mul(self, a: int, b: int) -> int:
        return a * b % self.gd.p

    def s_sub(self, a: int, b: int) -> int:
        return (a - b) % self.gd.p

    def encode(self, value: int, level: int) -> LevelledElement:
        return LevelledElement(self.gd, level, value)

    def generator(self, level: int) -> LevelledElement:
        return LevelledElement(self.gd, level, 1)

    def identity(self, level: int) -> LevelledElement:
        return LevelledElement(self.gd, level, 0)

    def rand_element(self, level: int, rng: random.Random) -> LevelledElement:
        _check_level(self.gd, level)
        return LevelledElement(self.gd, level, rng.randrange(self.gd.p))
