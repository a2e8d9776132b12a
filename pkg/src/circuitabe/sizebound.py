"""Exponent-size budgets for graded-encoding-style backends.

Real graded encodings do not hold uniform exponents: noise/size grows with
every multiplication, and each level i only has room for values below
f(i+1) * 2^((i+1)*k), where f is a fixed growth function and 2^k bounds one
fresh "small" exponent.  This module tracks that discipline symbolically: a
decorator backend wraps the exact reference backend, leaves all values
untouched, and carries a log2 size bound plus a fresh-factor count on every
scalar and element.  Exceeding a level budget raises BudgetExceeded, so a
scheme that runs clean here stays inside the representable range of a
backend with genuinely bounded encodings.

Composition rules (bounds are upper bounds in log2, rationals welcome):
  product (pair / pow / scalar mul): bounds add, plus the slack
      log2 f(m1+m2) - log2 f(m1) - log2 f(m2)   (clamped at >= 0),
      and the factor counts add;
  sum (same-level mul / scalar add, sub): bounds and counts take the max,
      the additive constant being absorbed by f's slack;
  inverse / negation: unchanged.
A fresh small scalar starts at (k, 1); the m-fold product of fresh smalls
telescopes to exactly log2 f(m) + k*m, the level budget shape.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from . import mlmap

__all__ = [
    "BudgetExceeded",
    "GrowthProfile",
    "default_profile",
    "level_budget",
    "product_slack",
    "check_hiding",
    "BoundedScalar",
    "BoundedElement",
    "BoundedBackend",
]


class BudgetExceeded(Exception):
    """An operation would produce a value too large for its level."""


@dataclass(frozen=True)
class GrowthProfile:
    """Growth law of the size bound: smallness exponent k and log2 of f.

    log_f must be strictly increasing and is expected to be superadditive
    (log_f(a+b) >= log_f(a) + log_f(b)); the default profile is.  Where a
    custom profile is not, product slack clamps at zero, which keeps bounds
    sound (they only get looser).
    """

    k: int | Fraction
    log_f: Callable[[int], int | Fraction]

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"smallness exponent must be >= 0, got {self.k!r}")


def _default_log_f(m: int):
    # f(m) = 2^(m * ceil(log2(m+1))); ceil(log2(m+1)) == m.bit_length()
    return 0 if m <= 0 else m * m.bit_length()


def default_profile(k: int = 8) -> GrowthProfile:
    return GrowthProfile(k=k, log_f=_default_log_f)


def _log_f(profile: GrowthProfile, m: int):
    return 0 if m <= 0 else profile.log_f(m)


def level_budget(profile: GrowthProfile, level: int):
    """Largest admissible log2 size at a level: log2 f(level+1) + (level+1)*k."""
    if not isinstance(level, int) or level < 1:
        raise ValueError(f"level must be an integer >= 1, got {level!r}")
    return _log_f(profile, level + 1) + (level + 1) * profile.k


def product_slack(profile: GrowthProfile, m1: int, m2: int):
    """Extra log2 headroom a product needs beyond the sum of its bounds."""
    s = _log_f(profile, m1 + m2) - _log_f(profile, m1) - _log_f(profile, m2)
    return s if s > 0 else 0


def check_hiding(a_bound, b_bound, profile: GrowthProfile) -> bool:
    """True when a uniform value of size 2^a statistically hides an additive
    term of size 2^b, i.e. a > b + k."""
    return a_bound > b_bound + profile.k


def validate_profile(profile: GrowthProfile, up_to: int) -> None:
    prev = _log_f(profile, 0)
    for m in range(1, up_to + 1):
        cur = _log_f(profile, m)
        if cur <= prev:
            raise ValueError(f"log_f must be strictly increasing, fails at m={m}")
        prev = cur


@dataclass(frozen=True)
class BoundedScalar:
    """Exponent value with its log2 size bound and fresh-factor count."""

    value: int
    log_bound: int | Fraction
    factors: int


@dataclass(frozen=True)
class BoundedElement:
    """Reference element plus size bookkeeping.

    Equality is on the underlying element only; bounds are bookkeeping, and
    two routes to the same group element may carry different bounds.
    """

    inner: mlmap.LevelledElement
    log_bound: int | Fraction
    factors: int
    backend: "BoundedBackend"

    @property
    def level(self) -> int:
        return self.inner.level

    def __eq__(self, other):
        if isinstance(other, BoundedElement):
            return self.inner == other.inner
        return NotImplemented

    __hash__ = None

    def pair(self, other: "BoundedElement") -> "BoundedElement":
        other = self.backend._expect(other)
        bound = (
            self.log_bound
            + other.log_bound
            + product_slack(self.backend.profile, self.factors, other.factors)
        )
        return self.backend._make(
            self.inner.pair(other.inner), bound, self.factors + other.factors
        )

    def mul(self, other: "BoundedElement") -> "BoundedElement":
        other = self.backend._expect(other)
        return self.backend._make(
            self.inner.mul(other.inner),
            max(self.log_bound, other.log_bound),
            max(self.factors, other.factors),
        )

    __mul__ = mul

    def inv(self) -> "BoundedElement":
        return self.backend._make(self.inner.inv(), self.log_bound, self.factors)

    def pow(self, scalar: BoundedScalar) -> "BoundedElement":
        if not isinstance(scalar, BoundedScalar):
            raise TypeError("bounded elements take bounded scalars")
        bound = (
            self.log_bound
            + scalar.log_bound
            + product_slack(self.backend.profile, self.factors, scalar.factors)
        )
        return self.backend._make(
            self.inner.pow(scalar.value), bound, self.factors + scalar.factors
        )

    def is_identity(self) -> bool:
        return self.inner.is_identity()


class BoundedBackend:
    """Decorator around ExponentBackend enforcing per-level size budgets.

    Values are identical to the wrapped backend's; only bounds are added.
    The backend records the largest bound seen per level so callers can
    report budget utilization.
    """

    def __init__(self, base: mlmap.ExponentBackend, profile: GrowthProfile):
        validate_profile(profile, 2 * base.gd.k + 2)
        self.base = base
        self.profile = profile
        self.max_seen: dict[int, int | Fraction] = {}

    @property
    def gd(self) -> mlmap.GroupDescriptor:
        return self.base.gd

    @property
    def p(self) -> int:
        return self.base.gd.p

    @property
    def k(self) -> int:
        return self.base.gd.k

    def _expect(self, x) -> BoundedElement:
        if not isinstance(x, BoundedElement):
            raise TypeError(f"expected a bounded element, got {type(x).__name__}")
        return x

    def _make(self, inner: mlmap.LevelledElement, bound, factors: int) -> BoundedElement:
        budget = level_budget(self.profile, inner.level)
        if bound > budget:
            raise BudgetExceeded(
                f"level {inner.level}: log2 size bound {bound} exceeds budget {budget}"
            )
        seen = self.max_seen.get(inner.level)
        if seen is None or bound > seen:
            self.max_seen[inner.level] = bound
        return BoundedElement(inner, bound, factors, self)

    # scalar side

    def rand_small(self, rng: random.Random) -> BoundedScalar:
        return BoundedScalar(self.base.rand_small(rng), self.profile.k, 1)

    def rand_wire(self, level: int, rng: random.Random) -> BoundedScalar:
        return BoundedScalar(
            self.base.rand_wire(level, rng),
            level_budget(self.profile, level),
            level + 1,
        )

    def scalar_const(self, value: int) -> BoundedScalar:
        if value in (0, 1):
            return BoundedScalar(value, 0, 0)
        return BoundedScalar(value % self.p, value.bit_length(), 1)

    def s_mul(self, a: BoundedScalar, b: BoundedScalar) -> BoundedScalar:
        return BoundedScalar(
            self.base.s_mul(a.value, b.value),
            a.log_bound + b.log_bound + product_slack(self.profile, a.factors, b.factors),
            a.factors + b.factors,
        )

    def s_sub(self, a: BoundedScalar, b: BoundedScalar) -> BoundedScalar:
        return BoundedScalar(
            self.base.s_sub(a.value, b.value),
            max(a.log_bound, b.log_bound),
            max(a.factors, b.factors),
        )

    # element side

    def encode(self, scalar: BoundedScalar, level: int) -> BoundedElement:
        if not isinstance(scalar, BoundedScalar):
            raise TypeError("bounded encode takes a bounded scalar")
        return self._make(
            self.base.encode(scalar.value, level), scalar.log_bound, scalar.factors
        )

    def generator(self, level: int) -> BoundedElement:
        return self._make(self.base.generator(level), 0, 0)

    def identity(self, level: int) -> BoundedElement:
        return self._make(self.base.identity(level), 0, 0)

    def rand_element(self, level: int, rng: random.Random) -> BoundedElement:
        return self._make(
            self.base.rand_element(level, rng),
            level_budget(self.profile, level),
            level + 1,
        )

    def sample_s(self, rng: random.Random) -> BoundedElement:
        """Fresh level-1 encoding of a small session exponent (bound k)."""
        return self._make(self.base.encode(self.base.rand_small(rng), 1), self.profile.k, 1)

    def wrap(self, element: mlmap.LevelledElement, log_bound, factors: int) -> BoundedElement:
        """Adopt an existing reference element at a stated bound (budget-checked)."""
        return self._make(element, log_bound, factors)

    def utilization(self) -> dict[int, tuple]:
        """Per level: (largest bound seen, budget)."""
        return {
            level: (self.max_seen[level], level_budget(self.profile, level))
            for level in sorted(self.max_seen)
        }
