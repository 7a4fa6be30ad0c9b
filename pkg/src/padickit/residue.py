"""Residue rings Z/p^jZ, reduction from Z_p, and finite-level characters."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisError, PrecisionError, PrimeMismatchError
from .padic import PadicNumber, default_precision
from .valuation import check_prime


@dataclass(frozen=True)
class ResidueClass:
    """An element of Z/p^jZ, stored as its least nonnegative representative."""

    p: int
    level: int
    rep: int

    def __post_init__(self):
        check_prime(self.p)
        if self.level < 1:
            raise ValueError("level must be positive")
        object.__setattr__(self, "rep", self.rep % self.p ** self.level)

    @property
    def modulus(self) -> int:
        return self.p ** self.level

    def _check(self, other) -> ResidueClass:
        if isinstance(other, int):
            return ResidueClass(self.p, self.level, other)
        if not isinstance(other, ResidueClass):
            return NotImplemented
        if other.p != self.p:
            raise PrimeMismatchError(self.p, other.p)
        if other.level != self.level:
            raise ValueError(f"level mismatch: {self.level} != {other.level}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return ResidueClass(self.p, self.level, self.rep + other.rep)

    __radd__ = __add__

    def __neg__(self):
        return ResidueClass(self.p, self.level, -self.rep)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return ResidueClass(self.p, self.level, self.rep - other.rep)

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return ResidueClass(self.p, self.level, self.rep * other.rep)

    __rmul__ = __mul__

    def coarsen(self, level: int) -> ResidueClass:
        """Image in Z/p^level Z for ``level <= self.level``."""
        if not 1 <= level <= self.level:
            raise ValueError(f"cannot coarsen level {self.level} to {level}")
        return ResidueClass(self.p, level, self.rep)

    def __str__(self):
        return f"{self.rep} mod {self.p}^{self.level}"


def reduce(x, j: int, p: int | None = None) -> ResidueClass:
    """The class of ``x`` in Z_p / p^j Z_p = Z/p^jZ.

    ``x`` may be a PadicNumber, or a rational with ``p`` given.
    """
    if not isinstance(x, PadicNumber):
        if p is None:
            raise ValueError("a prime is needed to reduce a rational")
        x = Fraction(x)
        if x and x.denominator % p == 0:
            raise HypothesisError("x in Z_p", f"{x} has denominator divisible by {p}")
        m = p ** j
        return ResidueClass(p, j, x.numerator * pow(x.denominator, -1, m) if x else 0)
    if p is not None and p != x.p:
        raise PrimeMismatchError(p, x.p)
    if x.abs_precision < j:
        raise PrecisionError(f"insufficient precision: {x} is known only mod {x.p}^{x.abs_precision}")
    if not x.is_integral():
        raise HypothesisError("x in Z_p", f"v(x) = {x.v}")
    if not x.is_unit_kind():
        return ResidueClass(x.p, j, 0)
    return ResidueClass(x.p, j, x.u * x.p ** x.v)


def lift(r: ResidueClass, N: int | None = None) -> PadicNumber:
    """The integer representative of r as an element of Z_p (a section of reduce)."""
    if r.rep == 0:
        return PadicNumber.exact_zero(r.p)
    N = max(r.level, default_precision() if N is None else N)
    return PadicNumber.from_rational(r.rep, r.p, N)


def unit_inverse(r: ResidueClass) -> ResidueClass:
    if r.rep % r.p == 0:
        raise HypothesisError("unit residue", f"{r} is not a unit")
    return ResidueClass(r.p, r.level, pow(r.rep, -1, r.modulus))


@dataclass(frozen=True)
class FiniteCharacter:
    """``x -> exp(2 pi i k x / p^j)``, a character of Z_p trivial on p^jZ_p.

    Values are rotation numbers in ``[0, 1)``, so characters stay exact.
    """

    p: int
    level: int
    k: int

    def __post_init__(self):
        check_prime(self.p)
        if self.level < 1:
            raise ValueError("level must be positive")
        object.__setattr__(self, "k", self.k % self.p ** self.level)

    def is_trivial(self) -> bool:
        return self.k == 0

    def __call__(self, x) -> Fraction:
        r = x if isinstance(x, ResidueClass) else reduce(x, self.level, self.p)
        if r.p != self.p:
            raise PrimeMismatchError(self.p, r.p)
        if r.level != self.level:
            r = r.coarsen(self.level)
        m = self.p ** self.level
        return Fraction(self.k * r.rep % m, m)


character_eval = FiniteCharacter.__call__


def render_rotation(rot: Fraction, p: int, level: int) -> str:
    """Show a rotation as ``m/p^j`` with the denominator written out."""
    m = p ** level
    return f"{rot * m}/{m}"
