"""Cells in Q_p, their subdivisions, and Riemann sums over them.

A cell of scale s is the closed ball ``{y : |y - c|_p <= p^-s}``, with
diameter ``p^-s``.  Its center is stored canonically as the rational
``sum_{j < s} r_j p^j`` made of the center's digits below position s.  Two
cells are then equal exactly when their (p, center, scale) triples are.
"""

from __future__ import annotations

import csv
import enum
import io
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple

from .errors import HypothesisError, PrecisionError, PrimeMismatchError
from .padic import PadicNumber, default_precision, parse_padic
from .valuation import check_prime, vp

__all__ = [
    "Cell", "Relation", "CellMeasure", "RiemannSum", "trichotomy",
    "integrate_real", "integrate_qell", "integrate_measure",
]


def _canonical_center(p: int, x, s: int) -> Fraction:
    if isinstance(x, PadicNumber):
        if x.p != p:
            raise PrimeMismatchError(p, x.p)
        if x.abs_precision < s:
            raise PrecisionError(f"center {x} is not known modulo {p}^{s}")
        if x.min_valuation >= s:
            return Fraction(0)
        v, u = x.v, x.u
    else:
        x = Fraction(x)
        if x == 0:
            return Fraction(0)
        v = vp(p, x)
        if v >= s:
            return Fraction(0)
        unit = x / Fraction(p) ** v
        u = unit.numerator * pow(unit.denominator, -1, p ** (s - v))
    return Fraction(u % p ** (s - v)) * Fraction(p) ** v


def _at_least(d, p: int, t: int) -> bool:
    """Decide ``v(d) >= t`` for a rational or a ball."""
    if isinstance(d, PadicNumber):
        if d.is_unit_kind():
            return d.v >= t
        if d.is_exact_zero() or d.abs_precision >= t:
            return True
        raise PrecisionError(f"undecidable at precision: v({d}) >= {t}")
    return d == 0 or vp(p, d) >= t


class Relation(enum.Enum):
    FIRST_INSIDE_SECOND = "first inside second"
    SECOND_INSIDE_FIRST = "second inside first"
    DISJOINT = "disjoint"
    EQUAL = "equal"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Cell:
    p: int
    center: Fraction
    scale: int

    def __init__(self, p, center, scale: int):
        p = check_prime(p)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "scale", int(scale))
        object.__setattr__(self, "center", _canonical_center(p, center, int(scale)))

    @classmethod
    def unit_ball(cls, p) -> Cell:
        """Z_p itself."""
        return cls(p, 0, 0)

    _LITERAL = re.compile(r"^cell\(\s*(\d+)\s*;\s*(.+?)\s*;\s*(-?\d+)\s*\)$")

    @classmethod
    def parse(cls, text: str) -> Cell:
        """Read ``cell(p; center; scale)``; the center is a rational or digit form."""
        m = cls._LITERAL.match(text.strip())
        if not m:
            raise ValueError(f"expected 'cell(p; center; scale)', got {text!r}")
        p, center, s = int(m.group(1)), m.group(2), int(m.group(3))
        if center.startswith(("p-adic(", "O(")):
            center = parse_padic(center, p)
        else:
            center = Fraction(center)
        return cls(p, center, s)

    @property
    def diameter(self) -> Fraction:
        return Fraction(self.p) ** -self.scale

    def contains(self, y) -> bool:
        """Whether ``|y - center|_p <= p^-scale``."""
        if isinstance(y, PadicNumber):
            if y.p != self.p:
                raise PrimeMismatchError(self.p, y.p)
            return _at_least(y - self.center, self.p, self.scale)
        return _at_least(Fraction(y) - self.center, self.p, self.scale)

    def subdivide(self, n: int) -> list[Cell]:
        """The p^n cells of scale ``scale + n``, ordered by residue r mod p^n."""
        if n < 0:
            raise ValueError("n must be nonnegative")
        step = Fraction(self.p) ** self.scale
        return [Cell(self.p, self.center + r * step, self.scale + n) for r in range(self.p ** n)]

    def __str__(self):
        return f"cell({self.p}; {self.center}; {self.scale})"


def trichotomy(c1: Cell, c2: Cell) -> Relation:
    """Cells are nested, equal, or disjoint; never partially overlapping."""
    if c1.p != c2.p:
        raise PrimeMismatchError(c1.p, c2.p)
    if c1.scale <= c2.scale:
        if not c1.contains(c2.center):
            return Relation.DISJOINT
        return Relation.EQUAL if c1.scale == c2.scale else Relation.SECOND_INSIDE_FIRST
    return Relation.FIRST_INSIDE_SECOND if c2.contains(c1.center) else Relation.DISJOINT


class RiemannSum(NamedTuple):
    """A level-n Riemann sum and, when a continuity modulus was given, its error bound."""

    value: Fraction
    error: Fraction | None


def integrate_real(f: Callable[[Fraction], Fraction], c: Cell, n: int,
                   modulus: Callable[[Fraction], Fraction] | None = None) -> RiemannSum:
    """``sum f(x_j) p^-n diam(c)`` over the subcell centers at level n.

    ``modulus(delta)`` bounds ``|f(x) - f(y)|`` for ``|x - y|_p <= delta``;
    the returned error is ``modulus(p^-(s+n)) * diam(c)``.
    """
    cells = c.subdivide(n)
    weight = c.diameter / c.p ** n
    value = sum((Fraction(f(sub.center)) for sub in cells), Fraction(0)) * weight
    error = None
    if modulus is not None:
        error = Fraction(modulus(weight)) * c.diameter
    return RiemannSum(value, error)


def integrate_qell(f: Callable[[Fraction], object], c: Cell, n: int, ell: int,
                   prec: int | None = None) -> PadicNumber:
    """Riemann sum of a Q_ell-valued function, ell != p.

    The weights ``p^-n diam(c)`` are ell-adic units, so the result is bounded
    by ``max |f|_ell``.  Rational values of f are embedded at precision prec.
    """
    ell = check_prime(ell)
    if ell == c.p:
        raise HypothesisError("ell != p", "use measure-based integral")
    weight = PadicNumber.from_rational(c.diameter / c.p ** n, ell, prec)
    total = PadicNumber.exact_zero(ell)
    for sub in c.subdivide(n):
        y = f(sub.center)
        if not isinstance(y, PadicNumber):
            y = PadicNumber.from_rational(y, ell, prec)
        elif y.p != ell:
            raise PrimeMismatchError(ell, y.p)
        total = total + y * weight
    return total


class CellMeasure:
    """Rational-valued additive function on cells.

    ``bound`` is an optional ``M`` with ``|mu(C)|_p <= M`` for every cell at
    or below the measure's scale.
    """

    def __init__(self, p, value: Callable[[Cell], Fraction], bound: Fraction | None = None,
                 name: str = "measure"):
        self.p = check_prime(p)
        self._value = value
        self.bound = bound
        self.name = name

    def __call__(self, c: Cell) -> Fraction:
        if c.p != self.p:
            raise PrimeMismatchError(self.p, c.p)
        return Fraction(self._value(c))

    @classmethod
    def haar(cls, p) -> CellMeasure:
        """``mu(C) = diam(C)``."""
        return cls(p, lambda c: c.diameter, name="haar")

    @classmethod
    def dirac(cls, p, point) -> CellMeasure:
        """Unit mass at a rational point; bounded by 1."""
        point = Fraction(point)
        return cls(p, lambda c: 1 if c.contains(point) else 0, Fraction(1), name=f"dirac({point})")

    @classmethod
    def from_table(cls, p, rows: Iterable[tuple[int, int, Fraction]]) -> CellMeasure:
        """Values on cells ``residue + p^scale Z_p`` with ``0 <= residue < p^scale``."""
        p = check_prime(p)
        table = {}
        for s, r, val in rows:
            s, r = int(s), int(r)
            if s < 0 or not 0 <= r < p ** s:
                raise ValueError(f"row ({s}, {r}) is not a cell of Z_p")
            table[s, r] = Fraction(val)
        nonzero = [v for v in table.values() if v]
        bound = max((Fraction(p) ** -vp(p, v) for v in nonzero), default=Fraction(0))

        def value(c: Cell) -> Fraction:
            if c.center.denominator != 1 or (c.scale, int(c.center)) not in table:
                raise KeyError(f"measure table has no entry for {c}")
            return table[c.scale, int(c.center)]

        return cls(p, value, bound, name="table")

    @classmethod
    def parse_table(cls, p, text: str) -> CellMeasure:
        """Read ``scale,residue,value`` CSV rows (``#`` lines are comments)."""
        rows = []
        for rec in csv.reader(io.StringIO(text)):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if rec[0].strip() == "scale":
                continue
            s, r, val = (x.strip() for x in rec)
            rows.append((int(s), int(r), Fraction(val)))
        return cls.from_table(p, rows)

    def is_additive(self, c: Cell, depth: int = 1) -> bool:
        """Check ``mu(C) == sum mu(children)`` for every cell down to ``depth`` levels."""
        kids = c.subdivide(1)
        if self(c) != sum(self(k) for k in kids):
            return False
        return depth <= 1 or all(self.is_additive(k, depth - 1) for k in kids)


def integrate_measure(f: Callable[[Fraction], object], mu: CellMeasure, c: Cell,
                      n: int, prec: int | None = None) -> PadicNumber:
    """``sum f(x_j) mu(C_j)`` over the level-n subcells of c, in Q_p.

    Rational values of f are multiplied by the masses exactly and each term
    is embedded with absolute precision prec.
    """
    if mu.p != c.p:
        raise PrimeMismatchError(mu.p, c.p)
    cells = c.subdivide(n)
    masses = [mu(sub) for sub in cells]
    if sum(masses) != mu(c):
        raise HypothesisError("measure additive", f"measure inconsistent on {c} at level {n}")
    N = default_precision() if prec is None else prec
    total = PadicNumber.exact_zero(c.p)
    for sub, m in zip(cells, masses):
        if m == 0:
            continue
        y = f(sub.center)
        if isinstance(y, PadicNumber):
            if y.p != c.p:
                raise PrimeMismatchError(c.p, y.p)
            term = y * PadicNumber.from_rational(m, c.p, max(1, N - vp(c.p, m)))
        else:
            # exact rational term: embed it with absolute precision N
            t = Fraction(y) * m
            term = PadicNumber.from_rational(t, c.p, max(1, N - vp(c.p, t))) if t else PadicNumber.exact_zero(c.p)
        total = total + term
    return total
