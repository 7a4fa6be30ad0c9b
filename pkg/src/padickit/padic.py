"""Capped relative precision p-adic numbers.

A :class:`PadicNumber` is a ball in Q_p.  There are three kinds:

* exact zero, the additive identity;
* a zero ball ``O(p^a)``, a value known only to have valuation >= a;
* a unit ball ``p^v * u + O(p^(v+N))`` with ``0 < u < p^N`` and ``p`` not
  dividing ``u``.

Every operation returns the smallest representable ball that contains all
results of applying the operation to members of the operand balls, so an
exact rational computation run alongside always lands inside the result.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

from .errors import PadicZeroDivisionError, PrecisionError, PrimeMismatchError
from .valuation import _vp_int, check_prime, vp

__all__ = [
    "PadicNumber", "PrecisionPolicy", "precision", "default_precision",
    "from_rational", "dist_p", "eq_mod_pk", "AtMost", "parse_padic",
]

EXACT_ZERO, ZERO_BALL, UNIT = "exact_zero", "zero_ball", "unit"
INF = math.inf


@dataclass(frozen=True)
class PrecisionPolicy:
    default_rel_precision: int = 32

    def __post_init__(self):
        if self.default_rel_precision < 1:
            raise ValueError("default relative precision must be >= 1")


_policy = contextvars.ContextVar("padic_policy", default=PrecisionPolicy())


def default_precision() -> int:
    return _policy.get().default_rel_precision


@contextlib.contextmanager
def precision(n: int):
    """Temporarily change the default relative precision."""
    token = _policy.set(PrecisionPolicy(n))
    try:
        yield
    finally:
        _policy.reset(token)


class PadicNumber:
    __slots__ = ("p", "kind", "v", "u", "N", "_abs")

    def __init__(self, p, kind, v=0, u=0, N=0, abs_prec=INF):
        # Use the classmethod constructors; this one trusts its arguments.
        self.p = p
        self.kind = kind
        self.v = v
        self.u = u
        self.N = N
        self._abs = abs_prec

    # -- constructors -----------------------------------------------------

    @classmethod
    def exact_zero(cls, p) -> PadicNumber:
        return cls(check_prime(p), EXACT_ZERO)

    @classmethod
    def zero_ball(cls, p, a: int) -> PadicNumber:
        return cls(check_prime(p), ZERO_BALL, abs_prec=int(a))

    @classmethod
    def unit(cls, p, v: int, u: int, N: int) -> PadicNumber:
        p = check_prime(p)
        if N < 1:
            raise ValueError("relative precision must be >= 1")
        u %= p ** N
        if u % p == 0:
            raise ValueError(f"unit part {u} is divisible by {p}")
        return cls(p, UNIT, int(v), u, int(N), int(v) + int(N))

    @classmethod
    def _ball(cls, p, n: int, shift: int, a) -> PadicNumber:
        """Tightest ball around ``n * p^shift`` with absolute precision ``a``."""
        if n == 0:
            return cls(p, EXACT_ZERO) if a == INF else cls(p, ZERO_BALL, abs_prec=a)
        k = _vp_int(p, n)
        v = shift + k
        if v >= a:
            return cls(p, ZERO_BALL, abs_prec=a)
        N = a - v
        return cls(p, UNIT, v, (n // p ** k) % p ** N, N, a)

    @classmethod
    def from_rational(cls, x, p, N: int | None = None) -> PadicNumber:
        p = check_prime(p)
        x = Fraction(x)
        if x == 0:
            return cls(p, EXACT_ZERO)
        N = default_precision() if N is None else int(N)
        if N < 1:
            raise ValueError("relative precision must be >= 1")
        v = vp(p, x)
        num = x.numerator // p ** max(v, 0)
        den = x.denominator // p ** max(-v, 0)
        mod = p ** N
        u = num * pow(den, -1, mod) % mod
        return cls(p, UNIT, v, u, N, v + N)

    # -- inspection -------------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.kind == EXACT_ZERO

    def is_zero_ball(self) -> bool:
        return self.kind == ZERO_BALL

    def is_unit_kind(self) -> bool:
        return self.kind == UNIT

    def is_zero(self) -> bool:
        """True when the ball contains 0 (exact zero or a zero ball)."""
        return self.kind != UNIT

    @property
    def abs_precision(self):
        return self._abs

    @property
    def rel_precision(self) -> int:
        return self.N if self.kind == UNIT else 0

    @property
    def valuation(self):
        """Exact valuation; ``inf`` for exact zero, PrecisionError for a zero ball."""
        if self.kind == UNIT:
            return self.v
        if self.kind == EXACT_ZERO:
            return INF
        raise PrecisionError(f"valuation of O({self.p}^{self._abs}) is undetermined")

    @property
    def min_valuation(self):
        """A lower bound on the valuation of every member of the ball."""
        return self.v if self.kind == UNIT else self._abs

    def norm(self) -> Fraction:
        """``|x|_p`` as an exact rational, always an integer power of p."""
        if self.kind == UNIT:
            return Fraction(self.p) ** -self.v
        if self.kind == EXACT_ZERO:
            return Fraction(0)
        raise PrecisionError(f"|O({self.p}^{self._abs})|_p is undetermined")

    def norm_bound(self) -> Fraction:
        if self.kind == EXACT_ZERO:
            return Fraction(0)
        return Fraction(self.p) ** -self.min_valuation

    def is_integral(self) -> bool:
        """Membership in Z_p."""
        if self.kind == ZERO_BALL and self._abs < 0:
            raise PrecisionError("ball straddles Z_p")
        return self.kind != UNIT or self.v >= 0

    def representative(self) -> Fraction:
        """The canonical rational center ``p^v * u`` (0 for zero kinds)."""
        if self.kind != UNIT:
            return Fraction(0)
        return Fraction(self.u) * Fraction(self.p) ** self.v

    def contains(self, x) -> bool:
        """Whether the exact rational ``x`` lies in the ball."""
        x = Fraction(x)
        d = x - self.representative()
        if self.kind == EXACT_ZERO:
            return x == 0
        return d == 0 or vp(self.p, d) >= self._abs

    def unit_part(self) -> PadicNumber:
        """``p^-v * x``, the element of absolute value 1 with the same digits."""
        if self.kind != UNIT:
            raise PrecisionError("zero kinds have no unit part")
        return PadicNumber(self.p, UNIT, 0, self.u, self.N, self.N)

    def shift(self, k: int) -> PadicNumber:
        """Exact multiplication by ``p^k``."""
        if self.kind == UNIT:
            return PadicNumber(self.p, UNIT, self.v + k, self.u, self.N, self._abs + k)
        if self.kind == ZERO_BALL:
            return PadicNumber(self.p, ZERO_BALL, abs_prec=self._abs + k)
        return self

    def add_bigoh(self, a) -> PadicNumber:
        """Enlarge the ball to absolute precision ``min(current, a)``."""
        if a >= self._abs:
            return self
        if self.kind == UNIT:
            return PadicNumber._ball(self.p, self.u, self.v, a)
        return PadicNumber(self.p, ZERO_BALL, abs_prec=a)

    def lift_to(self, N: int) -> PadicNumber:
        """Treat the representative as exact and re-embed at relative precision N."""
        if self.kind != UNIT:
            return self
        return PadicNumber._ball(self.p, self.u, self.v, self.v + N)

    def digits(self) -> list[tuple[int, int]]:
        """Base-p digits ``(j, r_j)`` for ``j = v .. v+N-1``, least significant first."""
        if self.kind != UNIT:
            raise PrecisionError("no canonical digits for a zero value")
        out, u = [], self.u
        for j in range(self.v, self.v + self.N):
            u, r = divmod(u, self.p)
            out.append((j, r))
        return out

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other) -> PadicNumber:
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise PrimeMismatchError(self.p, other.p)
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            other = Fraction(other)
            if other == 0:
                return PadicNumber(self.p, EXACT_ZERO)
            N = default_precision()
            if self._abs != INF:
                N = max(N, self._abs - vp(self.p, other))
            if self.kind == UNIT:
                N = max(N, self.N)
            return PadicNumber.from_rational(other, self.p, N)
        return NotImplemented

    def __add__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        x = self
        if x.kind == EXACT_ZERO:
            return y
        if y.kind == EXACT_ZERO:
            return x
        a = min(x._abs, y._abs)
        if x.kind == ZERO_BALL and y.kind == ZERO_BALL:
            return PadicNumber(x.p, ZERO_BALL, abs_prec=a)
        if x.kind == ZERO_BALL:
            return PadicNumber._ball(x.p, y.u, y.v, a)
        if y.kind == ZERO_BALL:
            return PadicNumber._ball(x.p, x.u, x.v, a)
        m = min(x.v, y.v)
        p = x.p
        n = x.u * p ** (x.v - m) + y.u * p ** (y.v - m)
        return PadicNumber._ball(p, n, m, a)

    __radd__ = __add__

    def __neg__(self):
        if self.kind != UNIT:
            return self
        return PadicNumber(self.p, UNIT, self.v, (-self.u) % self.p ** self.N, self.N, self._abs)

    def __sub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return self + (-y)

    def __rsub__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return y + (-self)

    def __mul__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        x = self
        if x.kind == EXACT_ZERO or y.kind == EXACT_ZERO:
            return PadicNumber(x.p, EXACT_ZERO)
        if x.kind == UNIT and y.kind == UNIT:
            N = min(x.N, y.N)
            v = x.v + y.v
            return PadicNumber(x.p, UNIT, v, x.u * y.u % x.p ** N, N, v + N)
        # at least one zero ball: every product has valuation >= sum of lower bounds
        return PadicNumber(x.p, ZERO_BALL, abs_prec=x.min_valuation + y.min_valuation)

    __rmul__ = __mul__

    def invert(self) -> PadicNumber:
        if self.kind == EXACT_ZERO:
            raise PadicZeroDivisionError("division by zero")
        if self.kind == ZERO_BALL:
            raise PadicZeroDivisionError(
                f"cannot invert O({self.p}^{self._abs}): indistinguishable from zero at current precision")
        mod = self.p ** self.N
        return PadicNumber(self.p, UNIT, -self.v, pow(self.u, -1, mod), self.N, self.N - self.v)

    def __truediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return self * y.invert()

    def __rtruediv__(self, other):
        y = self._coerce(other)
        if y is NotImplemented:
            return y
        return y * self.invert()

    def __pow__(self, n):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.invert() ** -n
        if n == 0:
            N = self.N if self.kind == UNIT else default_precision()
            return PadicNumber(self.p, UNIT, 0, 1, N, N)
        result, base = None, self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison and display --------------------------------------------

    def _key(self):
        return (self.p, self.kind, self.v, self.u, self.N, self._abs)

    def __eq__(self, other):
        """Structural equality of balls; use :func:`eq_mod_pk` for congruence."""
        if not isinstance(other, PadicNumber):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.kind == EXACT_ZERO:
            return f"PadicNumber.exact_zero({self.p})"
        if self.kind == ZERO_BALL:
            return f"PadicNumber.zero_ball({self.p}, {self._abs})"
        return f"PadicNumber.unit({self.p}, v={self.v}, u={self.u}, N={self.N})"

    def __str__(self):
        if self.kind == EXACT_ZERO:
            return "0"
        if self.kind == ZERO_BALL:
            return f"O({self.p}^{self._abs})"
        ds = " ".join(str(r) for _, r in self.digits())
        return f"p-adic({self.p}; {self.v}; {ds}; O({self.p}^{self._abs}))"


def from_rational(x, p, N: int | None = None) -> PadicNumber:
    """Embed a rational into Q_p at relative precision N (policy default if None)."""
    return PadicNumber.from_rational(x, p, N)


class AtMost(NamedTuple):
    """An upper bound ``<= bound`` on a distance that is not known exactly."""

    bound: Fraction

    def __str__(self):
        return f"<= {self.bound}"


def dist_p(x: PadicNumber, y: PadicNumber):
    """``|x - y|_p``: an exact Fraction, or :class:`AtMost` for a zero ball."""
    d = x - y
    if d.is_zero_ball():
        return AtMost(d.norm_bound())
    return d.norm()


def eq_mod_pk(x: PadicNumber, y: PadicNumber, k: int) -> bool:
    """Whether the balls agree modulo ``p^k``; both need absolute precision >= k."""
    if x.p != y.p:
        raise PrimeMismatchError(x.p, y.p)
    for z in (x, y):
        if z.abs_precision < k:
            raise PrecisionError(
                f"undecidable at precision: {z} is known only mod {z.p}^{z.abs_precision} < {z.p}^{k}")
    return (x - y).min_valuation >= k


_PADIC_RE = re.compile(
    r"^p-adic\(\s*(\d+)\s*;\s*(-?\d+)\s*;\s*([\d\s]+?)\s*;\s*O\(\s*(\d+)\s*\^\s*\(?(-?\d+)\)?\s*\)\s*\)$")
_BIGOH_RE = re.compile(r"^O\(\s*(\d+)\s*\^\s*\(?(-?\d+)\)?\s*\)$")


def parse_padic(text: str, p: int | None = None, N: int | None = None) -> PadicNumber:
    """Parse the digit form, ``O(p^a)``, or a plain rational ``a/b``."""
    text = text.strip()
    m = _PADIC_RE.match(text)
    if m:
        q, v, ds, q2, a = m.groups()
        q = check_prime(int(q))
        if int(q2) != q or (p is not None and p != q):
            raise PrimeMismatchError(q, int(q2) if int(q2) != q else p)
        digits = [int(d) for d in ds.split()]
        if any(d >= q for d in digits):
            raise ValueError(f"digit out of range for p = {q}")
        if int(a) != int(v) + len(digits):
            raise ValueError("O-term does not match digit count")
        u = sum(d * q ** i for i, d in enumerate(digits))
        return PadicNumber._ball(q, u, int(v), int(a))
    m = _BIGOH_RE.match(text)
    if m:
        q = check_prime(int(m.group(1)))
        if p is not None and p != q:
            raise PrimeMismatchError(q, p)
        return PadicNumber.zero_ball(q, int(m.group(2)))
    if p is None:
        raise ValueError(f"a prime is needed to embed the rational {text!r}")
    return PadicNumber.from_rational(Fraction(text), p, N)
