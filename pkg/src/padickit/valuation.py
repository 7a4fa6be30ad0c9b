"""p-adic valuations on Q, norm oracles, and the classification of norms on Q.

Norm values are kept exact.  A value such as ``3**(-1/2)`` is not rational,
so oracles store each value as a :class:`PowerProduct`, a finite product of
primes raised to rational exponents.  Products, quotients, rational powers
and order comparisons of power products are all decidable with integer
arithmetic.  Only sums (needed for the ordinary and quasi triangle
inequalities) fall back to interval arithmetic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import NormAxiomError

__all__ = [
    "is_prime", "check_prime", "factorize", "vp", "abs_p", "vp_array",
    "PowerProduct", "NormOracle", "NormClass", "Violation",
    "check_norm_axioms", "classify_norm", "bad_primes",
]


@lru_cache(maxsize=4096)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def check_prime(p) -> int:
    """Return ``p`` as an int, raising ValueError unless it is prime."""
    if isinstance(p, bool) or int(p) != p:
        raise ValueError(f"{p!r} is not an integer")
    p = int(p)
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return p


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization of a nonzero integer (sign dropped)."""
    n = abs(int(n))
    if n == 0:
        raise ValueError("cannot factor 0")
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def _vp_int(p: int, n: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(p: int, x) -> int:
    """Exponent of ``p`` in the nonzero rational ``x``.

    >>> vp(5, 50), vp(2, Fraction(7, 8))
    (2, -3)
    """
    p = check_prime(p)
    x = Fraction(x)
    if x == 0:
        raise ValueError("valuation of zero undefined")
    return _vp_int(p, x.numerator) - _vp_int(p, x.denominator)


def abs_p(p: int, x) -> Fraction:
    """The p-adic absolute value ``p**-vp(x)``, with ``abs_p(p, 0) == 0``."""
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    return Fraction(p) ** -vp(p, x)


# Sentinel valuation for zero entries in vp_array.
ZERO_VALUATION = np.iinfo(np.int64).max // 2


def vp_array(p: int, values) -> np.ndarray:
    """Vectorized valuation of an integer array; zeros map to ZERO_VALUATION."""
    p = check_prime(p)
    a = np.abs(np.asarray(values, dtype=np.int64)).ravel()
    out = np.zeros(a.shape, dtype=np.int64)
    zero = a == 0
    # only the entries still divisible by p are carried to the next round
    idx = np.flatnonzero((a % p == 0) & ~zero)
    rest = a[idx]
    while idx.size:
        rest //= p
        out[idx] += 1
        keep = rest % p == 0
        idx, rest = idx[keep], rest[keep]
    out[zero] = ZERO_VALUATION
    out = out.reshape(np.shape(values))
    return out


@total_ordering
class PowerProduct:
    """Exact positive real ``prod(q**e)`` with primes q and rational e.

    >>> PowerProduct.from_rational(12) == PowerProduct({2: 2, 3: 1})
    True
    >>> PowerProduct({3: Fraction(-1, 2)}) < 1
    True
    """

    __slots__ = ("exponents",)

    def __init__(self, exponents: Mapping[int, Fraction] = ()):
        exps = {}
        for q, e in dict(exponents).items():
            e = Fraction(e)
            if e:
                exps[check_prime(q)] = e
        self.exponents = dict(sorted(exps.items()))

    @classmethod
    def from_rational(cls, x) -> PowerProduct:
        x = Fraction(x)
        if x <= 0:
            raise ValueError(f"norm values must be positive, got {x}")
        exps = {q: Fraction(e) for q, e in factorize(x.numerator).items()}
        for q, e in factorize(x.denominator).items():
            exps[q] = exps.get(q, 0) - e
        return cls(exps)

    @classmethod
    def parse(cls, text: str) -> PowerProduct:
        """Parse ``a/b`` or ``base^exponent`` with rational base and exponent."""
        text = text.strip()
        if "^" in text:
            base, exp = (t.strip().removeprefix("(").removesuffix(")") for t in text.split("^", 1))
            return cls.from_rational(Fraction(base)) ** Fraction(exp)
        return cls.from_rational(Fraction(text))

    def __mul__(self, other):
        other = _as_pp(other)
        exps = dict(self.exponents)
        for q, e in other.exponents.items():
            exps[q] = exps.get(q, 0) + e
        return PowerProduct(exps)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * _as_pp(other) ** -1

    def __pow__(self, e):
        e = Fraction(e)
        return PowerProduct({q: x * e for q, x in self.exponents.items()})

    def _int_pair(self) -> tuple[int, int, int]:
        # self**D == num/den with integers; D is the lcm of exponent denominators
        d = math.lcm(*(e.denominator for e in self.exponents.values())) if self.exponents else 1
        num = den = 1
        for q, e in self.exponents.items():
            k = e * d
            if k > 0:
                num *= q ** int(k)
            else:
                den *= q ** int(-k)
        return num, den, d

    def compare_one(self) -> int:
        num, den, _ = self._int_pair()
        return (num > den) - (num < den)

    def __eq__(self, other):
        try:
            other = _as_pp(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.exponents == other.exponents

    def __lt__(self, other):
        return (self / _as_pp(other)).compare_one() < 0

    def __hash__(self):
        return hash(tuple(self.exponents.items()))

    def is_rational(self) -> bool:
        return all(e.denominator == 1 for e in self.exponents.values())

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is irrational")
        out = Fraction(1)
        for q, e in self.exponents.items():
            out *= Fraction(q) ** int(e)
        return out

    def log_ratio(self, n: int) -> Fraction | None:
        """Exact ``log(self)/log(n)`` when it is rational, else None."""
        target = PowerProduct.from_rational(n)
        if not target.exponents:
            raise ValueError("log base must differ from 1")
        q0, e0 = next(iter(target.exponents.items()))
        ratio = self.exponents.get(q0, Fraction(0)) / e0
        return ratio if self == target ** ratio else None

    def interval(self, dps: int):
        from mpmath import iv
        iv.dps = dps
        out = iv.mpf(1)
        for q, e in self.exponents.items():
            out *= iv.mpf(q) ** (iv.mpf(e.numerator) / e.denominator)
        return out

    def __repr__(self):
        if self.is_rational():
            return f"PowerProduct({self.to_fraction()})"
        return f"PowerProduct({self.exponents})"

    def __str__(self):
        if self.is_rational():
            return str(self.to_fraction())
        return "*".join(f"{q}^{e}" for q, e in self.exponents.items())


def _as_pp(x) -> PowerProduct:
    if isinstance(x, PowerProduct):
        return x
    if isinstance(x, (int, Fraction)):
        return PowerProduct.from_rational(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a norm value")


def _sum_leq(lhs: Iterable[PowerProduct], rhs: Iterable[PowerProduct], scale=Fraction(1)) -> bool:
    """Decide ``sum(lhs) <= scale * sum(rhs)``; exact when every term is rational."""
    lhs, rhs = list(lhs), list(rhs)
    if all(t.is_rational() for t in lhs + rhs):
        return sum(t.to_fraction() for t in lhs) <= scale * sum(t.to_fraction() for t in rhs)
    from mpmath import iv
    for dps in (30, 80, 200):
        a = sum((t.interval(dps) for t in lhs), iv.mpf(0))
        b = sum((t.interval(dps) for t in rhs), iv.mpf(0)) * (iv.mpf(scale.numerator) / scale.denominator)
        if a.b <= b.a:
            return True
        if a.a > b.b:
            return False
    # Unresolved at 200 digits: treat as the equality boundary.
    return True


class NormOracle:
    """Finite table ``n -> N(n)`` for integers ``1 <= n <= bound``.

    Values may be given as rationals or :class:`PowerProduct`.  ``N(-n)``
    is ``N(n)`` since every norm has ``N(-1) = 1``.
    """

    def __init__(self, values: Mapping[int, object], bound: int | None = None):
        table = {int(n): _as_pp(v) for n, v in values.items()}
        if bound is None:
            bound = max(table)
        if bound < 2:
            raise ValueError("oracle bound must be at least 2")
        missing = [n for n in range(1, bound + 1) if n not in table]
        if missing:
            raise ValueError(f"oracle is not total on [1, {bound}]: missing {missing[:5]}")
        if table[1] != PowerProduct():
            raise NormAxiomError(f"N(1) = {table[1]} != 1")
        self.bound = bound
        self.table = {n: table[n] for n in range(1, bound + 1)}

    @classmethod
    def from_function(cls, fn: Callable[[int], object], bound: int) -> NormOracle:
        return cls({n: fn(n) for n in range(1, bound + 1)}, bound)

    @classmethod
    def archimedean(cls, alpha, bound: int) -> NormOracle:
        alpha = Fraction(alpha)
        return cls.from_function(lambda n: PowerProduct.from_rational(n) ** alpha, bound)

    @classmethod
    def trivial(cls, bound: int) -> NormOracle:
        return cls.from_function(lambda n: 1, bound)

    @classmethod
    def padic(cls, p: int, a, bound: int) -> NormOracle:
        p, a = check_prime(p), Fraction(a)
        return cls.from_function(lambda n: PowerProduct({p: -a * vp(p, n)}), bound)

    @classmethod
    def parse(cls, text: str) -> NormOracle:
        """Read ``n<TAB>value`` lines; blank lines and ``#`` comments are skipped."""
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t") if "\t" in line else line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'n<TAB>value', got {line!r}")
            values[int(parts[0])] = PowerProduct.parse(parts[1])
        return cls(values)

    def __call__(self, n: int) -> PowerProduct:
        return self.table[abs(int(n))]

    def __contains__(self, n):
        return 1 <= abs(int(n)) <= self.bound


@dataclass(frozen=True)
class Violation:
    axiom: str
    args: tuple
    detail: str = ""


def check_norm_axioms(
    oracle: NormOracle,
    mode: str = "ultrametric",
    C=1,
    dyadic_samples: int = 64,
    seed: int = 0,
) -> list[Violation]:
    """Return every violated instance of the norm axioms on the oracle's range.

    ``mode`` selects the triangle variant: ``"ultrametric"``, ``"triangle"``
    or ``"quasi"`` (with constant ``C >= 1``).  Multiplicativity is checked on
    all pairs with product in range, the triangle variant on all pairs with
    sum in range, and the bound ``N(x_1 + ... + x_{2^l}) <= C^l sum N(x_j)`` on
    ``dyadic_samples`` random tuples.
    """
    if mode not in ("ultrametric", "triangle", "quasi"):
        raise ValueError(f"unknown mode {mode!r}")
    C = Fraction(C) if mode == "quasi" else Fraction(1)
    if C < 1:
        raise ValueError("quasi-triangle constant must be >= 1")
    B = oracle.bound
    N = oracle
    found = []
    for x in range(1, B + 1):
        for y in range(x, B // x + 1):
            if N(x * y) != N(x) * N(y):
                found.append(Violation("multiplicative", (x, y), f"N({x * y}) = {N(x * y)}"))
    for x in range(1, B + 1):
        for y in range(x, B - x + 1):
            lhs = N(x + y)
            if mode == "ultrametric":
                ok = lhs <= max(N(x), N(y))
            else:
                ok = _sum_leq([lhs], [N(x), N(y)], C)
            if not ok:
                found.append(Violation(mode, (x, y), f"N({x + y}) = {lhs}"))
    rng = random.Random(seed)
    for _ in range(dyadic_samples):
        l = rng.randint(1, 3)
        if 2 ** l > B:
            continue
        xs = [1] * 2 ** l
        budget = B - len(xs)
        for i in range(len(xs)):
            extra = rng.randint(0, budget // (len(xs) - i))
            xs[i] += extra
            budget -= extra
        if not _sum_leq([N(sum(xs))], [N(x) for x in xs], C ** l):
            found.append(Violation("dyadic", tuple(xs), f"l = {l}"))
    return found


@dataclass(frozen=True)
class NormClass:
    """Outcome of :func:`classify_norm`.

    ``kind`` is ``"archimedean"`` (``N = |x|**exponent``), ``"trivial"``, or
    ``"padic"`` (``N = |x|_p**exponent``).
    """

    kind: str
    exponent: Fraction | None = None
    p: int | None = None

    def __str__(self):
        if self.kind == "archimedean":
            return f"archimedean {self.exponent}"
        if self.kind == "padic":
            return f"padic {self.p} {self.exponent}"
        return "trivial"


def classify_norm(oracle: NormOracle) -> NormClass:
    """Decide which norm on Q the oracle is, then verify it on the whole table."""
    N = oracle
    one = PowerProduct()
    big = next((n for n in range(2, oracle.bound + 1) if N(n) > one), None)
    if big is not None:
        alpha = N(big).log_ratio(big)
        if alpha is None or alpha <= 0:
            raise NormAxiomError(f"N({big}) = {N(big)} is not a rational power of {big}")
        for n in range(2, oracle.bound + 1):
            if N(n) != PowerProduct.from_rational(n) ** alpha:
                raise NormAxiomError(f"alpha not constant: N({n}) = {N(n)} != {n}^{alpha}")
        return NormClass("archimedean", alpha)
    small = next((n for n in range(2, oracle.bound + 1) if N(n) < one), None)
    if small is None:
        return NormClass("trivial")
    if not is_prime(small):
        raise NormAxiomError(f"least n with N(n) < 1 is {small}, which is composite")
    p = small
    a = -N(p).log_ratio(p) if N(p).log_ratio(p) is not None else None
    if a is None:
        raise NormAxiomError(f"N({p}) = {N(p)} is not a rational power of {p}")
    for n in range(2, oracle.bound + 1):
        if N(n) != PowerProduct({p: -a * vp(p, n)}):
            raise NormAxiomError(f"N({n}) = {N(n)} != |{n}|_{p}^{a}")
    return NormClass("padic", a, p)


def bad_primes(values: Iterable) -> list[int]:
    """Primes dividing the numerator or denominator of any given rational."""
    out = set()
    for x in values:
        x = Fraction(x)
        for part in (x.numerator, x.denominator):
            if part:
                out.update(factorize(part))
    return sorted(out)

