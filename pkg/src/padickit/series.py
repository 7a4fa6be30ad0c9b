"""Certified summation of convergent series in Q_p.

A series converges in Q_p exactly when its terms tend to 0, and by the
ultrametric inequality the tail past index J is bounded by the largest tail
term.  So a sum is known to absolute precision k as soon as some J is known
with ``v(a_j) >= k`` for every ``j >= J``.  That witness must be supplied,
either as a nondecreasing valuation lower bound or as an explicit cutoff.
Nothing here guesses how many terms are enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from .errors import ConvergenceError, HypothesisError, PrimeMismatchError
from .padic import PadicNumber, eq_mod_pk

# Search limit when locating a cutoff from a declared valuation bound.
MAX_CUTOFF = 1 << 20


@dataclass(frozen=True)
class TermGenerator:
    """Terms ``a_j`` of a series at a single prime.

    ``valuation_bound(j)``, when given, must be a nondecreasing lower bound
    for ``v(a_j)``.
    """

    p: int
    term: Callable[[int], PadicNumber]
    valuation_bound: Optional[Callable[[int], int]] = None

    def __call__(self, j: int) -> PadicNumber:
        t = self.term(j)
        if t.p != self.p:
            raise PrimeMismatchError(self.p, t.p)
        return t


def _cutoff(g: TermGenerator, k: int, cutoff: int | None) -> int:
    if cutoff is not None:
        if cutoff < 0:
            raise ValueError("cutoff must be nonnegative")
        first_tail = g(cutoff)
        if first_tail.min_valuation < k:
            raise ConvergenceError(f"term {cutoff} has valuation below {k}")
        return cutoff
    if g.valuation_bound is None:
        raise ConvergenceError("no valuation bound or cutoff given")
    lo, hi = 0, 1
    while g.valuation_bound(hi) < k:
        lo, hi = hi, hi * 2
        if hi > MAX_CUTOFF:
            raise ConvergenceError(f"declared bound stays below {k} up to index {MAX_CUTOFF}")
    if g.valuation_bound(0) >= k:
        return 0
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if g.valuation_bound(mid) >= k:
            hi = mid
        else:
            lo = mid
    return hi


def sum_series(g: TermGenerator, k: int, cutoff: int | None = None) -> PadicNumber:
    """``sum(a_j) + O(p^k)`` from the terms below the certified cutoff."""
    J = _cutoff(g, k, cutoff)
    total = PadicNumber.zero_ball(g.p, k)
    for j in range(J):
        total = total + g(j)
    return total


def geometric_sum(x: PadicNumber, k: int) -> PadicNumber:
    """``1 + x + x^2 + ... = 1/(1 - x)`` to absolute precision k; needs ``|x|_p < 1``."""
    if x.min_valuation < 1:
        raise HypothesisError("|x|_p < 1", "series diverges")
    one = PadicNumber.from_rational(1, x.p, max(k, 1))
    if x.is_exact_zero():
        return one.add_bigoh(k)
    return (one - x).invert().add_bigoh(k)


def powers(x: PadicNumber) -> TermGenerator:
    """The terms ``x^j``, with the valuation bound ``j * v(x)`` when ``v(x) >= 1``."""
    bound = None
    if x.min_valuation >= 1:
        v = x.min_valuation
        bound = lambda j: j * v  # noqa: E731
    return TermGenerator(x.p, lambda j: x ** j, bound)


def partial_sum_identity_check(x: PadicNumber, n: int) -> bool:
    """Check ``(1 - x) * sum_{j<=n} x^j == 1 - x^(n+1)`` at the working precision."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    s = PadicNumber.exact_zero(x.p)
    for j in range(n + 1):
        s = s + x ** j
    lhs = (1 - x) * s
    rhs = 1 - x ** (n + 1)
    k = min(lhs.abs_precision, rhs.abs_precision)
    return eq_mod_pk(lhs, rhs, k)


def linear_combination(a: TermGenerator, b: TermGenerator, alpha: PadicNumber,
                       beta: PadicNumber, k: int,
                       cutoffs: tuple[int | None, int | None] = (None, None)) -> PadicNumber:
    """``alpha * sum(a) + beta * sum(b)`` to absolute precision k.

    Each series is summed to the precision that survives multiplication by
    its coefficient.
    """
    if a.p != b.p:
        raise PrimeMismatchError(a.p, b.p)
    total = PadicNumber.zero_ball(a.p, k)
    for g, c, cut in ((a, alpha, cutoffs[0]), (b, beta, cutoffs[1])):
        if c.is_exact_zero():
            continue
        total = total + c * sum_series(g, k - c.min_valuation, cut)
    return total
