"""Polynomials over Z_p, Newton iteration, and roots of ``x^q - a``.

The Newton step is ``x_j = x_{j-1} - f(x_{j-1}) / f'(x_{j-1})``, which is the
solution of ``f(x_{j-1}) + f'(x_{j-1}) (x_j - x_{j-1}) = 0``.

Iterates are exact integers.  Each step computes the correction in ball
arithmetic at a working precision W and keeps the integer representative of
the new point.  Iteration stops once ``v(f(x)) >= prec + d`` with
``d = v(f'(x))``, which bounds the distance to the true root by
``p^-prec``.  The root is returned as that ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (HypothesisError, NoRootError, NotAPowerError, PrecisionError,
                     PrimeMismatchError)
from .padic import INF, PadicNumber, default_precision, parse_padic
from .valuation import check_prime

__all__ = [
    "Polynomial", "LiftTrace", "contraction_check", "hensel_basic", "hensel_refined",
    "qth_root", "unit_power_reduction",
]


class Polynomial:
    """``a_0 + a_1 x + ... + a_n x^n`` with coefficients in Z_p.

    Coefficients built from rationals are remembered exactly, so the
    polynomial can be re-embedded at any working precision.
    """

    def __init__(self, p: int, coeffs: Sequence, N: int | None = None):
        p = check_prime(p)
        balls, exact = [], []
        for c in coeffs:
            if isinstance(c, PadicNumber):
                if c.p != p:
                    raise PrimeMismatchError(p, c.p)
                balls.append(c)
                exact.append(None)
            else:
                c = Fraction(c)
                balls.append(PadicNumber.from_rational(c, p, N))
                exact.append(c)
        while len(balls) > 1 and balls[-1].is_exact_zero():
            balls.pop()
            exact.pop()
        if not balls:
            balls, exact = [PadicNumber.exact_zero(p)], [Fraction(0)]
        for j, c in enumerate(balls):
            if not c.is_integral():
                raise HypothesisError("coefficients in Z_p", f"a_{j} = {c}")
        self.p = p
        self.coeffs = tuple(balls)
        self._exact = tuple(exact)

    @classmethod
    def parse(cls, text: str, N: int | None = None) -> Polynomial:
        """Read ``p; a_0, a_1, ..., a_n``; coefficients are rationals or digit forms."""
        head, sep, body = text.partition(";")
        if not sep:
            raise ValueError(f"expected 'p; a_0, ..., a_n', got {text!r}")
        p = check_prime(int(head))
        coeffs = []
        for item in _split_top_level(body):
            item = item.strip()
            if item.startswith(("p-adic(", "O(")):
                coeffs.append(parse_padic(item, p))
            else:
                coeffs.append(Fraction(item))
        return cls(p, coeffs, N)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def abs_precision(self):
        return min(c.abs_precision for c in self.coeffs)

    def with_precision(self, W: int) -> Polynomial:
        """Re-embed exact coefficients so each has absolute precision at least W."""
        out = Polynomial.__new__(Polynomial)
        out.p = self.p
        out._exact = self._exact
        out.coeffs = tuple(
            PadicNumber.from_rational(e, self.p, max(1, W - _vp_or0(self.p, e))) if e is not None else c
            for c, e in zip(self.coeffs, self._exact))
        return out

    def __call__(self, x) -> PadicNumber:
        """Horner evaluation as a sound ball."""
        if isinstance(x, PadicNumber) and x.p != self.p:
            raise PrimeMismatchError(self.p, x.p)
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    eval = __call__

    def derivative(self) -> Polynomial:
        out = Polynomial.__new__(Polynomial)
        out.p = self.p
        if self.degree == 0:
            out.coeffs = (PadicNumber.exact_zero(self.p),)
            out._exact = (Fraction(0),)
            return out
        out.coeffs = tuple(j * c for j, c in enumerate(self.coeffs) if j)
        out._exact = tuple(None if e is None else j * e for j, e in enumerate(self._exact) if j)
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.p == other.p and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Polynomial({self.p}, [{', '.join(_coeff_str(c, e) for c, e in zip(self.coeffs, self._exact))}])"

    def __str__(self):
        return f"{self.p}; " + ", ".join(_coeff_str(c, e) for c, e in zip(self.coeffs, self._exact))


def _coeff_str(c, e):
    return str(e) if e is not None else str(c)


def _split_top_level(body: str) -> list[str]:
    # commas inside p-adic(...) literals are not separators
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur))
    return [s for s in parts if s.strip()]


def _vp_or0(p, x: Fraction) -> int:
    from .valuation import vp
    return vp(p, x) if x else 0


def _point(p: int, x: Fraction, W: int) -> PadicNumber:
    """The exact point x as a ball accurate far beyond W."""
    if x == 0:
        return PadicNumber.exact_zero(p)
    return PadicNumber.from_rational(x, p, max(1, W - _vp_or0(p, x)))


def _at_least(ball: PadicNumber, t) -> bool:
    """Decide ``v(ball) >= t``, raising when the ball is too coarse to tell."""
    if ball.is_unit_kind():
        return ball.v >= t
    if ball.is_exact_zero() or ball.abs_precision >= t:
        return True
    raise PrecisionError(f"cannot decide v({ball}) >= {t}")


def contraction_check(f: Polynomial, x, y) -> tuple[bool, bool, bool]:
    """Evaluate the three contraction estimates at the points x and y of Z_p.

    Returns the truth of ``|f(x) - f(y)| <= |x - y|``,
    ``|f'(x) - f'(y)| <= |x - y|`` and
    ``|f(x) - f(y) - f'(y)(x - y)| <= |x - y|^2``.
    The points are the exact representatives of x and y.
    """
    p = f.p
    xs = [z.representative() if isinstance(z, PadicNumber) else Fraction(z) for z in (x, y)]
    for z in xs:
        if z and _vp_or0(p, z) < 0:
            raise HypothesisError("x, y in Z_p", f"{z} is not a p-adic integer")
    if xs[0] == xs[1]:
        return True, True, True
    d = xs[0] - xs[1]
    t = _vp_or0(p, d)
    W = max(default_precision(), 2 * t + 8)
    g = f.with_precision(W)
    dg = g.derivative()
    px, py = _point(p, xs[0], W), _point(p, xs[1], W)
    fx, fy = g(px), g(py)
    dfy = dg(py)
    return (
        _at_least(fx - fy, t),
        _at_least(dg(px) - dfy, t),
        _at_least(fx - fy - dfy * _point(p, d, W), 2 * t),
    )


@dataclass
class LiftTrace:
    """Newton iterates ``x_0 .. x_m`` with residual and derivative sizes.

    ``residuals[j]`` is ``|f(x_j)|_p`` (an upper bound when f(x_j) is a zero
    ball) and ``derivative_norms[j]`` is ``|f'(x_j)|_p``.
    """

    iterates: list[PadicNumber] = field(default_factory=list)
    residuals: list[Fraction] = field(default_factory=list)
    derivative_norms: list[Fraction] = field(default_factory=list)
    root: PadicNumber | None = None

    def step_valuations(self) -> list:
        """``v(x_{j+1} - x_j)`` for consecutive iterates (inf when equal)."""
        out = []
        for a, b in zip(self.iterates, self.iterates[1:]):
            d = b.representative() - a.representative()
            out.append(_vp_or0(b.p, d) if d else INF)
        return out


def _max_iterations(prec: int) -> int:
    return 2 * math.ceil(math.log2(max(prec, 2))) + 8


def _newton(f: Polynomial, z: Fraction, prec: int, d: int, W: int) -> LiftTrace:
    p = f.p
    df = f.derivative()
    trace = LiftTrace()
    x = z
    for _ in range(_max_iterations(prec) + 1):
        px = _point(p, x, W)
        fx, dfx = f(px), df(px)
        trace.iterates.append(px.add_bigoh(W))
        trace.residuals.append(fx.norm_bound())
        trace.derivative_norms.append(dfx.norm())
        if _at_least(fx, prec + d):
            root = px.add_bigoh(prec) if not px.is_exact_zero() else PadicNumber.zero_ball(p, prec)
            if fx.is_exact_zero():
                root = px
            trace.root = root
            return trace
        step = fx / dfx
        x = x - step.representative()
        x = Fraction(int(x) % p ** W) if x.denominator == 1 else x
    raise PrecisionError(f"Newton iteration did not reach precision {prec} in {_max_iterations(prec)} steps")


def _start(f: Polynomial, z) -> Fraction:
    if isinstance(z, PadicNumber):
        if z.p != f.p:
            raise PrimeMismatchError(f.p, z.p)
        if not z.is_integral():
            raise HypothesisError("z in Z_p", f"z = {z}")
        return z.representative()
    z = Fraction(z)
    if z and _vp_or0(f.p, z) < 0:
        raise HypothesisError("z in Z_p", f"z = {z}")
    return z


def _target(f: Polynomial, prec: int | None, d: int) -> tuple[int, int]:
    if prec is None:
        prec = default_precision()
        if f.abs_precision != INF:
            prec = min(prec, f.abs_precision - d)
    W = prec + 2 * d + 4
    W = min(W, f.with_precision(W).abs_precision)
    if W < prec + d:
        raise PrecisionError(
            f"coefficients known to {f.abs_precision} digits; {prec + d} needed for {prec}-digit root")
    return prec, W


def hensel_basic(f: Polynomial, z, prec: int | None = None) -> LiftTrace:
    """Lift z to a root w of f with ``w - z`` in pZ_p.

    Requires z in Z_p, f(z) in pZ_p and ``|f'(z)|_p = 1``.
    """
    z = _start(f, z)
    prec, W = _target(f, prec, 0)
    g = f.with_precision(W)
    pz = _point(f.p, z, W)
    if not _at_least(g(pz), 1):
        raise HypothesisError("f(z) in pZ_p", f"f(z) = {g(pz)}")
    dz = g.derivative()(pz)
    if not dz.is_unit_kind() or dz.v != 0:
        raise HypothesisError("|f'(z)|_p = 1", f"f'(z) = {dz}")
    return _newton(g, z, prec, 0, W)


def hensel_refined(f: Polynomial, z, prec: int | None = None) -> LiftTrace:
    """Lift z to a root of f under ``|f(z)|_p < |f'(z)|_p^2``."""
    z = _start(f, z)
    probe = f.with_precision((prec or default_precision()) + 4)
    dz = probe.derivative()(_point(f.p, z, probe.abs_precision))
    if dz.is_exact_zero():
        raise HypothesisError("|f(z)|_p < |f'(z)|_p^2", "f'(z) = 0")
    if dz.is_zero_ball():
        raise PrecisionError(f"insufficient precision: f'(z) = {dz} is indistinguishable from zero")
    d = dz.v
    prec, W = _target(f, prec, d)
    g = f.with_precision(W)
    fz = g(_point(f.p, z, W))
    if not _at_least(fz, 2 * d + 1):
        raise HypothesisError("|f(z)|_p < |f'(z)|_p^2", f"f(z) = {fz}, f'(z) = {dz}")
    return _newton(g, z, prec, d, W)


def unit_power_reduction(x: PadicNumber, n: int) -> tuple[int, PadicNumber]:
    """Split ``x = p^(l n) x_1`` with ``|x_1|_p = 1``.

    Raises NotAPowerError when ``n`` does not divide ``v(x)``, since then x
    has no n-th root in Q_p.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if x.is_exact_zero():
        raise ValueError("zero input")
    v = x.valuation
    if v % n:
        raise NotAPowerError(f"v(x) = {v} is not divisible by {n}")
    return v // n, x.unit_part()


def qth_root(a: PadicNumber, q: int, prec: int | None = None) -> PadicNumber:
    """A root of ``x^q = a`` for a unit a and prime q, or NoRootError.

    The root returned is the lift of the least residue that works.
    """
    q = check_prime(q)
    p = a.p
    if not a.is_unit_kind():
        if a.is_zero_ball():
            raise PrecisionError(f"{a} is indistinguishable from zero")
        raise HypothesisError("|a|_p = 1", "reduce to unit part first")
    if a.v != 0:
        raise HypothesisError("|a|_p = 1", "reduce to unit part first")
    f = Polynomial(p, [-a] + [0] * (q - 1) + [1])
    d = 1 if q == p else 0
    if prec is None:
        prec = a.abs_precision - d
    if q != p:
        residue = a.u % p
        roots = [r for r in range(1, p) if pow(r, q, p) == residue]
        if not roots:
            # only reachable when q divides p - 1
            raise NoRootError("residue obstruction")
        return hensel_basic(f, roots[0], prec).root
    if p == 2:
        if a.N < 3:
            raise PrecisionError("a must be known mod 8")
        if a.u % 8 != 1:
            raise NoRootError("mod 8 obstruction")
        return hensel_refined(f, 1, prec).root
    if a.N < 3:
        raise PrecisionError(f"a must be known mod {p}^3")
    r = a.u % p
    mod = p ** 3
    for t in range(p):
        z = r + p * t
        if (pow(z, p, mod) - a.u) % mod == 0:
            return hensel_refined(f, z, prec).root
    raise NoRootError("refined hypothesis fails")
