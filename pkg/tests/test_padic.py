import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _trees import soundness_trial
from padickit.errors import PadicZeroDivisionError, PrecisionError, PrimeMismatchError
from padickit.padic import (
    AtMost, PadicNumber, default_precision, dist_p, eq_mod_pk, from_rational, parse_padic,
    precision,
)
from padickit.valuation import vp

PRIMES = [2, 3, 5, 7]
rationals = st.fractions(max_denominator=2000).filter(lambda x: abs(x.numerator) < 10**6)


def U(p, v, u, N):
    return PadicNumber.unit(p, v, u, N)


def test_from_rational_examples():
    assert from_rational(0, 5, 10).is_exact_zero()
    x = from_rational(5, 5, 4)
    assert (x.v, x.u, x.N) == (1, 1, 4)
    y = from_rational(Fraction(-1, 4), 5, 4)
    assert (y.v, y.u, y.N) == (0, 156, 4)
    assert 156 == (-pow(4, -1, 625)) % 625


def test_add_examples():
    x = from_rational(Fraction(2, 7), 5, 6)
    assert x + PadicNumber.exact_zero(5) == x
    z = U(5, 0, 1, 3) + U(5, 0, 124, 3)
    assert z.is_zero_ball() and z.abs_precision == 3
    s = from_rational(Fraction(1, 4), 3, 5) + from_rational(Fraction(-1, 2), 3, 5)
    assert s == from_rational(Fraction(-1, 4), 3, 5)


def test_mul_examples():
    x = from_rational(Fraction(3, 10), 5, 6)
    assert x * from_rational(1, 5, 6) == x
    prod = U(5, 1, 2, 3) * U(5, -1, 3, 3)
    assert (prod.v, prod.u, prod.N) == (0, 6, 3)


def test_invert_examples():
    assert from_rational(1, 7, 5).invert() == from_rational(1, 7, 5)
    assert U(5, 0, 2, 4).invert().u == 313
    with pytest.raises(PadicZeroDivisionError):
        PadicNumber.zero_ball(5, 3).invert()
    with pytest.raises(ZeroDivisionError):
        PadicNumber.exact_zero(5).invert()


def test_digits_examples():
    assert from_rational(Fraction(-1, 4), 5, 4).digits() == [(0, 1), (1, 1), (2, 1), (3, 1)]
    assert from_rational(5, 5, 2).digits()[0] == (1, 1)
    assert from_rational(Fraction(7, 8), 2, 4).digits()[0][0] == -3


def test_dist_examples():
    x = from_rational(Fraction(2, 3), 5, 6)
    d = dist_p(x, x)
    assert isinstance(d, AtMost) and d.bound <= Fraction(1, 5 ** x.abs_precision)
    assert dist_p(from_rational(1, 5), from_rational(6, 5)) == Fraction(1, 5)


def test_eq_mod_pk_examples():
    x = from_rational(Fraction(2, 3), 5, 6)
    assert eq_mod_pk(x, x, 6)
    a, b = from_rational(1, 5, 8), from_rational(126, 5, 8)
    assert eq_mod_pk(a, b, 3) and not eq_mod_pk(a, b, 4)
    with pytest.raises(PrecisionError):
        eq_mod_pk(U(5, 0, 1, 2), b, 5)


def test_prime_mismatch():
    with pytest.raises(PrimeMismatchError):
        from_rational(1, 5) + from_rational(1, 3)


def test_precision_policy():
    assert default_precision() == 32
    with precision(7):
        assert from_rational(Fraction(1, 3), 5).N == 7
    assert from_rational(Fraction(1, 3), 5).N == 32


def test_str_and_parse_roundtrip():
    x = from_rational(Fraction(-1, 4), 5, 4)
    assert str(x) == "p-adic(5; 0; 1 1 1 1; O(5^4))"
    assert parse_padic(str(x)) == x
    assert str(PadicNumber.zero_ball(5, 3)) == "O(5^3)"
    assert parse_padic("O(5^3)") == PadicNumber.zero_ball(5, 3)
    y = from_rational(Fraction(7, 8), 2, 5)
    assert parse_padic(str(y)) == y
    assert parse_padic("-1/4", 5, 4) == x


def test_zero_ball_valuation_undefined():
    with pytest.raises(PrecisionError):
        PadicNumber.zero_ball(3, 4).valuation


@given(rationals, rationals, st.sampled_from(PRIMES), st.integers(2, 20))
def test_ring_ops_match_rationals(x, y, p, N):
    X, Y = from_rational(x, p, N), from_rational(y, p, N)
    for got, want in [(X + Y, x + y), (X - Y, x - y), (X * Y, x * y)]:
        assert got.contains(want)
    if y:
        assert (X / Y).contains(x / y)


@given(rationals.filter(bool), rationals.filter(bool), st.sampled_from(PRIMES))
def test_norm_multiplicative(x, y, p):
    X, Y = from_rational(x, p, 10), from_rational(y, p, 10)
    assert (X * Y).norm() == X.norm() * Y.norm()
    # norms are integer powers of p
    assert X.norm() == Fraction(p) ** -vp(p, x)


@given(rationals.filter(bool), rationals.filter(bool), st.sampled_from(PRIMES))
def test_strong_triangle_equality(x, y, p):
    if vp(p, x) != vp(p, y):
        s = from_rational(x, p, 12) + from_rational(y, p, 12)
        assert s.valuation == min(vp(p, x), vp(p, y))


@given(rationals.filter(bool), st.sampled_from(PRIMES), st.integers(1, 20))
def test_digits_reembed(x, p, N):
    X = from_rational(x, p, N)
    back = sum(Fraction(r) * Fraction(p) ** j for j, r in X.digits())
    assert eq_mod_pk(from_rational(back, p, N), X, X.abs_precision)


@given(st.lists(st.integers(-50, 50), min_size=2, max_size=8), st.sampled_from(PRIMES))
def test_cauchy_bridge(cs, p):
    # x_j = sum_{i<j} c_i p^i has v(x_{j+1} - x_j) >= j
    xs, acc = [], Fraction(0)
    for i, c in enumerate(cs):
        acc += c * Fraction(p) ** i
        xs.append(from_rational(acc, p, 40) if acc else PadicNumber.exact_zero(p))
    for j in range(len(xs)):
        for l in range(len(xs)):
            if j != l:
                d = xs[j] - xs[l]
                assert d.min_valuation >= min(j, l)


@given(st.tuples(rationals, rationals, rationals).filter(lambda t: len(set(t)) == 3),
       st.sampled_from(PRIMES))
def test_dist_ultrametric(t, p):
    x, y, z = (from_rational(a, p, 16) for a in t)
    ds = [dist_p(x, z), dist_p(x, y), dist_p(y, z)]
    if not any(isinstance(d, AtMost) for d in ds):
        assert ds[0] <= max(ds[1], ds[2])


def test_tightest_ball_after_cancellation():
    # 1 + 5^3 and 1 at relative precision 5 differ by 5^3 which is still known
    d = from_rational(126, 5, 5) - from_rational(1, 5, 5)
    assert d.valuation == 3 and d.abs_precision == 5
    assert (d.v, d.u, d.N) == (3, 1, 2)


def test_lift_to_and_add_bigoh():
    x = from_rational(Fraction(1, 3), 5, 10)
    assert x.lift_to(4) == from_rational(Fraction(1, 3), 5, 4)
    assert x.add_bigoh(2).abs_precision == 2
    assert x.add_bigoh(0).is_zero_ball()


def test_power():
    x = from_rational(Fraction(2, 3), 7, 12)
    assert (x ** 5).contains(Fraction(2, 3) ** 5)
    assert (x ** -2).contains(Fraction(9, 4))
    assert x ** 0 == from_rational(1, 7, 12)


@settings(max_examples=50)
@given(st.integers(0, 2**32))
def test_ball_soundness_sampled(seed):
    rng = random.Random(seed)
    for _ in range(20):
        r = soundness_trial(rng, rng.choice(PRIMES), rng.choice([3, 8, 20]))
        assert r in ("ok", "skip"), r
