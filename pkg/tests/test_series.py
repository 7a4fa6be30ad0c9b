import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from padickit.errors import ConvergenceError, HypothesisError
from padickit.padic import PadicNumber, eq_mod_pk, from_rational
from padickit.series import (
    TermGenerator, geometric_sum, linear_combination, partial_sum_identity_check, powers,
    sum_series,
)


def test_all_zero_terms():
    g = TermGenerator(5, lambda j: PadicNumber.exact_zero(5), lambda j: 10**9)
    s = sum_series(g, 8)
    assert s.is_zero() and s.abs_precision == 8


def test_powers_of_p_sum():
    s = sum_series(powers(from_rational(5, 5, 10)), 8)
    assert eq_mod_pk(s, from_rational(Fraction(-1, 4), 5, 10), 8)
    assert [r for _, r in s.digits()] == [1] * 8


def test_factorial_series_matches_partial_sum():
    p, k = 3, 12
    # v(j! p^j) >= j, so cutoff J = k is a valid witness
    g = TermGenerator(p, lambda j: from_rational(math.factorial(j) * p ** j, p, 20), lambda j: j)
    exact = sum(math.factorial(j) * p ** j for j in range(k))
    assert eq_mod_pk(sum_series(g, k), from_rational(exact, p, 20), k)


def test_explicit_cutoff_checked():
    g = TermGenerator(5, lambda j: from_rational(5 ** j, 5, 10))
    assert eq_mod_pk(sum_series(g, 6, cutoff=6), from_rational(Fraction(-1, 4), 5, 10), 6)
    with pytest.raises(ConvergenceError):
        sum_series(g, 6, cutoff=3)
    with pytest.raises(ConvergenceError):
        sum_series(g, 6)


def test_bound_that_never_reaches_k():
    g = TermGenerator(5, lambda j: from_rational(1, 5, 4), lambda j: 0)
    with pytest.raises(ConvergenceError):
        sum_series(g, 3)


def test_tail_invariance():
    g = powers(from_rational(10, 5, 20))
    base = sum_series(g, 10)
    for J in (10, 12, 20, 33):
        assert eq_mod_pk(sum_series(g, 10, cutoff=J), base, 10)


def test_reordering_finitely_many_terms():
    p, k = 7, 9
    terms = [from_rational(Fraction(j + 1, j + 2) * p ** j, p, 12) for j in range(k)]
    swapped = terms[:]
    swapped[0], swapped[4] = swapped[4], swapped[0]
    swapped[2], swapped[7] = swapped[7], swapped[2]
    s1 = s2 = PadicNumber.zero_ball(p, k)
    for t, u in zip(terms, swapped):
        s1, s2 = s1 + t, s2 + u
    assert eq_mod_pk(s1, s2, k)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_geometric_p(p):
    s = geometric_sum(from_rational(p, p, 40), 32)
    assert eq_mod_pk(s, from_rational(Fraction(1, 1 - p), p, 40), 32)


def test_geometric_examples():
    assert eq_mod_pk(geometric_sum(PadicNumber.exact_zero(3), 10), from_rational(1, 3, 12), 10)
    s = geometric_sum(from_rational(2, 2, 12), 10)
    assert [r for _, r in s.digits()] == [1] * 10
    with pytest.raises(HypothesisError):
        geometric_sum(from_rational(3, 5), 10)


@given(st.integers(-100, 100), st.sampled_from([2, 3, 5, 7]))
def test_geometric_pw_is_limit_of_partial_sums(w, p):
    k = 15
    x = from_rational(p * w, p, 30) if w else PadicNumber.exact_zero(p)
    s = geometric_sum(x, k)
    partial = sum(Fraction(p * w) ** j for j in range(k))
    assert eq_mod_pk(s, from_rational(partial, p, 30), k)
    assert eq_mod_pk(s * (1 - x), from_rational(1, p, 30), k)


def test_partial_sum_identity_examples():
    assert partial_sum_identity_check(PadicNumber.exact_zero(5), 4)
    assert partial_sum_identity_check(from_rational(Fraction(1, 5), 3), 7)
    assert partial_sum_identity_check(from_rational(5, 5), 20)


@given(st.fractions(max_denominator=50).filter(lambda x: abs(x.numerator) < 1000),
       st.integers(0, 30), st.sampled_from([2, 3, 5]))
def test_partial_sum_identity_random(x, n, p):
    X = from_rational(x, p, 20) if x else PadicNumber.exact_zero(p)
    assert partial_sum_identity_check(X, n)


def test_linear_combination():
    p, k = 5, 10
    A = powers(from_rational(p, p, 20))
    zero = PadicNumber.exact_zero(p)
    one = from_rational(1, p, 20)
    assert eq_mod_pk(linear_combination(A, A, one, zero, k), sum_series(A, k), k)
    both = linear_combination(A, A, one, one, k)
    assert eq_mod_pk(both, from_rational(Fraction(2, 1 - p), p, 20), k)
    # a coefficient of negative valuation needs the series summed further
    inv = from_rational(Fraction(1, 25), p, 20)
    got = linear_combination(A, A, inv, zero, k)
    assert got.abs_precision >= k
    assert eq_mod_pk(got, from_rational(Fraction(1, 25 * (1 - p)), p, 20), k)


@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6),
       st.lists(st.integers(-20, 20), min_size=1, max_size=6),
       st.integers(-9, 9), st.integers(-9, 9))
def test_linear_combination_oracle(a, b, alpha, beta):
    p, k = 3, 10
    ga = TermGenerator(p, lambda j: from_rational(a[j] * p ** j, p, 20) if j < len(a) and a[j]
                       else PadicNumber.exact_zero(p), lambda j: j if j < len(a) else 10**6)
    gb = TermGenerator(p, lambda j: from_rational(b[j] * p ** j, p, 20) if j < len(b) and b[j]
                       else PadicNumber.exact_zero(p), lambda j: j if j < len(b) else 10**6)
    emb = lambda c: from_rational(c, p, 20) if c else PadicNumber.exact_zero(p)  # noqa: E731
    got = linear_combination(ga, gb, emb(alpha), emb(beta), k)
    exact = alpha * sum(c * p ** j for j, c in enumerate(a)) + beta * sum(c * p ** j for j, c in enumerate(b))
    assert got.contains(exact)
