import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from _oracles import digit_root
from padickit.errors import HypothesisError, NoRootError, NotAPowerError
from padickit.hensel import (
    Polynomial, contraction_check, hensel_basic, hensel_refined, qth_root, unit_power_reduction,
)
from padickit.padic import PadicNumber, eq_mod_pk, from_rational


def rep(x: PadicNumber) -> int:
    return int(x.representative()) % x.p ** x.abs_precision


def test_eval_and_derivative():
    f = Polynomial(5, [1, 0, 1])
    fx = f(from_rational(2, 5, 10))
    assert fx.valuation == 1 and fx.contains(5)
    c = Polynomial(7, [Fraction(3, 2)])
    assert c(from_rational(11, 7, 5)).contains(Fraction(3, 2))
    assert c.derivative()(from_rational(11, 7, 5)).is_exact_zero()
    g = Polynomial(3, [-5, 0, 0, 1]).derivative()
    assert [cc.representative() for cc in g.coeffs] == [0, 0, 3]
    assert [cc.representative() for cc in f.derivative().coeffs] == [0, 2]


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=6), st.fractions(max_denominator=30))
def test_eval_matches_rational_horner(cs, x):
    p = 7
    if x and x.denominator % p == 0:
        return
    f = Polynomial(p, cs)
    exact = sum(c * x ** j for j, c in enumerate(cs))
    px = from_rational(x, p, 20) if x else PadicNumber.exact_zero(p)
    assert f(px).contains(exact)


def test_polynomial_parse_and_integrality():
    f = Polynomial.parse("5; 1, 0, 1")
    assert f.degree == 2 and str(f) == "5; 1, 0, 1"
    assert Polynomial.parse("3; -1/2, p-adic(3; 0; 1 2; O(3^2))").degree == 1
    with pytest.raises(HypothesisError):
        Polynomial(5, [Fraction(1, 5), 1])


def test_contraction_examples():
    f = Polynomial(3, [0, 0, 0, 1])
    assert contraction_check(f, 1, 1) == (True, True, True)
    assert contraction_check(f, 1, 4) == (True, True, True)


@settings(max_examples=500, deadline=None)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=5), st.integers(-10**4, 10**4),
       st.integers(-10**4, 10**4))
def test_contraction_property(cs, x, y):
    assert contraction_check(Polynomial(5, cs), x, y) == (True, True, True)


def test_hensel_linear():
    tr = hensel_basic(Polynomial(5, [-10, 1]), 0, 12)
    assert tr.root.contains(10) and len(tr.iterates) == 2


def test_hensel_exact_fixed_point():
    tr = hensel_basic(Polynomial(7, [-1, 0, 0, 1]), 1, 10)
    assert tr.root.contains(1) and len(tr.iterates) == 1


def test_sqrt_minus_one_mod_5():
    tr = hensel_basic(Polynomial(5, [1, 0, 1]), 2, 20)
    w = rep(tr.root)
    assert w % 5 == 2 and w % 25 == 7
    assert (w * w + 1) % 5 ** 20 == 0
    assert digit_root(5, 2, -1, 20, 2) == [w]
    steps = tr.step_valuations()
    for a, b in zip(steps, steps[1:]):
        assert b >= 2 * a


def test_refined_matches_basic():
    f = Polynomial(7, [-2, 0, 1])
    a, b = hensel_basic(f, 3, 15), hensel_refined(f, 3, 15)
    assert eq_mod_pk(a.root, b.root, 15)


def test_refined_sqrt_17():
    tr = hensel_refined(Polynomial(2, [-17, 0, 1]), 1, 30)
    w = rep(tr.root)
    assert w % 4 == 1
    assert (w * w - 17) % 2 ** 30 == 0
    # |f'(x_j)| stays constant and residuals drop
    assert len(set(tr.derivative_norms)) == 1
    assert all(b < a for a, b in zip(tr.residuals, tr.residuals[1:]))


def test_refined_rejects_ill_posed():
    with pytest.raises(HypothesisError):
        hensel_refined(Polynomial(2, [-2, 0, 1]), 0, 10)


def test_basic_rejects_bad_start():
    with pytest.raises(HypothesisError):
        hensel_basic(Polynomial(5, [1, 0, 1]), 1, 10)  # f(1) = 2
    with pytest.raises(HypothesisError):
        hensel_basic(Polynomial(2, [-17, 0, 1]), 1, 10)  # f'(1) = 2


def test_qth_root_examples():
    for q in (2, 3, 5, 7):
        assert qth_root(from_rational(1, 11, 10), q).contains(1)
    r = rep(qth_root(from_rational(-1, 5, 12), 2))
    assert r % 5 in (2, 3) and (r * r + 1) % 5 ** 12 == 0
    with pytest.raises(NoRootError, match="mod 8"):
        qth_root(from_rational(3, 2, 10), 2)


def test_qth_root_residue_obstruction():
    with pytest.raises(NoRootError, match="residue"):
        qth_root(from_rational(2, 5, 10), 2)


@pytest.mark.parametrize("p,q", [(5, 2), (7, 3), (11, 5), (3, 3), (5, 5), (2, 2), (13, 3)])
def test_qth_root_vs_exhaustive(p, q):
    k = 1
    while p ** (k + 1) <= 10**5:
        k += 1
    m = p ** k
    powers = {pow(x, q, m) for x in range(m) if x % p}
    rng = random.Random(p * 100 + q)
    for _ in range(40):
        a = rng.randrange(1, m)
        if a % p == 0:
            continue
        try:
            root = qth_root(from_rational(a, p, k + 2), q, k)
        except NoRootError:
            assert a not in powers
        else:
            assert a in powers
            assert (pow(rep(root), q, m) - a) % m == 0


def test_squares_mod_8_classes():
    for u in (1, 3, 5, 7):
        a = from_rational(u, 2, 12)
        if u == 1:
            assert qth_root(a, 2).contains(1)
        else:
            with pytest.raises(NoRootError):
                qth_root(a, 2)


def test_unit_power_reduction():
    x = from_rational(Fraction(2, 3), 5, 8)
    assert unit_power_reduction(x, 4) == (0, x)
    l, x1 = unit_power_reduction(from_rational(27, 3, 8), 3)
    assert l == 1 and x1.contains(1)
    with pytest.raises(NotAPowerError):
        unit_power_reduction(from_rational(5, 5, 8), 2)
