from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from diracalg.ground import Poly
from diracalg.scalars import co_heaviside, heaviside, neg_part, pos_part

from conftest import polys, rats

X = Poly.x()


def simpson(f: Poly, c: Fraction, d: Fraction) -> Fraction:
    """Simpson's rule, exact for cubics; an integration oracle independent of ``Poly.integrate``."""
    m = (c + d) / 2
    return (d - c) / 6 * (f(c) + 4 * f(m) + f(d))


def test_arithmetic_examples():
    assert (X + 1) * (X - 1) == X ** 2 - 1
    assert (2 * X) * Fraction(3, 2) == 3 * X
    assert str(X ** 2 - 1) == "x^2 - 1"
    assert Poly([0, 0, 0]) == Poly()
    assert Poly().degree == -1 or Poly().is_zero()


def test_derive_integrate_examples():
    assert (X ** 3).derive() == 3 * X ** 2
    assert Poly.const(Fraction(7, 2)).derive() == 0
    assert Poly.const(1).integrate() == X
    assert (X ** 2).integrate() == Poly([0, 0, 0, Fraction(1, 3)])


def test_shift_evaluate_examples():
    assert (X ** 2).shift(1) == X ** 2 + 2 * X + 1
    assert (X ** 2 + 1).evaluate(2) == 5
    assert Poly.const(1).definite_integral(0, 1) == 1
    assert (2 * X).integrate_from(1) == X ** 2 - 1


@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert f * (g + h) == f * g + f * h
    assert (f * g) * h == f * (g * h)
    assert f * g == g * f
    assert f * 1 == f


@given(polys(), polys())
def test_leibniz(f, g):
    assert (f * g).derive() == f * g.derive() + g * f.derive()


@settings(max_examples=200)
@given(polys(), polys())
def test_weak_rota_baxter(f, g):
    F, G = f.integrate(), g.integrate()
    assert F * G == (f * G).integrate() + (g * F).integrate()


@settings(max_examples=200)
@given(polys(), polys())
def test_strong_rota_baxter(f, g):
    assert f * g.integrate() == (f * g).integrate() + (f.derive() * g.integrate()).integrate()


@settings(max_examples=200)
@given(polys())
def test_section_and_induced_evaluation(f):
    assert f.integrate().derive() == f
    assert f.integrate().evaluate(0) == 0
    assert f - f.derive().integrate() == Poly.const(f.evaluate(0))


@given(polys())
def test_constants_are_kernel(f):
    if not f.derive():
        assert f.degree <= 0


@settings(max_examples=200)
@given(polys(), rats)
def test_shift_commutator(f, c):
    assert f.integrate().shift(c) - f.shift(c).integrate() == Poly.const(f.integrate().evaluate(c))
    assert f.derive().shift(c) == f.shift(c).derive()


@given(polys(), rats, rats)
def test_shift_group(f, a, b):
    assert f.shift(0) == f
    assert f.shift(a).shift(-a) == f
    assert f.shift(a).shift(b) == f.shift(a + b)


@given(polys(), polys(), rats)
def test_shift_is_automorphism(f, g, c):
    assert (f * g).shift(c) == f.shift(c) * g.shift(c)
    assert (f * g).evaluate(c) == f.evaluate(c) * g.evaluate(c)
    assert f.shift(c).evaluate(0) == f.evaluate(c)


@given(polys(), rats, rats, rats)
def test_initialized_integrals(f, c, d, e):
    assert f.integrate_from(c) == f.integrate() - f.integrate().evaluate(c)
    assert f.integrate_from(c) == f.shift(c).integrate().shift(-c)
    assert f.definite_integral(c, d) == f.integrate_from(c).evaluate(d)
    assert f.definite_integral(c, d) == f.integrate_from(c) - f.integrate_from(d)
    assert f.definite_integral(c, d) + f.definite_integral(d, e) == f.definite_integral(c, e)
    assert f.definite_integral(c, d) == simpson(f, c, d)


@settings(max_examples=200)
@given(polys(), rats)
def test_generic_relations(f, s):
    """Integrals started at the positive or negative part of ``s``."""
    integral = f.integrate()
    tail = f.definite_integral(s, 0)
    assert f.integrate_from(pos_part(s)) == integral + heaviside(s) * tail
    assert f.integrate_from(neg_part(s)) == integral + co_heaviside(s) * tail
    assert f.definite_integral(pos_part(s), 0) == heaviside(s) * tail
    assert f.definite_integral(neg_part(s), 0) == co_heaviside(s) * tail


def test_generic_relations_both_branches():
    f = X ** 2 + 1
    for s in (Fraction(-3, 2), Fraction(0), Fraction(5, 4)):
        test_generic_relations.hypothesis.inner_test(f, s)


@given(st.lists(rats, min_size=1, max_size=4), rats)
def test_integrate_from_matches_pointwise_antiderivative(coeffs, c):
    f = Poly(coeffs)
    F = f.integrate_from(c)
    for t in [Fraction(i, 3) for i in range(-10, 10)]:
        assert F(t) == simpson(f, c, t)
