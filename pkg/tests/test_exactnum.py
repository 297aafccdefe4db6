from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from earuntime.exactnum import (
    PoleError, Polynomial, RationalFunction, SeriesError, TruncatedSeries, as_rational,
    format_rational, interpolate, laurent_at_infinity, poly_gcd, rational_arith,
    ratfun_eval, series_compose_and_integrate,
)

P = Polynomial
MU2 = RationalFunction(P([-1, 1, 3]), P([-1, 2, 2]))
MU3 = RationalFunction(P([-6, 15, 14, -42, -19, 40, 22]), P([-1, 2, 2]) * P([6, -9, -7, 12, 6]))

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)
small_polys = st.lists(st.integers(-6, 6), min_size=1, max_size=4).map(P)


def test_rational_arith_examples():
    assert rational_arith(F(1, 3), F(1, 6), "add") == F(1, 2)
    assert rational_arith(F(22, 7), F(7, 22), "mul") == 1
    with pytest.raises(ZeroDivisionError):
        rational_arith(F(3, 4), 0, "div")
    with pytest.raises(ValueError):
        rational_arith(1, 2, "pow")


def test_as_rational_and_format():
    assert as_rational("1/6") == F(1, 6)
    assert as_rational(" 3 ") == 3
    assert format_rational(F(-4, 6)) == "-2/3"
    assert format_rational(F(5)) == "5"
    with pytest.raises(TypeError):
        as_rational(object())


def test_ratfun_eval_examples():
    assert ratfun_eval(MU2, 2) == F(13, 11)
    assert ratfun_eval(MU2, 1) == 1
    assert ratfun_eval(RationalFunction(P([0, 1]), P([0, 1])), 5) == 1


def test_ratfun_eval_pole():
    f = RationalFunction(P([1]), P([-2, 1]))
    with pytest.raises(PoleError):
        ratfun_eval(f, 2)


def test_reduction_is_canonical():
    a = RationalFunction(P([-1, 1, 3]) * P([1, 1]), P([-1, 2, 2]) * P([1, 1]))
    assert a == MU2
    b = RationalFunction(P([2, 6]), P([-4, -8]))
    assert b == RationalFunction(P([-1, -3]), P([2, 4]))
    assert b.denominator.leading > 0


def test_integer_form_display():
    num, den = MU2.integer_form()
    assert str(num) == "3n^2+n-1"
    assert str(den) == "2n^2+2n-1"


@pytest.mark.parametrize("f, order, expected", [
    (MU2, 4, [F(3, 2), -1, F(5, 4), F(-7, 4)]),
    (MU3, 4, [F(11, 6), F(-13, 6), F(155, 36), F(-323, 36)]),
    (RationalFunction(P([0, 1]), P([1, 1])), 3, [1, -1, 1]),
])
def test_laurent_examples(f, order, expected):
    assert list(laurent_at_infinity(f, order).coefficients) == expected


def test_laurent_shift_and_polynomial_part():
    f = RationalFunction(P([1]), P([0, 1, 1]))  # 1/(n^2+n)
    assert list(laurent_at_infinity(f, 4).coefficients) == [0, 0, 1, -1]
    with pytest.raises(ValueError):
        laurent_at_infinity(RationalFunction(P([0, 0, 1]), P([1, 1])), 3)


@pytest.mark.parametrize("f, K", [(MU2, 3), (MU3, 3)])
def test_laurent_truncation_error(f, K):
    series = laurent_at_infinity(f, K + 1)
    n = 10 ** 6
    approx = sum(c * F(1, n) ** k for k, c in enumerate(series.coefficients[:K]))
    exact = ratfun_eval(f, n)
    bound = 10 * abs(series.coefficients[K]) * F(1, 10) ** (6 * K)
    assert abs(approx - exact) / exact <= bound


def test_series_examples():
    s = TruncatedSeries([1, 1, 0, 0, 0])
    assert list(series_compose_and_integrate(s, "reciprocal").coefficients) == [1, -1, 1, -1, 1]
    prod = series_compose_and_integrate(TruncatedSeries([1, 1, 0]), "multiply", TruncatedSeries([1, -1, 0]))
    assert list(prod.coefficients) == [1, 0, -1]
    with pytest.raises(ValueError):
        series_compose_and_integrate(s, "compose")


def test_integrate_termwise_reproduces_phi1():
    from earuntime.specfun import S_series
    s1 = S_series(1, 8)
    inv_x = TruncatedSeries([F(1)] + [F(0)] * 8, valuation=-1)
    deriv = s1.reciprocal(allow_pole=True) - inv_x
    phi1 = series_compose_and_integrate(deriv.truncate(4).as_power_series(), "integrate_termwise")
    assert phi1.plain()[:4] == [0, F(-3, 2), F(11, 12), F(-283, 432)]


def test_reciprocal_of_vanishing_series():
    with pytest.raises(SeriesError):
        TruncatedSeries([0, 1, 2]).reciprocal()
    inv = TruncatedSeries([0, 1, 2]).reciprocal(allow_pole=True)
    assert inv.valuation == -1


def test_shift_point_roundtrip():
    s = TruncatedSeries([F(1), F(2), F(3)])
    t = s.shift_point(F(1, 2))
    assert t.point == F(1, 2)
    for x in (F(0), F(1, 3), F(-2)):
        assert t.evaluate(x - F(1, 2)) == s.evaluate(x)
    with pytest.raises(SeriesError):
        s + t


def test_float_carrier():
    s = TruncatedSeries([1.0, 0.5, 0.25])
    r = s.reciprocal()
    prod = s * r
    assert prod.coefficients[0] == pytest.approx(1.0)
    assert all(abs(c) < 1e-15 for c in prod.coefficients[1:])


@given(st.lists(rationals, min_size=1, max_size=8).filter(lambda c: c[0] != 0))
def test_reciprocal_inverse_property(coeffs):
    s = TruncatedSeries(coeffs)
    prod = s * s.reciprocal()
    assert list(prod.coefficients) == [1] + [0] * (len(coeffs) - 1)


@given(small_polys, small_polys.filter(lambda p: not p.is_zero()))
def test_interpolation_reconstructs(num, den):
    xs = range(3, 3 + num.degree + den.degree + 3)
    # skip sample points at poles
    if any(den(x) == 0 for x in xs):
        return
    f = RationalFunction(num, den)
    # reconstruct numerator from samples of f * den
    ys = [ratfun_eval(f, x) * den(x) for x in xs]
    assert interpolate(list(xs), ys) == num


@given(small_polys, small_polys, small_polys)
def test_gcd_divides(a, b, c):
    if c.is_zero() or (a.is_zero() and b.is_zero()):
        return
    g = poly_gcd(a * c, b * c)
    assert ((a * c) % g).is_zero() and ((b * c) % g).is_zero()
    assert (g % c.monic()).is_zero()


@given(rationals, rationals, st.sampled_from(["add", "sub", "mul"]))
def test_rational_arith_matches_fraction(a, b, op):
    expect = {"add": a + b, "sub": a - b, "mul": a * b}[op]
    assert rational_arith(a, b, op) == expect
