
import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from rsos_impurity.series import (NonUnitLeadingCoefficient, NotAFormalSquare,
                                  QSeries, RatFunc, q_binomial, q_integer,
                                  ratfunc_to_series, series_arith,
                                  series_invert, series_sqrt)

ORDER = 17


def q(n=1):
    return QSeries.q(n)


def qser(qcoeffs, order=ORDER):
    """Build a zeta-free series from {q-power: coefficient}."""
    return QSeries({(2 * e, 0): c for e, c in qcoeffs.items()}, order)


def test_identity_and_difference_of_squares():
    a = qser({0: 1, 1: 3, 2: -2})
    assert series_arith(a, QSeries.constant(1), "mul") == a
    assert (1 + q(2)) * (1 - q(2)) == 1 - q(4)


def test_q_integer_squared():
    # (q + 1/q)^2 expanded by hand
    two = ratfunc_to_series(q_integer(2))
    assert two * two == q(-2) + 2 + q(2)


def test_q_integers_small():
    assert q_integer(0).is_zero()
    assert q_integer(1) == RatFunc(1)
    assert q_integer(3) == RatFunc.q(-2) + 1 + RatFunc.q(2)


def test_invert_q2():
    inv = series_invert(ratfunc_to_series(q_integer(2)))
    # long division of 1 by q^-1 + q
    expected = {1: 1, 3: -1, 5: 1, 7: -1}
    for e, c in expected.items():
        assert inv.q_coefficient(e) == c
    assert inv.q_coefficient(2) == 0


def test_invert_geometric_in_zeta():
    a = QSeries({(0, 0): 1, (4, 2): -1}, ORDER)
    inv = series_invert(a)
    for n in range(5):
        assert inv.coefficient(4 * n).terms == {2 * n: 1}
    assert series_invert(QSeries.constant(1)) == 1


def test_invert_rejects_non_monomial_leading():
    a = QSeries({(0, 0): 1, (0, 2): 1, (2, 0): 1}, ORDER)
    with pytest.raises(NonUnitLeadingCoefficient):
        series_invert(a)
    with pytest.raises(NonUnitLeadingCoefficient):
        series_invert(QSeries({}, ORDER))


def test_sqrt_of_q2():
    r = series_sqrt(ratfunc_to_series(q_integer(2)))
    # q^{-1/2} (1 + q^2)^{1/2} = q^{-1/2}(1 + q^2/2 - q^4/8 + q^6/16 ...)
    assert r.coefficient(-1) == 1
    assert r.coefficient(3) == mpq(1, 2)
    assert r.coefficient(7) == mpq(-1, 8)
    assert r.coefficient(11) == mpq(1, 16)
    assert series_sqrt(QSeries.constant(1)) == 1


def test_sqrt_monomial_and_errors():
    r = series_sqrt(QSeries.monomial(4, 6, 2))   # 4 q^3 zeta^2
    assert r.terms == {(3, 1): 2}
    with pytest.raises(NotAFormalSquare):
        series_sqrt(QSeries.monomial(2, 0, 0))
    with pytest.raises(NotAFormalSquare):
        series_sqrt(QSeries.monomial(1, 1, 0))
    with pytest.raises(NotAFormalSquare):
        series_sqrt(QSeries.monomial(-1, 0, 0))


def test_q_binomial():
    assert q_binomial(5, 0) == RatFunc(1)
    assert q_binomial(2, 1) == RatFunc.q(-1) + RatFunc.q(1)
    assert q_binomial(4, 2) == q_integer(4) * q_integer(3) / q_integer(2)
    with pytest.raises(ValueError):
        q_binomial(2, 3)


def test_ratfunc_to_series():
    assert ratfunc_to_series(1 / (1 - RatFunc.q())) == qser({i: 1 for i in range(9)})
    assert ratfunc_to_series(RatFunc(0)).is_zero()
    assert ratfunc_to_series(1 / q_integer(2)).agrees_with(
        series_invert(ratfunc_to_series(q_integer(2))), ORDER)


def test_q_integer_addition_rule():
    for m in range(9):
        for n in range(9):
            lhs = q_integer(m + n)
            rhs = RatFunc.q(n) * q_integer(m) + RatFunc.q(-m) * q_integer(n)
            assert lhs == rhs


def test_truncation_order_propagates():
    a = QSeries({(0, 0): 1}, 10)
    b = QSeries({(2, 0): 1}, 12)
    assert (a + b).order == 10
    assert (a * b).order == 12          # min(10 + 2, 12 + 0)
    assert series_invert(QSeries({(2, 0): 1, (4, 0): 1}, 10)).order == 6


def test_zeta_operations():
    s = QSeries({(0, 1): 1, (2, -1): 3, (2, 3): 1}, ORDER)
    assert s.at_zeta(1) == qser({0: 1, 1: 4})
    assert s.zeta_derivative_at_one() == qser({0: 1, 1: 0})
    with pytest.raises(ValueError):
        s.coefficient(ORDER)


# ----------------------------------------------------------------------
# ring axioms on random data

coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def series(draw, min_val=0):
    n = draw(st.integers(0, 5))
    terms = {}
    for _ in range(n):
        u = draw(st.integers(min_val, 10))
        z = draw(st.integers(-2, 2))
        terms[(u, z)] = mpq(draw(coeff))
    return QSeries(terms, draw(st.integers(10, 16)))


@st.composite
def unit_series(draw):
    lead_u = draw(st.integers(-2, 2))
    lead_z = draw(st.integers(-2, 2))
    c = draw(coeff.filter(lambda x: x != 0))
    rest = draw(series(min_val=1))
    return QSeries({(lead_u, lead_z): mpq(c)}, None) + rest.shift(lead_u, 0)


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert (a * b).agrees_with(b * a)
    assert ((a * b) * c).agrees_with(a * (b * c))
    assert (a * (b + c)).agrees_with(a * b + a * c)
    assert (a + b - b).agrees_with(a)


@settings(max_examples=40, deadline=None)
@given(unit_series())
def test_invert_roundtrip(a):
    assert (a * series_invert(a)).agrees_with(1)


@settings(max_examples=40, deadline=None)
@given(unit_series())
def test_sqrt_roundtrip(a):
    sq = a * a
    r = series_sqrt(sq)
    assert (r * r).agrees_with(sq)
    lead = r.leading()[1]
    assert list(lead.terms.values())[0] > 0


small_poly = st.lists(st.integers(-3, 3), min_size=1, max_size=4)


def _ratfunc(num, den):
    x = RatFunc.q()
    n = sum((c * x ** i for i, c in enumerate(num)), RatFunc(0))
    d = sum((c * x ** i for i, c in enumerate(den)), RatFunc(0))
    return n, d


@settings(max_examples=30, deadline=None)
@given(small_poly, small_poly, small_poly, small_poly)
def test_ratfunc_to_series_is_homomorphism(n1, d1, n2, d2):
    a_n, a_d = _ratfunc(n1, d1)
    b_n, b_d = _ratfunc(n2, d2)
    if a_d.is_zero() or b_d.is_zero():
        return
    a, b = a_n / a_d, b_n / b_d
    sa, sb = ratfunc_to_series(a), ratfunc_to_series(b)
    assert ratfunc_to_series(a * b).agrees_with(sa * sb)
    assert ratfunc_to_series(a + b).agrees_with(sa + sb)


def test_ratfunc_to_series_beyond_order_is_zero():
    r = RatFunc.q(5) / q_integer(2)
    assert ratfunc_to_series(r, 12).is_zero()           # q^5 / [2] = q^6 / (1 + q^2) starts at u^12
    assert ratfunc_to_series(r, 13).agrees_with(QSeries.monomial(1, 12, 0, 13))
