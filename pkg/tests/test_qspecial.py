from fractions import Fraction

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from rsos_impurity.qspecial import (DivergentProduct, Factored, GammaRatioSpec,
                                    Mono, PolarArgument, UnbalancedPrefactor,
                                    double_pochhammer, eta_fn,
                                    gamma_p_ratio, gamma_z, kappa_norm,
                                    phi21, pochhammer, qmono, theta_p)
from rsos_impurity.series import QSeries, RatFunc, ratfunc_to_series

Q, Z = sympy.symbols("q zeta")


def to_sympy(s: QSeries):
    expr = 0
    for (u, z), c in s.terms.items():
        expr += sympy.Rational(int(c.numerator), int(c.denominator)) * Q ** sympy.Rational(u, 2) * Z ** z
    return sympy.expand(expr)


def truncate_sympy(expr, qorder):
    """Drop terms with q-exponent >= qorder (half-integer exponents allowed)."""
    expr = sympy.expand(expr)
    out = 0
    for term in sympy.Add.make_args(expr):
        e = term.as_powers_dict().get(Q, 0)
        if e < qorder:
            out += term
    return out


def oracle_product(factors, qorder):
    """Expand prod (1 - x) for sympy monomials x directly."""
    expr = sympy.Integer(1)
    for x in factors:
        expr = truncate_sympy(expr * (1 - x), qorder)
    return expr


def test_pochhammer_trivial_and_small():
    assert pochhammer(Mono(0), qmono(10), 17) == 1
    # (q^2; q^4) to q^6 by hand: (1-q^2)(1-q^6) = 1 - q^2 - q^6 + ...
    s = pochhammer(qmono(2), qmono(4), 13)
    assert to_sympy(s) == 1 - Q ** 2 - Q ** 6


def test_pochhammer_with_zeta_matches_direct_product():
    s = pochhammer(qmono(1, 2), qmono(2), 17)
    expected = oracle_product([Z ** 2 * Q ** (1 + 2 * n) for n in range(6)], Fraction(17, 2))
    assert sympy.expand(to_sympy(s) - expected) == 0
    # leading terms quoted in the function description
    assert s.q_coefficient(1).terms == {2: -1}
    assert s.q_coefficient(3).terms == {2: -1}
    assert s.q_coefficient(4).terms == {4: 1}


def test_pochhammer_negative_valuation_rejected():
    with pytest.raises(DivergentProduct):
        pochhammer(qmono(-1), qmono(2))


def test_double_pochhammer():
    assert double_pochhammer(Mono(0), qmono(2), qmono(3)) == 1
    assert double_pochhammer(qmono(100), qmono(2), qmono(3), 17) == 1
    s = double_pochhammer(qmono(1), qmono(2), qmono(3), 17)
    exps = [1 + 2 * a + 3 * b for a in range(6) for b in range(4) if 1 + 2 * a + 3 * b <= 8]
    expected = oracle_product([Q ** e for e in exps], Fraction(17, 2))
    assert sympy.expand(to_sympy(s) - expected) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 24), st.integers(-3, 3), st.sampled_from([1, -1, 2]))
def test_theta_quasi_periodicity(u, z, c):
    k = 3
    arg = Mono(c, u, z)
    p = Mono(1, 20, 0)
    lhs = theta_p(p * arg, k, 17)
    rhs = theta_p(arg, k, 17) * QSeries.monomial(-1 / mpq(c), -u, -z)
    assert lhs.agrees_with(rhs)


def test_theta_direct_product():
    # Theta_p(q^2 zeta^2) at k=3, p = q^10
    s = theta_p(qmono(2, 2), 3, 25)
    factors = [Q ** (10 * (n + 1)) for n in range(2)]
    factors += [Q ** (2 + 10 * n) * Z ** 2 for n in range(2)]
    factors += [Q ** (8 + 10 * n) * Z ** -2 for n in range(2)]
    expected = oracle_product(factors, Fraction(25, 2))
    assert sympy.expand(to_sympy(s) - expected) == 0
    t = theta_p(qmono(2, 2), 3)
    assert (t / t).agrees_with(1)


def test_gamma_ratio_trivial_and_unbalanced():
    s = Fraction(1, 10)
    assert gamma_p_ratio(GammaRatioSpec.of([2 * s], [2 * s]), 3) == 1
    with pytest.raises(UnbalancedPrefactor):
        gamma_p_ratio(GammaRatioSpec.of([2 * s], [4 * s]), 3)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 9), min_size=2, max_size=4), st.integers(0, 3), st.sampled_from([1, -1]))
def test_gamma_ratio_perturbation_rejected(args, idx, delta):
    s = Fraction(1, 10)
    xs = [a * s for a in args]
    spec = GammaRatioSpec.of(xs, list(reversed(xs)))
    assert spec.prefactor_imbalance() == 0
    bad = list(xs)
    bad[idx % len(bad)] += delta
    with pytest.raises(UnbalancedPrefactor):
        gamma_p_ratio(GammaRatioSpec.of(bad, xs), 3)
    # compensating the shift keeps the ratio admissible
    comp = list(xs)
    comp[(idx + 1) % len(comp)] += delta
    gamma_p_ratio(GammaRatioSpec.of(bad, comp), 3, 9)


def test_gamma_ratio_matches_pochhammer_ratio():
    # equal argument sums make the (1-p) prefactors cancel; p^{2s} = q^2 at k=3
    s = Fraction(1, 10)
    spec = GammaRatioSpec.of([2 * s, 8 * s], [4 * s, 6 * s])
    g = gamma_p_ratio(spec, 3, 25)
    oracle = (pochhammer(qmono(4), qmono(10), 25) * pochhammer(qmono(6), qmono(10), 25)
              / (pochhammer(qmono(2), qmono(10), 25) * pochhammer(qmono(8), qmono(10), 25)))
    assert g.agrees_with(oracle)


def test_gamma_reflection_identity():
    # Gamma(x)Gamma(1-x) = (1-p)(p;p)^3 / Theta_p(p^x): check via a balanced ratio
    # Gamma(x)Gamma(1-x)/(Gamma(y)Gamma(1-y)) = Theta(p^y)/Theta(p^x)
    s = Fraction(1, 10)
    x, y = 2 * s, 6 * s
    lhs = gamma_p_ratio(GammaRatioSpec.of([x, 1 - x], [y, 1 - y]), 3, 25)
    rhs = theta_p(qmono(6), 3, 25) / theta_p(qmono(2), 3, 25)
    assert lhs.agrees_with(rhs)


def test_eta_trivial_n0():
    assert eta_fn(qmono(0, 2), 0, 3) == 1


def test_eta_defining_identity():
    k, n = 3, 1
    z = Mono(1, 0, 2)
    ep = 20

    def dp(qpow):
        return double_pochhammer(Mono(1, ep + 2 * qpow, 2), qmono(10), qmono(4), 21)

    lhs = eta_fn(z, n, k, 21) * dp(1 - n) * dp(3 + n)
    assert lhs.agrees_with(dp(1 + n) * dp(3 - n))


def test_gamma_z_identity_and_leading():
    k, n = 3, 1
    z = Mono(1, 0, 2)
    g = gamma_z(z, n, k, 21)
    assert g.coefficient(0).terms == {0: 1}

    def dp(qpow):
        return double_pochhammer(Mono(1, 20 + 2 * qpow, 2), qmono(10), qmono(4), 21)

    assert (g * dp(5 + n) * dp(-1 - n)).agrees_with(dp(1 - n) * dp(3 + n))


def test_kappa():
    for M, N in [(1, 1), (2, 1), (1, 2), (2, 2)]:
        assert kappa_norm(M, N, 1).at_zeta(1) == 1
    k21 = kappa_norm(2, 1, 1)
    assert k21.coefficient(0).terms == {1: 1}
    # kappa^{(1,1)} by the product oracle
    k11 = kappa_norm(1, 1, 1, 13)
    oracle = (QSeries.zeta(1)
              * pochhammer(qmono(4, 2), qmono(4), 13) * pochhammer(qmono(2, -2), qmono(4), 13)
              / (pochhammer(qmono(4, -2), qmono(4), 13) * pochhammer(qmono(2, 2), qmono(4), 13)))
    assert k11.agrees_with(oracle)


def test_phi21_basic():
    k = 3
    s = Fraction(1, 10)
    assert phi21(2 * s, 4 * s, 6 * s, Mono(0), k, 3) == 1
    z = qmono(3)
    f = phi21(2 * s, 4 * s, 6 * s, z, k, None, 25)
    # term-by-term oracle with p = q^10, p^a = q^2, p^b = q^4, p^c = q^6;
    # 1/(1-q^e) is expanded as a truncated geometric sum
    def geom(e):
        return sum(Q ** (e * j) for j in range(13 // e + 1))

    expr = 0
    for m in range(5):
        term = Q ** (3 * m)
        for i in range(m):
            term = truncate_sympy(term * (1 - Q ** (2 + 10 * i)) * (1 - Q ** (4 + 10 * i)), 13)
            term = truncate_sympy(term * geom(6 + 10 * i) * geom(10 + 10 * i), 13)
        expr += term
    oracle = truncate_sympy(expr, Fraction(25, 2))
    got = to_sympy(f.truncate(25))
    assert sympy.expand(got - oracle) == 0


def test_phi21_first_coefficient():
    s = Fraction(1, 10)
    f = phi21(2 * s, 4 * s, 6 * s, Mono(1, 0, 1), 3, 2, 25)
    c1 = QSeries({(u, 0): c for (u, z), c in f.terms.items() if z == 1}, 25)
    x = RatFunc.q()
    oracle = ratfunc_to_series((1 - x ** 2) * (1 - x ** 4) / ((1 - x ** 6) * (1 - x ** 10)), 25)
    assert c1.agrees_with(oracle)


def test_phi21_polar():
    with pytest.raises(PolarArgument):
        phi21(Fraction(1, 10), Fraction(1, 10), -1, qmono(1), 3, 3)


def test_factored_cancellation_of_zeta_factor():
    f = Factored.linear(Mono(1, 0, 2)) * Factored.linear(qmono(1))
    g = f / Factored.linear(Mono(1, 0, 2))
    assert g.expand(9).agrees_with(1 - QSeries.q(1))
