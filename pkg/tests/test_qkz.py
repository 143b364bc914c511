from fractions import Fraction

import mpmath
import pytest

from rsos_impurity.qkz import (CASES, MatrixElementSpec, ZETA_SQUARED,
                               contiguity_check, contiguity_suite, determine_j,
                               matrix_specs, psi_element, qkz_shift_check)
from rsos_impurity.qspecial import Mono, PolarArgument, qmono
from rsos_impurity.weights import NoValidJ

S = Fraction(1, 10)   # s at level 3


def numeric_psi(spec, q, zeta, terms=40):
    """Independent float evaluation of the two components, straight from the
    product and sum definitions (p = q^{2(k+2)}, z = zeta^2)."""
    q = mpmath.mpf(q)
    p = q ** (2 * (spec.k + 2))
    z = mpmath.mpf(zeta) ** 2
    n, a, j = spec.n, spec.a, spec.j

    def dpoch(x):
        out = mpmath.mpf(1)
        for i in range(terms):
            for l in range(terms):
                out *= 1 - x * p ** i * q ** (4 * l)
        return out

    gam = (dpoch(p * z * q ** (1 - n)) * dpoch(p * z * q ** (3 + n))
           / (dpoch(p * z * q ** (5 + n)) * dpoch(p * z * q ** (-1 - n))))

    def phi(al, be, ga, w):
        tot, t = mpmath.mpf(0), mpmath.mpf(1)
        for m in range(terms):
            tot += t
            t *= ((1 - p ** (al + m)) * (1 - p ** (be + m))
                  / ((1 - p ** (ga + m)) * (1 - p ** (m + 1)))) * w
        return tot

    al, be, ga = (float(x) for x in spec.phi_parameters())
    w = z * p * q ** (1 + n)
    if spec.case == "mu-":
        pref = z * p * q ** (-2 * (a + 1) + j) * (1 - q ** (-2 * j)) / (1 - p * q ** (-2 * (a + 1)))
    elif spec.case == "mu+":
        pref = q ** (2 * (a + 1) + n - j) * (1 - q ** (2 * (j - n))) / (1 - q ** (2 * (a + 1)))
    elif spec.case == "nu+":
        pref = z * q ** (j - n) * (1 - q ** (2 * (n - j))) / (1 - q ** (2 * (a + 2 - n + 2 * j)) / p)
    else:
        pref = q ** (-j) * (1 - q ** (2 * j)) / (1 - q ** (-2 * (a - n + 2 * j)))
    return gam * phi(al, be, ga, w), gam * pref * phi(al + 1, be, ga + 1, w)


def test_determine_j_examples():
    # mu = lambda_+ with lambda = 0, nu = 0 at n = 1: v_0 (x) w_1 carries weight 0 = 0 - 0
    assert determine_j(1, "mu+", 0, 0) == 0
    assert determine_j(2, "nu-", 1, 0) == 1
    with pytest.raises(NoValidJ):
        determine_j(1, "mu+", 0, 1)


def test_matrix_specs_cover_all_cases():
    for n in (1, 2):
        specs = matrix_specs(n)
        assert {s.case for s, _, _ in specs} == set(CASES)
        for s, mu, nu in specs:
            assert determine_j(n, s.case, s.a, nu) == s.j


def test_psi_at_zero_argument():
    for n in (1, 2):
        for spec, _, _ in matrix_specs(n):
            first, second = psi_element(spec, Mono(0), 13)
            assert first.agrees_with(1)
            expected = spec.second_prefactor(Mono(0))
            if spec.case in ("mu-", "nu+"):
                assert second.is_zero()      # these prefactors carry a factor z
            elif not expected.is_zero():
                assert second.agrees_with(expected.expand(13))


def test_second_component_vanishes_at_chain_end():
    spec = MatrixElementSpec(2, "mu+", 1, 2)   # j = n
    first, second = psi_element(spec, ZETA_SQUARED, 13)
    assert second.is_zero()
    assert not first.is_zero()


@pytest.mark.parametrize("spec", [MatrixElementSpec(1, "mu-", 0, 1),
                                  MatrixElementSpec(1, "mu-", 1, 1),
                                  MatrixElementSpec(1, "mu+", 0, 0),
                                  MatrixElementSpec(2, "nu+", 1, 1),
                                  MatrixElementSpec(2, "nu-", 2, 1)])
def test_psi_against_numeric_oracle(spec):
    q, zeta = 0.05, 1.3
    first, second = psi_element(spec, ZETA_SQUARED, 25)
    n1, n2 = numeric_psi(spec, q, zeta)
    assert abs(first.evaluate(q, zeta) - float(n1)) < 1e-12
    assert abs(second.evaluate(q, zeta) - float(n2)) < 1e-12


def test_contiguity_trivial_at_zero():
    assert contiguity_check(1, 2 * S, 4 * S, 6 * S, Mono(0), 3, 13)


def test_contiguity_on_matrix_element_arguments():
    results = contiguity_suite(order=17)
    assert results and all(v is True for v in results.values())


def test_printed_second_identity_fails():
    spec = MatrixElementSpec(1, "nu-", 2, 1)
    w = spec.phi_argument(ZETA_SQUARED)
    tup = spec.phi_parameters()
    assert contiguity_check(2, *tup, w, 3, 17)
    assert not contiguity_check(2, *tup, w, 3, 17, printed=True)


def test_contiguity_generic_arguments():
    for tup in [(2 * S, 4 * S, 6 * S), (-2 * S, 3 * S, 7 * S), (1 + S, 2 * S, 1 + 3 * S)]:
        for identity in (1, 2):
            assert contiguity_check(identity, *tup, qmono(3, 2), 3, 17)


def test_contiguity_polar():
    with pytest.raises(PolarArgument):
        contiguity_check(1, 2 * S, 4 * S, -1, qmono(3), 3, 13)


@pytest.mark.parametrize("spec", [MatrixElementSpec(1, "mu+", 0, 0),
                                  MatrixElementSpec(2, "nu+", 1, 1),
                                  MatrixElementSpec(2, "mu+", 1, 2)])
def test_shift_check(spec):
    assert qkz_shift_check(spec, 17)


def test_shift_check_all_specs():
    for n in (1, 2):
        for spec, _, _ in matrix_specs(n):
            assert qkz_shift_check(spec, 13), spec
