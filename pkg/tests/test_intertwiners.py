import pytest
from gmpy2 import mpq

from rsos_impurity.intertwiners import (InadmissiblePair, SqrtRat, check_x_table_entry,
                                        compare_with_golden, golden_labels, graded_apply,
                                        type1_expand, type2_expand, type2_null_check,
                                        x_commutation_check, x_operator, x_table_entries,
                                        z_operator)
from rsos_impurity.modules import (ONE, EvalModule, Tensor, hw_module, listed_vector,
                                   qint)
from rsos_impurity.series import QSeries, RatFunc, _Q, ratfunc_to_series

q = _Q


def test_sqrt_rat_equality_and_sign():
    a = SqrtRat(-q, q / qint(2))           # -q^{3/2}/[2]^{1/2}
    b = SqrtRat(-q ** 2, 1 / (q * qint(2)))
    assert a == b
    assert a != -b
    assert SqrtRat(0, q) == SqrtRat(0)
    # [2] = q + 1/q, so -q^{3/2}/[2]^{1/2} = -q^2 (1 + q^2)^{-1/2} = -q^2 + q^4/2 - ...
    s = a.to_series(9)
    expected = QSeries({(4, 0): -1, (8, 0): mpq(1, 2)}, 9)
    assert s.agrees_with(expected)


@pytest.mark.parametrize("label", golden_labels())
def test_listed_expansions_reproduced(label):
    res = compare_with_golden(label)
    assert res["ok"], res["mismatches"]


def test_first_expansion_terms_explicit():
    exp = type1_expand((1, 0), (0, 1), 1, 3)
    m = hw_module((0, 1))
    deg1 = exp.homogeneous(1)
    f1v = m.word_vector((1,))
    assert deg1 == {(k, 0): -q * v for k, v in f1v.items()}


def _graded_intertwining_ok(source_dyn, exp, N, D):
    """D(e_i) Phi(v) = 0 and t_i Phi(v) = q^{<h_i, lam>} Phi(v) through zeta^D."""
    ten = Tensor(hw_module(exp.target), EvalModule(N))
    graded = exp.graded()
    for i in (0, 1):
        out = graded_apply(ten, f"e{i}", graded)
        if any(zp <= D for (zp, _k) in out):
            return False
        t = graded_apply(ten, f"t{i}", graded)
        if t != {k: v * q ** source_dyn[i] for k, v in graded.items()}:
            return False
    return True


@pytest.mark.parametrize("src,tgt,N", [((1, 0), (0, 1), 1), ((3, 0), (2, 1), 1),
                                        ((2, 1), (3, 0), 1), ((3, 0), (1, 2), 2)])
def test_type1_intertwining_property(src, tgt, N):
    exp = type1_expand(src, tgt, N, 4)
    assert _graded_intertwining_ok(src, exp, N, 4)


def test_type1_null_vectors():
    # D(f_i)^{m_i + 1} Phi(v) vanishes in every zeta power fully determined by the truncation
    src, tgt, D = (2, 1), (3, 0), 4
    exp = type1_expand(src, tgt, 1, D)
    ten = Tensor(hw_module(tgt, 8), EvalModule(1))
    for i in (0, 1):
        vec = exp.graded()
        for _ in range(src[i] + 1):
            vec = graded_apply(ten, f"f{i}", vec)
        assert all(zp > D - src[i] - 1 for (zp, _k) in vec)


def test_type1_inadmissible():
    with pytest.raises(InadmissiblePair):
        type1_expand((3, 0), (0, 3), 1, 2)
    with pytest.raises(InadmissiblePair):
        type1_expand((3, 0), (1, 0), 1, 2)


def test_type2_null_vectors_and_weights():
    assert type2_null_check(4)
    for a in (0, 1):
        exp = type2_expand(a, 3)
        ten = Tensor(hw_module((0, 1)), EvalModule(2))
        h1 = 1 - 2 * a
        t = graded_apply(ten, "t1", exp.graded())
        assert t == {k: v * q ** h1 for k, v in exp.graded().items()}


def test_type2_leading_coefficient():
    exp = type2_expand(0, 2)
    lead = exp.principal(0)
    assert lead == {((0, 0, 0), 1): SqrtRat(1 / q, q / qint(2))}


def test_degree_consistency():
    a = type1_expand((3, 0), (2, 1), 1, 2)
    b = type1_expand((3, 0), (2, 1), 1, 4)
    for d in range(3):
        assert a.homogeneous(d) == b.homogeneous(d)
    src = listed_vector("x1_0")
    x3 = x_operator(0, 1, src, (2, 0), (1, 0), 3)
    x4 = x_operator(0, 1, src, (2, 0), (1, 0), 4)
    assert x3.terms == [t for t in x4.terms if t[0] <= 3]


@pytest.mark.parametrize("entry", [e for _, e in x_table_entries()],
                         ids=[f"{n}-X{e['op'][0]}{e['op'][1]}-{e['source']}" for n, e in x_table_entries()])
def test_x_tables(entry):
    res = check_x_table_entry(entry)
    assert res["ok"], res["problems"]


def test_x_first_line_exact():
    res = x_operator(0, 1, listed_vector("x1_0"), (2, 0), (1, 0), 3)
    c1, z1 = res.coefficient(listed_vector("x1_1"))
    c2, z2 = res.coefficient(listed_vector("x2_1"))
    assert (c1, z1) == (ONE, 0)
    assert z2 == 2 and ratfunc_to_series(RatFunc(c2), 7).agrees_with(QSeries.monomial(1, 6, 0, 7))


def test_x_table_check_detects_corruption():
    _, entry = x_table_entries()[0]
    bad = dict(entry, result=[["x1_1", 0, "1"], ["x2_1", 2, "2*q**3"]])
    assert not check_x_table_entry(bad)["ok"]


def test_z_operator_on_ground_vector():
    res = z_operator(listed_vector("x1_0"), 3)
    c1, z1 = res.coefficient(listed_vector("y1_2"))
    c2, z2 = res.coefficient(listed_vector("y2_2"))
    assert (c1, z1) == (ONE, 0)
    assert z2 == 2 and c2 == qint(2) / (qint(4) * qint(3) - qint(2))


def test_z_output_weight():
    # every output vector is a highest weight vector of weight index 2
    from rsos_impurity.modules import is_highest
    res = z_operator(listed_vector("x1_0"), 4)
    for d, vec, c, zp in res.terms:
        assert is_highest((1, 1), (0, 1), vec)
        assert zp == d


@pytest.mark.parametrize("chain,label,xi,eta", [
    ((0, 1, 0), "x1_0", (2, 0), (1, 0)),
    ((0, 1, 2), "x1_0", (2, 0), (1, 0)),
    ((1, 0, 1), "y1_1", (1, 1), (1, 0)),
    ((1, 2, 3), "y1_1", (1, 1), (1, 0)),
    ((2, 1, 0), "x1_2", (2, 0), (1, 0)),
])
def test_x_commutation(chain, label, xi, eta):
    assert x_commutation_check(chain, listed_vector(label), xi, eta, order=7, max_degree=3,
                               target_degree=2)


def test_x_commutation_chain_errors():
    with pytest.raises(InadmissiblePair):
        x_commutation_check((0, 2, 1), listed_vector("x1_0"), (2, 0), (1, 0))
