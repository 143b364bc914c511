"""Loading of the golden tables shipped in ``rsos_impurity/data``.

Coefficients are stored as short expressions in ``q`` and ``br(n)`` (the
q-integer [n]) and converted to exact elements of Q(q).
"""

from functools import lru_cache
from importlib import resources

import sympy
import yaml
from gmpy2 import mpq

from .series import _RF_FIELD, QSeries

_q = sympy.Symbol("q")


def _br(n):
    return (_q ** n - _q ** (-n)) / (_q - 1 / _q)


def parse_coefficient(text):
    """'q**2/br(2)' -> element of Q(q)."""
    expr = sympy.sympify(str(text), locals={"q": _q, "br": _br})
    return _RF_FIELD.from_expr(sympy.cancel(sympy.together(expr)))


def parse_word(text):
    """'0 1 0' -> (0, 1, 0); '' -> ()."""
    return tuple(int(t) for t in str(text).split())


@lru_cache(maxsize=None)
def load(name):
    with resources.files("rsos_impurity.data").joinpath(name).open("r") as fh:
        return yaml.safe_load(fh)


_z = sympy.Symbol("z")


def parse_series(text, order):
    """Laurent polynomial in q and z (= zeta) -> QSeries truncated below u^order."""
    expr = sympy.expand(sympy.sympify(str(text), locals={"q": _q, "z": _z}))
    terms = {}
    for term in sympy.Add.make_args(expr):
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict() if rest != 1 else {}
        qe = sympy.sympify(powers.get(_q, 0))
        ze = sympy.sympify(powers.get(_z, 0))
        if set(powers) - {_q, _z} or not (qe.is_integer and ze.is_integer):
            raise ValueError(f"not a Laurent monomial in q and z: {term}")
        terms[(2 * int(qe), int(ze))] = terms.get((2 * int(qe), int(ze)), 0) + sympy.Rational(coeff)
    return QSeries({k: mpq(int(v.p), int(v.q)) for k, v in terms.items()}, order)
