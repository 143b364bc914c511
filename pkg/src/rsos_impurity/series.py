"""Exact truncated series in ``u = q**(1/2)`` with Laurent-polynomial
coefficients in the spectral parameter ``zeta``, plus exact rational
functions of ``q``.

A :class:`QSeries` stores a sparse map ``(u_exponent, zeta_exponent) -> mpq``
together with a truncation order: every coefficient with u-exponent strictly
below ``order`` is exact, nothing above it is known.  ``order=None`` marks an
exact (finite) series.
"""
from __future__ import annotations

import os
from typing import Dict, Iterable, Optional, Tuple

from gmpy2 import mpq, is_square, isqrt
from sympy import QQ
from sympy.polys.fields import field

Rational = type(mpq(0))

DEFAULT_ORDER = int(os.environ.get("RSOS_ORDER", "17"))

_RF_FIELD, _Q = field("q", QQ)


class NonUnitLeadingCoefficient(ArithmeticError):
    pass


class NotAFormalSquare(ArithmeticError):
    pass


def _min_order(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class ZetaPoly:
    """Laurent polynomial in zeta over the rationals (immutable)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[int, object]] = None):
        self.terms = {k: mpq(v) for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def monomial(cls, coeff, zexp: int = 0) -> "ZetaPoly":
        return cls({zexp: coeff})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, ZetaPoly):
            other = ZetaPoly({0: other})
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "ZetaPoly") -> "ZetaPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return ZetaPoly(out)

    def __neg__(self):
        return ZetaPoly({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "ZetaPoly") -> "ZetaPoly":
        out: Dict[int, object] = {}
        for k1, v1 in self.terms.items():
            for k2, v2 in other.terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + v1 * v2
        return ZetaPoly(out)

    def evaluate(self, zeta) -> object:
        return sum((v * zeta ** k for k, v in self.terms.items()), mpq(0))

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{v}*z^{k}" for k, v in sorted(self.terms.items()))


class QSeries:
    """Truncated Laurent series in u with ZetaPoly coefficients."""

    __slots__ = ("terms", "order")

    def __init__(self, terms: Optional[Dict[Tuple[int, int], object]] = None,
                 order: Optional[int] = DEFAULT_ORDER):
        t = {}
        for (ue, ze), c in (terms or {}).items():
            if c != 0 and (order is None or ue < order):
                t[(ue, ze)] = mpq(c)
        self.terms = t
        self.order = order

    # -- constructors -------------------------------------------------
    @classmethod
    def _raw(cls, terms, order):
        s = object.__new__(cls)
        s.terms = terms
        s.order = order
        return s

    @classmethod
    def constant(cls, c=1, order: Optional[int] = None) -> "QSeries":
        return cls({(0, 0): c}, order)

    @classmethod
    def monomial(cls, coeff=1, uexp: int = 0, zexp: int = 0,
                 order: Optional[int] = None) -> "QSeries":
        return cls({(uexp, zexp): coeff}, order)

    @classmethod
    def q(cls, power: int = 1, order: Optional[int] = None) -> "QSeries":
        """``q**power`` (integer power of q, i.e. ``u**(2*power)``)."""
        return cls.monomial(1, 2 * power, 0, order)

    @classmethod
    def zeta(cls, power: int = 1, order: Optional[int] = None) -> "QSeries":
        return cls.monomial(1, 0, power, order)

    @classmethod
    def from_coefficients(cls, coeffs: Dict[int, ZetaPoly], order=DEFAULT_ORDER):
        return cls({(ue, ze): c for ue, zp in coeffs.items() for ze, c in zp.terms.items()}, order)

    # -- inspection ---------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def valuation(self) -> Optional[int]:
        """Lowest u-exponent present; ``None`` for the zero series."""
        if not self.terms:
            return None
        return min(ue for ue, _ in self.terms)

    def coefficient(self, uexp: int) -> ZetaPoly:
        if self.order is not None and uexp >= self.order:
            raise ValueError(f"u^{uexp} is beyond truncation order {self.order}")
        return ZetaPoly({ze: c for (ue, ze), c in self.terms.items() if ue == uexp})

    def q_coefficient(self, qexp) -> ZetaPoly:
        """Coefficient of ``q**qexp`` (``qexp`` may be a half integer)."""
        ue = 2 * qexp
        if ue != int(ue):
            raise ValueError("q exponent must be a multiple of 1/2")
        return self.coefficient(int(ue))

    def leading(self) -> Tuple[int, ZetaPoly]:
        v = self.valuation()
        if v is None:
            raise NonUnitLeadingCoefficient("zero series has no leading term")
        return v, self.coefficient(v)

    def sorted_terms(self) -> Iterable[Tuple[int, int, Rational]]:
        for (ue, ze) in sorted(self.terms):
            yield ue, ze, self.terms[(ue, ze)]

    # -- arithmetic ---------------------------------------------------
    @staticmethod
    def _coerce(x) -> "QSeries":
        if isinstance(x, QSeries):
            return x
        if isinstance(x, RatFunc):
            return ratfunc_to_series(x)
        return QSeries.constant(x)

    def truncate(self, order: Optional[int]) -> "QSeries":
        new = _min_order(self.order, order)
        if new == self.order:
            return self
        return QSeries._raw({k: v for k, v in self.terms.items() if k[0] < new}, new)

    def __add__(self, other) -> "QSeries":
        other = self._coerce(other)
        order = _min_order(self.order, other.order)
        out = {k: v for k, v in self.terms.items() if order is None or k[0] < order}
        for k, v in other.terms.items():
            if order is not None and k[0] >= order:
                continue
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return QSeries._raw(out, order)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw({k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other) -> "QSeries":
        other = self._coerce(other)
        va, vb = self.valuation(), other.valuation()
        if va is None or vb is None:
            # zero times anything: precision is what the zero factor carries
            oa = None if self.order is None or vb is None else self.order + vb
            ob = None if other.order is None or va is None else other.order + va
            if va is None and vb is None:
                oa = _min_order(self.order, other.order)
                ob = None
            return QSeries._raw({}, _min_order(oa, ob))
        order = _min_order(None if self.order is None else self.order + vb,
                           None if other.order is None else other.order + va)
        out: Dict[Tuple[int, int], object] = {}
        bterms = list(other.terms.items())
        for (u1, z1), c1 in self.terms.items():
            lim = None if order is None else order - u1
            for (u2, z2), c2 in bterms:
                if lim is not None and u2 >= lim:
                    continue
                key = (u1 + u2, z1 + z2)
                out[key] = out.get(key, 0) + c1 * c2
        return QSeries._raw({k: v for k, v in out.items() if v}, order)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QSeries":
        if n < 0:
            return series_invert(self) ** (-n)
        result = QSeries.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __truediv__(self, other) -> "QSeries":
        return self * series_invert(self._coerce(other))

    def __rtruediv__(self, other):
        return self._coerce(other) * series_invert(self)

    def scale(self, c) -> "QSeries":
        c = mpq(c)
        if c == 0:
            return QSeries._raw({}, self.order)
        return QSeries._raw({k: v * c for k, v in self.terms.items()}, self.order)

    def shift(self, uexp: int = 0, zexp: int = 0) -> "QSeries":
        """Multiply by the monomial ``u**uexp * zeta**zexp`` (exactly)."""
        return QSeries._raw({(u + uexp, z + zexp): c for (u, z), c in self.terms.items()},
                            None if self.order is None else self.order + uexp)

    # -- comparison ---------------------------------------------------
    def agrees_with(self, other, order: Optional[int] = None) -> bool:
        """True when the two series coincide below the common precision."""
        other = self._coerce(other)
        diff = self - other
        if order is not None:
            if diff.order is not None and diff.order < order:
                raise ValueError(f"insufficient precision: known to u^{diff.order}, asked {order}")
            diff = diff.truncate(order)
        return diff.is_zero()

    def __eq__(self, other):
        if not isinstance(other, (QSeries, int, Rational, RatFunc)):
            return NotImplemented
        return self.agrees_with(other)

    __hash__ = None

    # -- zeta handling ------------------------------------------------
    def at_zeta(self, zeta=1) -> "QSeries":
        """Substitute a rational value for zeta."""
        zeta = mpq(zeta)
        out: Dict[Tuple[int, int], object] = {}
        for (u, z), c in self.terms.items():
            out[(u, 0)] = out.get((u, 0), 0) + c * zeta ** z
        return QSeries(out, self.order)

    def zeta_derivative_at_one(self) -> "QSeries":
        """d/dzeta evaluated at zeta = 1."""
        out: Dict[Tuple[int, int], object] = {}
        for (u, z), c in self.terms.items():
            out[(u, 0)] = out.get((u, 0), 0) + c * z
        return QSeries(out, self.order)

    def zeta_exponents(self, uexp: int):
        return sorted(z for (u, z) in self.terms if u == uexp)

    def evaluate(self, q: float, zeta: float = 1.0) -> float:
        """Numerical value of the truncated sum at real ``q`` (u-exponents must be even)."""
        tot = 0.0
        for (u, z), c in self.terms.items():
            if u % 2:
                raise ValueError("odd u-power: value at real negative q is not real")
            tot += float(c) * q ** (u // 2) * zeta ** z
        return tot

    def __repr__(self):
        parts = []
        for ue, ze, c in self.sorted_terms():
            qe = f"{ue // 2}" if ue % 2 == 0 else f"{ue}/2"
            parts.append(f"{c}*q^{qe}*z^{ze}")
        body = " + ".join(parts) if parts else "0"
        if self.order is None:
            return f"QSeries({body})"
        return f"QSeries({body} + O(u^{self.order}))"


def series_arith(a: QSeries, b: QSeries, op: str) -> QSeries:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def _split_leading(a: QSeries):
    v, lead = a.leading()
    if not lead.is_monomial():
        raise NonUnitLeadingCoefficient(f"leading coefficient {lead} is not a monomial")
    (zl, cl), = lead.terms.items()
    return v, zl, cl


def series_invert(a: QSeries) -> QSeries:
    """Multiplicative inverse; the leading coefficient must be a zeta-monomial."""
    v, zl, cl = _split_leading(a)
    # a = c u^v z^zl (1 + r),  r has positive valuation
    order = None if a.order is None else a.order - 2 * v
    rel = None if a.order is None else a.order - v
    inv_c = 1 / cl
    r = QSeries._raw({(u - v, z - zl): c * inv_c for (u, z), c in a.terms.items()
                      if (u, z) != (v, zl)}, rel)
    if r.is_zero() and rel is None:
        return QSeries.monomial(inv_c, -v, -zl)
    if rel is None:
        raise NonUnitLeadingCoefficient("inverse of an exact non-monomial needs a truncation order")
    # 1/(1+r) = sum (-r)^n
    total = QSeries.constant(1, rel)
    term = QSeries.constant(1, rel)
    mr = -r
    vr = r.valuation()
    if vr is not None:
        for _ in range(rel // vr + 1):
            term = (term * mr).truncate(rel)
            if term.is_zero():
                break
            total = total + term
    return total.scale(inv_c).shift(-v, -zl).truncate(order)


def series_sqrt(a: QSeries) -> QSeries:
    """Principal square root (positive rational leading coefficient)."""
    v, zl, cl = _split_leading(a)
    if v % 2 or zl % 2 or cl < 0:
        raise NotAFormalSquare(f"leading term {cl} u^{v} z^{zl} has no square root in the ring")
    n, d = cl.numerator, cl.denominator
    if not (is_square(n) and is_square(d)):
        raise NotAFormalSquare(f"{cl} is not the square of a rational")
    root_c = mpq(isqrt(n), isqrt(d))
    rel = None if a.order is None else a.order - v
    r = QSeries._raw({(u - v, z - zl): c / cl for (u, z), c in a.terms.items()
                      if (u, z) != (v, zl)}, rel)
    if r.is_zero() and rel is None:
        return QSeries.monomial(root_c, v // 2, zl // 2)
    if rel is None:
        raise NotAFormalSquare("square root of an exact non-monomial needs a truncation order")
    total = binomial_series(r, mpq(1, 2), rel)
    order = None if a.order is None else a.order - v // 2
    return total.scale(root_c).shift(v // 2, zl // 2).truncate(order)


def binomial_series(r: QSeries, e, rel: int) -> QSeries:
    """(1 + r)**e for positive-valuation r, to u-order ``rel``."""
    e = mpq(e)
    total = QSeries.constant(1, rel)
    vr = r.valuation()
    if vr is None:
        return total
    if vr <= 0:
        raise ValueError("binomial series needs positive valuation")
    term = QSeries.constant(1, rel)
    coeff = mpq(1)
    for n in range(1, rel // vr + 1):
        coeff = coeff * (e - n + 1) / n
        term = (term * r).truncate(rel)
        if term.is_zero() or coeff == 0:
            break
        total = total + term.scale(coeff)
    return total


class RatFunc:
    """Exact rational function of q with rational coefficients (reduced)."""

    __slots__ = ("_f",)

    def __init__(self, f=0):
        if isinstance(f, RatFunc):
            f = f._f
        self._f = _RF_FIELD(f) if not hasattr(f, "numer") else f

    @classmethod
    def q(cls, power: int = 1) -> "RatFunc":
        return cls(_Q ** power)

    @property
    def numerator(self):
        return self._f.numer

    @property
    def denominator(self):
        return self._f.denom

    def _c(self, other):
        return other._f if isinstance(other, RatFunc) else other

    def __add__(self, o):
        return RatFunc(self._f + self._c(o))

    __radd__ = __add__

    def __sub__(self, o):
        return RatFunc(self._f - self._c(o))

    def __rsub__(self, o):
        return RatFunc(self._c(o) - self._f)

    def __mul__(self, o):
        if isinstance(o, QSeries):
            return NotImplemented
        return RatFunc(self._f * self._c(o))

    __rmul__ = __mul__

    def __truediv__(self, o):
        return RatFunc(self._f / self._c(o))

    def __rtruediv__(self, o):
        return RatFunc(self._c(o) / self._f)

    def __neg__(self):
        return RatFunc(-self._f)

    def __pow__(self, n: int):
        return RatFunc(self._f ** n)

    def __eq__(self, o):
        if isinstance(o, QSeries):
            return NotImplemented
        return self._f == self._c(o)

    def __hash__(self):
        return hash(self._f)

    def __bool__(self):
        return bool(self._f)

    def is_zero(self) -> bool:
        return not self._f

    def __repr__(self):
        return f"RatFunc({self._f.as_expr()})"

    def as_expr(self):
        return self._f.as_expr()


def q_integer(n: int) -> RatFunc:
    """Symmetric q-integer ``(q^n - q^-n)/(q - q^-1)``."""
    if n < 0:
        return -q_integer(-n)
    q = _Q
    return RatFunc(sum((q ** (n - 1 - 2 * i) for i in range(n)), _RF_FIELD(0)))


def q_factorial(n: int) -> RatFunc:
    out = RatFunc(1)
    for i in range(1, n + 1):
        out = out * q_integer(i)
    return out


def q_binomial(n: int, j: int) -> RatFunc:
    if not 0 <= j <= n:
        raise ValueError(f"q_binomial needs 0 <= j <= n, got ({n}, {j})")
    return q_factorial(n) / (q_factorial(j) * q_factorial(n - j))


def _poly_to_series(poly) -> QSeries:
    terms = {}
    for (e,), c in poly.terms():
        terms[(2 * e, 0)] = mpq(int(c.numerator), int(c.denominator))
    return QSeries(terms, None)


def ratfunc_to_series(r: RatFunc, order: int = DEFAULT_ORDER) -> QSeries:
    """Laurent expansion of ``r`` around q = 0, known to u-exponent ``order``."""
    if r.is_zero():
        return QSeries({}, order)
    num = _poly_to_series(r.numerator)
    den = _poly_to_series(r.denominator)
    vd = den.valuation()
    vn = num.valuation()
    if vn - vd >= order:
        return QSeries({}, order)
    # the quotient has valuation vn - vd; ask the inverse for enough digits
    den = den.truncate(order + 2 * vd - vn)
    return (num * series_invert(den)).truncate(order)
