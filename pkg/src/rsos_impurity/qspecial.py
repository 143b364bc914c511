"""q-special functions (infinite products, q-gamma ratios, theta functions,
basic hypergeometric series) realised as exact truncated series.

Everything is built from a symbolic factorised form::

    coeff * u**U * zeta**Z * prod_i (1 - c_i u**e_i zeta**s_i) ** m_i

with rational multiplicities ``m_i``.  Identical factors cancel before any
expansion takes place, which matters whenever a factor such as
``(1 - zeta**2)`` appears in a denominator: it is not invertible in the
series ring, but usually cancels against a numerator factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Optional, Sequence, Tuple

from gmpy2 import mpq

from .series import DEFAULT_ORDER, QSeries, binomial_series


class DivergentProduct(ArithmeticError):
    """An infinite product whose factors do not tend to 1 in the u-adic sense."""


class UnbalancedPrefactor(ValueError):
    """The (1-p)**(1-x) prefactors of a q-gamma ratio do not cancel."""


class PolarArgument(ZeroDivisionError):
    """A denominator of a hypergeometric coefficient vanishes."""


class NonInvertibleFactor(ArithmeticError):
    """A zeta-dependent factor of zero u-valuation ended up in a denominator."""


@dataclass(frozen=True)
class Mono:
    """The monomial ``c * u**u * zeta**z`` (an argument of the special functions)."""
    c: object = 1
    u: int = 0
    z: int = 0

    def __mul__(self, other: "Mono") -> "Mono":
        return Mono(mpq(self.c) * mpq(other.c), self.u + other.u, self.z + other.z)

    def inverse(self) -> "Mono":
        return Mono(1 / mpq(self.c), -self.u, -self.z)

    def __pow__(self, n: int) -> "Mono":
        return Mono(mpq(self.c) ** n, self.u * n, self.z * n)

    def key(self):
        return (mpq(self.c), self.u, self.z)

    def series(self, order: Optional[int] = None) -> QSeries:
        return QSeries.monomial(self.c, self.u, self.z, order)


def qmono(qpow, zpow: int = 0, c=1) -> Mono:
    """``c * q**qpow * zeta**zpow``; ``qpow`` may be a half integer."""
    ue = Fraction(qpow) * 2
    if ue.denominator != 1:
        raise ValueError(f"q-power {qpow} is not a multiple of 1/2")
    return Mono(mpq(c), int(ue), zpow)


def p_exponent(k: int) -> int:
    """u-exponent of the nome p = q**(2(k+2))."""
    return 4 * (k + 2)


def p_power_u(x, k: int) -> int:
    """u-exponent of p**x; ``x`` must make it integral."""
    ue = Fraction(x) * p_exponent(k)
    if ue.denominator != 1:
        raise ValueError(f"p^{x} is not an integral power of u at level {k}")
    return int(ue)


# a family is an infinite product prod_{n_1..n_r >= 0} (1 - c u^(e + sum n_i b_i) zeta^s)
FamilyKey = Tuple[object, int, int, Tuple[int, ...]]


class Factored:
    """Symbolic product form of a series; immutable."""

    __slots__ = ("coeff", "uexp", "zexp", "factors", "families")

    def __init__(self, coeff=1, uexp: int = 0, zexp: int = 0,
                 factors: Optional[Dict[Tuple, object]] = None,
                 families: Optional[Dict[FamilyKey, object]] = None):
        self.coeff = mpq(coeff)
        self.uexp = uexp
        self.zexp = zexp
        self.factors = {k: mpq(v) for k, v in (factors or {}).items() if v != 0}
        self.families = {k: mpq(v) for k, v in (families or {}).items() if v != 0}

    # -- constructors -------------------------------------------------
    @classmethod
    def one(cls) -> "Factored":
        return cls()

    @classmethod
    def monomial(cls, m: Mono) -> "Factored":
        return cls(m.c, m.u, m.z)

    @classmethod
    def linear(cls, m: Mono, mult=1) -> "Factored":
        """``(1 - m) ** mult``."""
        return cls(factors={m.key(): mult})

    @classmethod
    def family(cls, a: Mono, bases: Sequence[int], mult=1) -> "Factored":
        """``prod (1 - a * u**(n.bases))`` over all multi-indices n >= 0."""
        bases = tuple(sorted(bases))
        if any(b <= 0 for b in bases):
            raise DivergentProduct(f"product bases {bases} must have positive u-valuation")
        if mpq(a.c) == 0:
            return cls()
        return cls(families={(mpq(a.c), a.u, a.z, bases): mult})

    # -- algebra ------------------------------------------------------
    def __mul__(self, other: "Factored") -> "Factored":
        if not isinstance(other, Factored):
            other = Factored(other)
        f = dict(self.factors)
        for k, v in other.factors.items():
            f[k] = f.get(k, 0) + v
        g = dict(self.families)
        for k, v in other.families.items():
            g[k] = g.get(k, 0) + v
        return Factored(self.coeff * other.coeff, self.uexp + other.uexp,
                        self.zexp + other.zexp, f, g)

    __rmul__ = __mul__

    def __pow__(self, e) -> "Factored":
        e = mpq(e)
        if e.denominator != 1 and self.coeff < 0:
            raise ValueError("fractional power of a negative prefactor")
        c = self.coeff ** int(e) if e.denominator == 1 else _rational_root_power(self.coeff, e)
        ue = self.uexp * e
        ze = self.zexp * e
        if ue.denominator != 1 or ze.denominator != 1:
            raise ValueError("fractional power leaves the integral exponent lattice")
        return Factored(c, int(ue), int(ze),
                        {k: v * e for k, v in self.factors.items()},
                        {k: v * e for k, v in self.families.items()})

    def inverse(self) -> "Factored":
        return self ** -1

    def __truediv__(self, other: "Factored") -> "Factored":
        return self * other.inverse()

    def scale(self, c) -> "Factored":
        return Factored(self.coeff * mpq(c), self.uexp, self.zexp, self.factors, self.families)

    def substitute(self, arg: Mono) -> "Factored":
        """Replace zeta by the monomial ``arg`` (used for zeta -> zeta**e, -q**-1 zeta)."""
        def sub(c, u, z):
            return (mpq(c) * mpq(arg.c) ** z, u + arg.u * z, arg.z * z)

        c0, u0, z0 = sub(self.coeff, self.uexp, self.zexp)
        factors = {}
        for (c, u, z), m in self.factors.items():
            k = sub(c, u, z)
            factors[k] = factors.get(k, 0) + m
        families = {}
        for (c, u, z, b), m in self.families.items():
            c2, u2, z2 = sub(c, u, z)
            k = (c2, u2, z2, b)
            families[k] = families.get(k, 0) + m
        return Factored(c0, u0, z0, factors, families)

    # -- expansion ----------------------------------------------------
    def _materialize(self, emax: int) -> Tuple[object, int, int, Dict[Tuple, object]]:
        """Expand families up to u-exponent ``emax`` and normalise factors so that
        every remaining factor has positive u-valuation or is zeta-only."""
        raw: Dict[Tuple, object] = dict(self.factors)
        for (c, u, z, bases), m in self.families.items():
            for e in _family_exponents(u, bases, emax):
                raw[(c, e, z)] = raw.get((c, e, z), 0) + m
        coeff, ue, ze = self.coeff, self.uexp, self.zexp
        norm: Dict[Tuple, object] = {}
        for (c, u, z), m in raw.items():
            if m == 0:
                continue
            if u < 0 or (u == 0 and z < 0):
                # 1 - c u^u z^z = (-c u^u z^z) (1 - c^-1 u^-u z^-z)
                if m.denominator != 1:
                    raise NonInvertibleFactor("fractional power of a negative-valuation factor")
                mi = int(m)
                coeff *= (-c) ** mi
                ue += u * mi
                ze += z * mi
                c, u, z = 1 / c, -u, -z
            norm[(c, u, z)] = norm.get((c, u, z), 0) + m
        return coeff, ue, ze, {k: v for k, v in norm.items() if v != 0}

    def valuation_shift(self) -> int:
        """u-exponent of the leading term (the zero series reports a large value)."""
        # finitely many family members can have non-positive exponent; materialise those
        coeff, ue, _, fac = self._materialize(0)
        return ue

    def is_zero(self) -> bool:
        _, _, _, fac = self._materialize(0)
        for (c, u, z), m in fac.items():
            if u == 0 and z == 0 and c == 1 and m > 0:
                return True
        return self.coeff == 0

    def expand(self, order: int = DEFAULT_ORDER) -> QSeries:
        """Truncated series, exact below u-exponent ``order``."""
        if self.coeff == 0:
            return QSeries({}, order)
        coeff, ue, ze, fac = self._materialize(0)
        emax = order - ue
        coeff, ue, ze, fac = self._materialize(max(emax, 0))
        rel = order - ue
        # zero-valuation factors first (exact polynomials in zeta)
        result = QSeries.constant(1, None)
        positive = []
        for (c, u, z), m in sorted(fac.items()):
            if u == 0:
                if z == 0:
                    if c == 1:
                        if m > 0:
                            return QSeries({}, order)
                        raise PolarArgument("factor (1 - 1) in a denominator")
                    val = (1 - c)
                    if m.denominator != 1:
                        if val < 0:
                            raise NonInvertibleFactor("fractional power of a negative constant")
                        coeff *= _rational_root_power(val, m)
                    else:
                        coeff *= val ** int(m)
                    continue
                if m < 0 or m.denominator != 1:
                    raise NonInvertibleFactor(
                        f"factor (1 - {c} zeta^{z}) with multiplicity {m} is not a unit")
                poly = QSeries({(0, 0): 1, (0, z): -c}, None)
                result = result * (poly ** int(m))
            else:
                positive.append(((c, u, z), m))
        if rel <= 0:
            return QSeries({}, order)
        result = result.truncate(rel)
        for (c, u, z), m in positive:
            if u >= rel:
                continue
            result = result * _linear_power(c, u, z, m, rel)
        return result.scale(coeff).shift(ue, ze).truncate(order)

    def __repr__(self):
        return (f"Factored({self.coeff} u^{self.uexp} z^{self.zexp}, "
                f"{len(self.factors)} factors, {len(self.families)} families)")


def _rational_root_power(c, e):
    e = mpq(e)
    from gmpy2 import iroot
    c = mpq(c)
    n, d = c.numerator, c.denominator
    rn, okn = iroot(n, e.denominator)
    rd, okd = iroot(d, e.denominator)
    if not (okn and okd):
        raise NonInvertibleFactor(f"{c}^{e} is not rational")
    return mpq(rn, rd) ** e.numerator


def _family_exponents(u0: int, bases: Tuple[int, ...], emax: int) -> Iterable[int]:
    """All exponents u0 + n.bases that are <= emax, with multiplicity."""
    out = [u0]
    for b in bases:
        nxt = []
        for e in out:
            while e <= emax:
                nxt.append(e)
                e += b
        out = nxt
    return out


_LINEAR_CACHE: Dict[Tuple, QSeries] = {}


def _linear_power(c, u: int, z: int, m, rel: int) -> QSeries:
    """(1 - c u^u z^z)**m to relative order ``rel`` (u > 0)."""
    key = (c, u, z, m, rel)
    hit = _LINEAR_CACHE.get(key)
    if hit is not None:
        return hit
    if m.denominator == 1 and m > 0:
        n = int(m)
        # finite binomial expansion
        terms = {}
        from math import comb
        for j in range(0, n + 1):
            if u * j >= rel:
                break
            terms[(u * j, z * j)] = mpq(comb(n, j)) * (-c) ** j
        out = QSeries(terms, rel)
    else:
        x = QSeries({(u, z): -c}, rel)
        out = binomial_series(x, m, rel)
    _LINEAR_CACHE[key] = out
    return out


# ----------------------------------------------------------------------
# products

def _as_mono(a) -> Mono:
    if isinstance(a, Mono):
        return a
    if isinstance(a, QSeries):
        if len(a.terms) == 1:
            (u, z), c = next(iter(a.terms.items()))
            return Mono(c, u, z)
        if not a.terms:
            return Mono(0, 0, 0)
    if isinstance(a, (int, Fraction)) or hasattr(a, "numerator"):
        return Mono(mpq(a), 0, 0)
    raise TypeError(f"expected a monomial argument, got {a!r}")


def _base_exp(b) -> int:
    m = _as_mono(b)
    if m.c != 1 or m.z != 0:
        raise ValueError("product bases must be pure powers of u")
    if m.u <= 0:
        raise DivergentProduct("base must have positive u-valuation")
    return m.u


def pochhammer_factors(a, b) -> Factored:
    """(a; b)_inf with monomial ``a`` and base ``b`` (a positive power of u)."""
    a = _as_mono(a)
    eb = _base_exp(b)
    if a.u < 0 and mpq(a.c) != 0:
        raise DivergentProduct(f"(a;b)_inf with a of negative valuation u^{a.u}")
    return Factored.family(a, (eb,))


def pochhammer(a, b, order: int = DEFAULT_ORDER) -> QSeries:
    """(a; b)_inf = prod_{n>=0} (1 - a b**n), truncated."""
    return pochhammer_factors(a, b).expand(order)


def finite_pochhammer_factors(a: Mono, b: int, n: int) -> Factored:
    """(a; b)_n = prod_{i<n} (1 - a b**i) with ``b`` a u-exponent."""
    out = Factored()
    for i in range(n):
        out = out * Factored.linear(Mono(a.c, a.u + b * i, a.z))
    return out


def double_pochhammer_factors(a, b, c) -> Factored:
    a = _as_mono(a)
    eb, ec = _base_exp(b), _base_exp(c)
    if a.u < 0 and mpq(a.c) != 0:
        raise DivergentProduct(f"(a;b,c)_inf with a of negative valuation u^{a.u}")
    return Factored.family(a, (eb, ec))


def double_pochhammer(a, b, c, order: int = DEFAULT_ORDER) -> QSeries:
    """(a; b, c)_inf = prod_{n1,n2>=0} (1 - a b**n1 c**n2), truncated."""
    return double_pochhammer_factors(a, b, c).expand(order)


# ----------------------------------------------------------------------
# q-gamma ratios and theta functions

@dataclass(frozen=True)
class GammaRatioSpec:
    """prod Gamma_p(numerator_args) / prod Gamma_p(denominator_args)."""
    numerator_args: Tuple[Fraction, ...]
    denominator_args: Tuple[Fraction, ...]

    @classmethod
    def of(cls, num: Iterable, den: Iterable) -> "GammaRatioSpec":
        return cls(tuple(Fraction(x) for x in num), tuple(Fraction(x) for x in den))

    def prefactor_imbalance(self) -> Fraction:
        return (sum((1 - x for x in self.numerator_args), Fraction(0))
                - sum((1 - x for x in self.denominator_args), Fraction(0)))


def gamma_p_ratio_factors(spec: GammaRatioSpec, k: int) -> Factored:
    if spec.prefactor_imbalance() != 0:
        raise UnbalancedPrefactor(
            f"(1-p) exponents differ by {spec.prefactor_imbalance()} in {spec}")
    ep = p_exponent(k)
    out = Factored()
    pp = Factored.family(Mono(1, ep, 0), (ep,))
    for x in spec.numerator_args:
        out = out * pp / Factored.family(Mono(1, p_power_u(x, k), 0), (ep,))
    for x in spec.denominator_args:
        out = out / pp * Factored.family(Mono(1, p_power_u(x, k), 0), (ep,))
    return out


def gamma_p_ratio(spec: GammaRatioSpec, k: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Balanced ratio of q-gamma functions Gamma_p with p = q**(2(k+2))."""
    return gamma_p_ratio_factors(spec, k).expand(order)


def theta_p_factors(z, k: int) -> Factored:
    z = _as_mono(z)
    ep = p_exponent(k)
    return (Factored.family(Mono(1, ep, 0), (ep,))
            * Factored.family(z, (ep,))
            * Factored.family(Mono(1, ep, 0) * z.inverse(), (ep,)))


def theta_p(z, k: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Theta_p(z) = (p;p)(z;p)(p/z;p) for a monomial argument ``z``."""
    z = _as_mono(z)
    ep = p_exponent(k)
    if z.u < 0 or z.u > ep:
        # one of the two families starts at negative valuation; still a finite
        # number of such factors, handled by normalisation
        pass
    return theta_p_factors(z, k).expand(order)


def _qpow4(k: int) -> int:
    return 8  # u-exponent of q**4


def eta_fn_factors(z, n: int, k: int) -> Factored:
    """eta(z) built from the double products with bases (p, q**4)."""
    z = _as_mono(z)
    ep = p_exponent(k)
    pz = Mono(1, ep, 0) * z

    def fam(qpow):
        return Factored.family(pz * qmono(qpow), (ep, 8))

    return fam(1 + n) * fam(3 - n) / (fam(1 - n) * fam(3 + n))


def eta_fn(z, n: int, k: int, order: int = DEFAULT_ORDER) -> QSeries:
    return eta_fn_factors(z, n, k).expand(order)


def gamma_z_factors(z, n: int, k: int) -> Factored:
    """The prefactor function gamma(z) of the hypergeometric matrix elements."""
    z = _as_mono(z)
    ep = p_exponent(k)
    pz = Mono(1, ep, 0) * z

    def fam(qpow):
        return Factored.family(pz * qmono(qpow), (ep, 8))

    return fam(1 - n) * fam(3 + n) / (fam(5 + n) * fam(-1 - n))


def gamma_z(z, n: int, k: int, order: int = DEFAULT_ORDER) -> QSeries:
    return gamma_z_factors(z, n, k).expand(order)


def kappa_factors(M: int, N: int, zarg: Mono = Mono(1, 0, 1)) -> Factored:
    """kappa^{(M,N)} as a function of the spectral argument ``zarg`` (default zeta).

    The infinite products use base q**4.
    """
    z2 = zarg ** 2
    zm2 = z2.inverse()
    s = qmono(2 + M + N)
    d = qmono(2 + abs(M - N))
    num = Factored.family(s * z2, (8,)) * Factored.family(d * zm2, (8,))
    den = Factored.family(s * zm2, (8,)) * Factored.family(d * z2, (8,))
    return Factored.monomial(zarg ** min(M, N)) * num / den


def kappa_norm(M: int, N: int, zpow: int = 1, order: int = DEFAULT_ORDER) -> QSeries:
    """kappa^{(M,N)}(zeta**zpow)."""
    if M < 1 or N < 1:
        raise ValueError("kappa needs M, N >= 1")
    return kappa_factors(M, N, Mono(1, 0, zpow)).expand(order)


# ----------------------------------------------------------------------
# basic hypergeometric series

def _phi_coefficient(alpha, beta, gamma, m: int, k: int) -> Factored:
    ep = p_exponent(k)
    a = Mono(1, p_power_u(alpha, k), 0)
    b = Mono(1, p_power_u(beta, k), 0)
    g = Mono(1, p_power_u(gamma, k), 0)
    p = Mono(1, ep, 0)
    num = finite_pochhammer_factors(a, ep, m) * finite_pochhammer_factors(b, ep, m)
    den = finite_pochhammer_factors(g, ep, m) * finite_pochhammer_factors(p, ep, m)
    for (c, u, z), mult in den.factors.items():
        if u == 0 and z == 0 and c == 1:
            raise PolarArgument(f"(p^{gamma};p)_{m} vanishes")
    return num / den


def phi21(alpha, beta, gamma, z, k: int, n_terms: Optional[int] = None,
          order: int = DEFAULT_ORDER) -> QSeries:
    """sum_m (p^a;p)_m (p^b;p)_m / ((p^c;p)_m (p;p)_m) z^m, summed term by term.

    ``z`` is a monomial; when it has positive u-valuation the sum is cut where
    the terms fall below the truncation order.
    """
    zm = _as_mono(z)
    if n_terms is None:
        if zm.u <= 0:
            raise ValueError("n_terms is required when z has no positive valuation")
        n_terms = order // zm.u + 2
    total = QSeries({}, order)
    for m in range(n_terms):
        coeff = _phi_coefficient(alpha, beta, gamma, m, k)
        if coeff.is_zero():
            break  # (p^alpha;p)_m = 0 terminates the series
        term = (coeff * Factored.monomial(zm ** m)).expand(order)
        total = total + term
    return total


def phi21_at(alpha, beta, gamma, z: Mono, k: int, order: int = DEFAULT_ORDER) -> QSeries:
    return phi21(alpha, beta, gamma, z, k, None, order)


def sqrt_factored(f: Factored) -> Factored:
    return f ** mpq(1, 2)


def q_integer_factors(n: int) -> Factored:
    """[n] = q**(1-n) (1 - q**(2n)) / (1 - q**2), n >= 1."""
    if n <= 0:
        raise ValueError("q_integer_factors needs n >= 1")
    return (Factored(1, 2 * (1 - n), 0)
            * Factored.linear(qmono(2 * n)) / Factored.linear(qmono(2)))


def q_binomial_factors(n: int, j: int) -> Factored:
    out = Factored()
    for i in range(1, n + 1):
        out = out * q_integer_factors(i)
    for i in range(1, j + 1):
        out = out / q_integer_factors(i)
    for i in range(1, n - j + 1):
        out = out / q_integer_factors(i)
    return out
