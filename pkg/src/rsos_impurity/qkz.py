"""Hypergeometric matrix elements of products of two intertwiners.

The matrix element <nu| Phi(z2) Phi(z1) |lambda> of two homogeneous
intertwiners (one of spin 1/2, one of spin n/2) solves a q-difference
(q-KZ) equation; the solution is a prefactor gamma(z) times a pair of
basic hypergeometric series 2phi1 with base p.  This module evaluates the
two components for each of the four weight cases and checks the
contiguity relations that tie the components together.

Exponents of p are given as rationals (multiples of s = 1/(2(k+2)) plus
integers), so that every p-power is an integral power of u = q^{1/2}.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .qspecial import (Factored, Mono, PolarArgument, gamma_z_factors,
                       p_exponent, p_power_u, phi21, qmono)
from .series import DEFAULT_ORDER, QSeries
from .weights import NoValidJ, admissible_idx

CASES = ("mu+", "mu-", "nu+", "nu-")

# which spin-1/2 basis vector appears in the first term of each case
_FIRST_SPIN_HALF_INDEX = {"mu+": 1, "mu-": 0, "nu+": 1, "nu-": 0}

ZETA_SQUARED = Mono(1, 0, 2)   # z = zeta^2


def _s(k: int) -> Fraction:
    return Fraction(1, 2 * (k + 2))


def determine_j(n: int, case: str, a: int, nu: int) -> int:
    """j fixed by weight(Psi) = lambda - nu, read off from the first term.

    The spin-n/2 vector v_j carries weight (n - 2j) and the spin-1/2 vector
    v_i carries (1 - 2i), in units of rho-bar = Lambda_1 - Lambda_0.
    """
    if case not in CASES:
        raise ValueError(f"unknown case {case!r}")
    i = _FIRST_SPIN_HALF_INDEX[case]
    twice_j = n + 1 - 2 * i - (a - nu)
    if twice_j % 2 or not 0 <= twice_j // 2 <= n:
        raise NoValidJ(f"no j for n={n}, case {case}, a={a}, nu={nu}")
    return twice_j // 2


@dataclass(frozen=True)
class MatrixElementSpec:
    """One of the four hypergeometric matrix elements.

    ``case`` is "mu+"/"mu-" for Psi^{(n,1)} (the spin-1/2 intertwiner acts
    first and mu = lambda +/- rho-bar) and "nu+"/"nu-" for Psi^{(1,n)}
    (nu = mu +/- rho-bar).  lambda = lambda^{(k)}_a.
    """
    n: int
    case: str
    a: int
    j: int
    k: int = 3

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"unknown case {self.case!r}")
        if not 0 <= self.j <= self.n:
            raise NoValidJ(f"j = {self.j} outside 0..{self.n}")

    @property
    def labels(self) -> Tuple[int, int]:
        return (self.n, 1) if self.case.startswith("mu") else (1, self.n)

    def phi_parameters(self) -> Tuple[Fraction, Fraction, Fraction]:
        """(alpha, beta, gamma) of the first 2phi1; the second term uses
        (1 + alpha, beta, 1 + gamma)."""
        n, a, j, s = self.n, self.a, self.j, _s(self.k)
        if self.case == "mu+":
            return -2 * s * (1 + j), 2 * s * (a + 1 - n + j), 2 * s * (a + 1)
        if self.case == "mu-":
            return 2 * s * (-n + j - 1), 1 - 2 * s * (a + j + 1), 1 - 2 * s * (a + 1)
        if self.case == "nu+":
            return -2 * s * (1 + j), 1 - 2 * s * (a + j + 2), 1 - 2 * s * (a - n + 2 * j + 2)
        return 2 * s * (-n + j - 1), 2 * s * (a - n + j), 2 * s * (a - n + 2 * j)

    def second_prefactor(self, z: Mono) -> Factored:
        """Coefficient of the second 2phi1 (zero at the ends of the spin chain)."""
        n, a, j, k = self.n, self.a, self.j, self.k
        ep = p_exponent(k)
        lin = Factored.linear
        if self.case == "mu+":
            return (Factored.monomial(qmono(2 * (a + 1) + n - j))
                    * lin(qmono(2 * (j - n))) / lin(qmono(2 * (a + 1))))
        if self.case == "mu-":
            return (Factored.monomial(z * Mono(1, ep, 0) * qmono(-2 * (a + 1) + j))
                    * lin(qmono(-2 * j)) / lin(Mono(1, ep, 0) * qmono(-2 * (a + 1))))
        if self.case == "nu+":
            return (Factored.monomial(z * qmono(j - n))
                    * lin(qmono(2 * (n - j))) / lin(Mono(1, -ep, 0) * qmono(2 * (a + 2 - n + 2 * j))))
        return (Factored.monomial(qmono(-j))
                * lin(qmono(2 * j)) / lin(qmono(-2 * (a - n + 2 * j))))

    def basis_labels(self) -> Tuple[str, str]:
        j = self.j
        if self.case == "mu+":
            return f"v{j}(x)w1", f"v{j + 1}(x)w0"
        if self.case == "mu-":
            return f"v{j}(x)w0", f"v{j - 1}(x)w1"
        if self.case == "nu+":
            return f"w1(x)v{j}", f"w0(x)v{j + 1}"
        return f"w0(x)v{j}", f"w1(x)v{j - 1}"

    def phi_argument(self, z: Mono) -> Mono:
        """z p q^{1+n}."""
        return z * Mono(1, p_exponent(self.k), 0) * qmono(1 + self.n)


def matrix_specs(n: int, k: int = 3) -> List[Tuple[MatrixElementSpec, int, int]]:
    """All (spec, mu, nu) with admissible intermediate and final weights."""
    out = []
    for a in range(k + 1):
        for case in CASES:
            if case.startswith("mu"):
                mu = a + 1 if case == "mu+" else a - 1
                if not 0 <= mu <= k:
                    continue
                nus = [nu for nu in range(k + 1) if admissible_idx(mu, nu, n, k)]
            else:
                nus = []
                for mu in range(k + 1):
                    if not admissible_idx(a, mu, n, k):
                        continue
                    nu = mu + 1 if case == "nu+" else mu - 1
                    if 0 <= nu <= k:
                        nus.append(nu)
            for nu in nus:
                try:
                    j = determine_j(n, case, a, nu)
                except NoValidJ:
                    continue
                if case.startswith("nu"):
                    mu = nu - 1 if case == "nu+" else nu + 1
                out.append((MatrixElementSpec(n, case, a, j, k), mu, nu))
    return out


def _is_zero_mono(z: Mono) -> bool:
    return z.c == 0


def _phi(alpha, beta, gamma, w: Mono, k: int, order: int) -> QSeries:
    """2phi1 at a monomial argument, with enough terms for the given order
    even when the p-Pochhammer coefficients have negative valuation."""
    if _is_zero_mono(w):
        return QSeries.constant(1).truncate(order)
    if w.u <= 0:
        raise ValueError("the 2phi1 argument must have positive valuation")
    slack = sum(max(0, -p_power_u(x, k)) for x in (alpha, beta, gamma))
    n_terms = (order + slack) // w.u + 2
    return phi21(alpha, beta, gamma, w, k, n_terms, order)


def psi_element(spec: MatrixElementSpec, z: Mono = ZETA_SQUARED,
                order: int = DEFAULT_ORDER) -> Tuple[QSeries, QSeries]:
    """The two components of Psi(z) on the basis given by ``spec.basis_labels()``.

    ``z`` is a monomial in (u, zeta); the default is z = zeta^2.  Pass
    ``Mono(0)`` for z = 0.
    """
    k = spec.k
    alpha, beta, gamma = spec.phi_parameters()
    w = spec.phi_argument(z)
    pref = Factored() if _is_zero_mono(z) else gamma_z_factors(z, spec.n, k)
    first = (pref.expand(order) * _phi(alpha, beta, gamma, w, k, order)).truncate(order)
    coeff = spec.second_prefactor(z)
    if coeff.is_zero():
        return first, QSeries({}, order)
    second = (pref * coeff).expand(order) * _phi(1 + alpha, beta, 1 + gamma, w, k, order)
    return first, second.truncate(order)


# ----------------------------------------------------------------------
# contiguity relations

def _lin(x, k: int) -> Factored:
    """1 - p^x."""
    return Factored.linear(Mono(1, p_power_u(x, k), 0))


def contiguity_sides(identity: int, alpha, beta, gamma, z: Mono, k: int = 3,
                     order: int = DEFAULT_ORDER, printed: bool = False) -> Tuple[QSeries, QSeries]:
    """Both sides of a contiguity relation of 2phi1 at argument ``z``.

    identity 1:
      (1 - z p^a) phi(pz) - (1 - z) phi(z)
          = z (p^b - p^c) (1 - p^a)/(1 - p^c) phi(1+a, b, 1+c; pz)
    identity 2:
      (1 - z p^{a+b-c}) phi(pz) - (1 - z p^{b-c}) phi(z)
          = -z (1 - p^{b-c}) (1 - p^a)/(1 - p^c) phi(1+a, b, 1+c; z)

    ``printed=True`` uses p^{a+b+c} in the first factor of identity 2 (the
    form with the sign misprint), which does not hold.
    """
    ep = p_exponent(k)
    p = Mono(1, ep, 0)
    pz = p * z
    ratio = _lin(alpha, k) / _lin(gamma, k)
    if ratio.is_zero():
        # (1 - p^alpha) = 0: phi terminates at degree 0 and both sides reduce
        ratio_series = QSeries({}, order)
    else:
        ratio_series = ratio.expand(order)
    phi_z = _phi(alpha, beta, gamma, z, k, order)
    phi_pz = _phi(alpha, beta, gamma, pz, k, order)
    zs = QSeries.monomial(z.c, z.u, z.z)
    if identity == 1:
        lhs = (1 - zs * QSeries.monomial(1, p_power_u(alpha, k), 0)) * phi_pz - (1 - zs) * phi_z
        shifted = _phi(1 + alpha, beta, 1 + gamma, pz, k, order)
        pb = QSeries.monomial(1, p_power_u(beta, k), 0)
        pc = QSeries.monomial(1, p_power_u(gamma, k), 0)
        rhs = zs * (pb - pc) * ratio_series * shifted
    elif identity == 2:
        first_exp = alpha + beta + gamma if printed else alpha + beta - gamma
        lhs = ((1 - zs * QSeries.monomial(1, p_power_u(first_exp, k), 0)) * phi_pz
               - (1 - zs * QSeries.monomial(1, p_power_u(beta - gamma, k), 0)) * phi_z)
        plain = _phi(1 + alpha, beta, 1 + gamma, z, k, order)
        rhs = -zs * _lin(beta - gamma, k).expand(order) * ratio_series * plain
    else:
        raise ValueError("identity must be 1 or 2")
    return lhs.truncate(order), rhs.truncate(order)


def contiguity_check(identity: int, alpha, beta, gamma, z: Mono, k: int = 3,
                     order: int = DEFAULT_ORDER, printed: bool = False) -> bool:
    lhs, rhs = contiguity_sides(identity, alpha, beta, gamma, z, k, order, printed)
    return lhs.agrees_with(rhs)


def spec_argument_tuples(spec: MatrixElementSpec) -> List[Tuple[Fraction, Fraction, Fraction]]:
    """The (alpha, beta, gamma) tuples of both 2phi1 factors in ``spec``."""
    a, b, c = spec.phi_parameters()
    return [(a, b, c), (1 + a, b, 1 + c)]


def contiguity_suite(ns=(1, 2), k: int = 3, order: int = 17,
                     printed: bool = False) -> Dict[Tuple, bool]:
    """Both identities on every argument tuple of every valid matrix element,
    at the argument z p q^{1+n} (z = zeta^2) used in the matrix elements."""
    results = {}
    for n in ns:
        for spec, _mu, _nu in matrix_specs(n, k):
            w = spec.phi_argument(ZETA_SQUARED)
            for tup in spec_argument_tuples(spec):
                for identity in (1, 2):
                    key = (n, spec.case, spec.a, spec.j, tup, identity)
                    if key in results:
                        continue
                    try:
                        results[key] = contiguity_check(identity, *tup, w, k, order, printed)
                    except PolarArgument:
                        # the 2phi1 itself is undefined here; record as not checked
                        results[key] = None
    return results


# ----------------------------------------------------------------------
# shift structure of the components

def _components_stripped(spec: MatrixElementSpec, z: Mono, order: int):
    """(F1, F2): the two components divided by gamma(z) and by the second
    term's prefactor, i.e. the bare 2phi1 series recovered from psi_element."""
    first, second = psi_element(spec, z, order)
    g = gamma_z_factors(z, spec.n, spec.k)
    f1 = first * g.inverse().expand(order)
    coeff = spec.second_prefactor(z)
    if coeff.is_zero():
        return f1.truncate(order), None
    f2 = second * (g * coeff).inverse().expand(order)
    return f1.truncate(order), f2.truncate(order)


def qkz_shift_check(spec: MatrixElementSpec, order: int = DEFAULT_ORDER) -> bool:
    """Check the z -> pz structure tying the two components together.

    With w = z p q^{1+n}, F1(z) = phi(a, b, c; w) and F2(z) = phi(1+a, b, 1+c; w)
    are recovered from psi_element at z and pz; the two contiguity relations
    are then checked on them, together with the quasi-periodicity of gamma(z):
    gamma(pz)/gamma(z) = prod over x in {5+n, -1-n} of (pzq^x; q^4) divided by
    the same product over x in {1-n, 3+n}.
    """
    k, n = spec.k, spec.n
    ep = p_exponent(k)
    p = Mono(1, ep, 0)
    z = ZETA_SQUARED
    alpha, beta, gamma = spec.phi_parameters()
    f1_z, f2_z = _components_stripped(spec, z, order)
    f1_pz, f2_pz = _components_stripped(spec, p * z, order)
    w = spec.phi_argument(z)
    ws = QSeries.monomial(w.c, w.u, w.z)

    def pw(x):
        return QSeries.monomial(1, p_power_u(x, k), 0)

    # gamma quasi-periodicity, using single-base products
    def single(x):
        return Factored.family(p * z * qmono(x), (8,))

    ratio = (gamma_z_factors(p * z, n, k) / gamma_z_factors(z, n, k)).expand(order)
    expected = (single(5 + n) * single(-1 - n) / (single(1 - n) * single(3 + n))).expand(order)
    if not ratio.agrees_with(expected):
        return False
    lhs1 = (1 - ws * pw(alpha)) * f1_pz - (1 - ws) * f1_z
    lhs2 = (1 - ws * pw(alpha + beta - gamma)) * f1_pz - (1 - ws * pw(beta - gamma)) * f1_z
    if f2_z is None:
        # second component absent: the relations then force a terminating
        # first series, checked through the (1 - p^alpha) factor
        rhs_zero = (_lin(alpha, k) / _lin(gamma, k))
        if rhs_zero.is_zero():
            return lhs1.agrees_with(0) and lhs2.agrees_with(0)
        rhs1 = ws * (pw(beta) - pw(gamma)) * rhs_zero.expand(order) * _phi(1 + alpha, beta, 1 + gamma,
                                                                           p * w, k, order)
        rhs2 = -ws * _lin(beta - gamma, k).expand(order) * rhs_zero.expand(order) * _phi(
            1 + alpha, beta, 1 + gamma, w, k, order)
        return lhs1.agrees_with(rhs1) and lhs2.agrees_with(rhs2)
    c = (_lin(alpha, k) / _lin(gamma, k)).expand(order)
    rhs1 = ws * (pw(beta) - pw(gamma)) * c * f2_pz
    rhs2 = -ws * _lin(beta - gamma, k).expand(order) * c * f2_z
    return lhs1.agrees_with(rhs1) and lhs2.agrees_with(rhs2)
