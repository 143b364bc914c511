"""RSOS Boltzmann weights built from the connection coefficients of
type-I intertwiners, and the face-model property checks (Yang-Baxter,
inversion, crossing).

Weights are labelled by the index ``a`` of ``lambda_a = a L1 + (k-a) L0``.
A face is written ``(NW, NE, SW, SE) = (lam, mu, mu', nu)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import mpmath
from gmpy2 import mpq

from .qspecial import (Factored, GammaRatioSpec, Mono, UnbalancedPrefactor,
                       eta_fn_factors, kappa_factors, p_exponent, p_power_u,
                       q_integer_factors, qmono, theta_p_factors)
from .series import DEFAULT_ORDER, QSeries


class LevelMismatch(ValueError):
    pass


class InadmissibleConfig(ValueError):
    pass


class NoValidJ(ValueError):
    pass


class UnsupportedFusion(NotImplementedError):
    pass


class InvalidPair(ValueError):
    pass


class RegimeViolation(ValueError):
    pass


@dataclass(frozen=True, order=True)
class WeightIndex:
    """lambda^{(k)}_a = a L1 + (k - a) L0."""
    k: int
    a: int

    def __post_init__(self):
        if not 0 <= self.a <= self.k:
            raise ValueError(f"weight index {self.a} outside 0..{self.k}")

    def sigma(self) -> "WeightIndex":
        return WeightIndex(self.k, self.k - self.a)

    def __add__(self, other: "WeightIndex") -> "WeightIndex":
        return WeightIndex(self.k + other.k, self.a + other.a)

    @property
    def dynkin(self) -> Tuple[int, int]:
        """(<h0, lambda>, <h1, lambda>)."""
        return (self.k - self.a, self.a)


def admissible(pair, N: int) -> bool:
    """N-admissibility of a pair of level-k weights."""
    lam, mu = pair
    if isinstance(lam, WeightIndex):
        if lam.k != mu.k:
            raise LevelMismatch(f"levels {lam.k} and {mu.k} differ")
        k, a, b = lam.k, lam.a, mu.a
    else:
        raise TypeError("admissible expects a pair of WeightIndex")
    if not 0 <= N <= k:
        return False
    d = a - b
    if abs(d) > N or (N - d) % 2:
        return False
    return 2 * k - N >= a + b >= N


def admissible_idx(a: int, b: int, N: int, k: int) -> bool:
    d = a - b
    if not (0 <= a <= k and 0 <= b <= k and 0 <= N <= k):
        return False
    return abs(d) <= N and (N - d) % 2 == 0 and N <= a + b <= 2 * k - N


@dataclass(frozen=True)
class FaceConfig:
    lam: int
    mu: int
    mup: int
    nu: int
    m: int
    n: int
    k: int = 3

    def corners(self):
        return (self.lam, self.mu, self.mup, self.nu)

    def is_admissible(self) -> bool:
        k, m, n = self.k, self.m, self.n
        return (admissible_idx(self.lam, self.mu, m, k) and admissible_idx(self.mup, self.nu, m, k)
                and admissible_idx(self.lam, self.mup, n, k) and admissible_idx(self.mu, self.nu, n, k))


def _as_arg(zeta) -> Mono:
    if isinstance(zeta, Mono):
        return zeta
    return Mono(1, 0, int(zeta))


# ----------------------------------------------------------------------
# connection coefficients C^{(n,1)}

def _gamma_ratio(num, den, k: int, allow_unbalanced: bool = False) -> Factored:
    spec = GammaRatioSpec.of(num, den)
    imbalance = spec.prefactor_imbalance()
    if imbalance and not allow_unbalanced:
        raise UnbalancedPrefactor(f"unbalanced Gamma_p ratio {spec}")
    ep = p_exponent(k)
    pp = Factored.family(Mono(1, ep, 0), (ep,))
    out = Factored()
    for x in spec.numerator_args:
        out = out * pp / Factored.family(Mono(1, p_power_u(x, k), 0), (ep,))
    for x in spec.denominator_args:
        out = out / pp * Factored.family(Mono(1, p_power_u(x, k), 0), (ep,))
    if imbalance:
        out = out * Factored.linear(Mono(1, ep, 0), imbalance)
    return out


def eta_ratio_factors(n: int, k: int, arg: Mono) -> Factored:
    """eta(zeta^2)/eta(zeta^-2) evaluated at the spectral argument ``arg``."""
    z2 = arg ** 2
    return eta_fn_factors(z2, n, k) / eta_fn_factors(z2.inverse(), n, k)


def _theta(qpow, k: int, arg: Mono, p_power: int = 0) -> Factored:
    """Theta_p(p^p_power q^qpow zeta^2) at the spectral argument."""
    m = Mono(1, p_power * p_exponent(k), 0) * qmono(qpow) * (arg ** 2)
    return theta_p_factors(m, k)


def conn_bar_factors(lam: int, mu: int, mup: int, nu: int, n: int, k: int,
                     arg: Mono = Mono(1, 0, 1)) -> Factored:
    """bar C^{(n,1)}_k(lam, mu, mu', nu) (eta ratio included, kappa excluded)."""
    cfg = FaceConfig(lam, mu, mup, nu, n, 1, k)
    if not cfg.is_admissible():
        raise InadmissibleConfig(f"C^({n},1) config {cfg.corners()} is not admissible at level {k}")
    s = Fraction(1, 2 * (k + 2))
    a = lam
    up = mu == nu + 1
    jnum = (nu + 1 + n - a) if up else (nu - 1 + n - a)
    if jnum % 2:
        raise InadmissibleConfig("no integral j")
    j = jnum // 2
    if not 0 <= j <= n:
        raise InadmissibleConfig(f"j = {j} outside 0..{n}")
    eta = eta_ratio_factors(n, k, arg)
    den_theta = _theta(1 + n, k, arg)
    if up and mup == lam + 1:
        if j == 0:
            raise NoValidJ("[j]^(-1/2) with j = 0")
        pref = Factored.monomial(arg * qmono(Fraction(n - 2 * j + 1, 2)))
        pref = pref * (q_integer_factors(n - j + 1) / q_integer_factors(j)) ** mpq(1, 2)
        g = _gamma_ratio([2 * s * (a + 2 * j - n), 1 - 2 * s * (a + 1)],
                         [1 + 2 * s * (j - 1 - n), 2 * s * j], k)
        th = _theta(-2 * (a + j) + n - 1, k, arg, p_power=1)
    elif up and mup == lam - 1:
        pref = Factored.monomial(qmono(j))
        g = _gamma_ratio([2 * s * (a + 2 * j - n), 2 * s * (a + 1)],
                         [2 * s * (a + j - n), 2 * s * (a + j + 1)], k)
        th = _theta(-2 * j + n + 1, k, arg)
    elif not up and mup == lam + 1:
        pref = Factored.monomial(qmono(n - j))
        g = _gamma_ratio([1 - 2 * s * (a + 2 * j - n + 2), 1 - 2 * s * (a + 1)],
                         [1 - 2 * s * (a + j + 2), 1 - 2 * s * (a + j + 1 - n)], k)
        th = _theta(2 * j + 1 - n, k, arg)
    elif not up and mup == lam - 1:
        if n - j == 0:
            raise NoValidJ("[n-j]^(-1/2) with j = n")
        pref = Factored.monomial(arg * qmono(Fraction(2 * j - n + 1, 2)))
        pref = pref * (q_integer_factors(j + 1) / q_integer_factors(n - j)) ** mpq(1, 2)
        g = _gamma_ratio([1 - 2 * s * (a + 2 * j - n + 2), 2 * s * (a + 1)],
                         [1 - 2 * s * (1 + j), 2 * s * (n - j)], k)
        th = _theta(2 * a + 2 * j + 3 - n, k, arg)
    else:
        raise InadmissibleConfig(f"config {cfg.corners()} is not of nearest-neighbour type")
    return pref * eta * g * th / den_theta


def conn_factors(lam, mu, mup, nu, n, k, arg=Mono(1, 0, 1)) -> Factored:
    """C^{(n,1)}_k including the 1/kappa^{(n,1)} normalisation."""
    return conn_bar_factors(lam, mu, mup, nu, n, k, arg) / kappa_factors(n, 1, arg)


def face_weight_factors(cfg: FaceConfig, arg=Mono(1, 0, 1)) -> Factored:
    arg = _as_arg(arg)
    if not cfg.is_admissible():
        raise InadmissibleConfig(f"face {cfg.corners()} with labels ({cfg.m},{cfg.n}) is not admissible")
    if cfg.n == 1:
        return conn_factors(cfg.lam, cfg.mu, cfg.mup, cfg.nu, cfg.m, cfg.k, arg)
    if cfg.m == 1:
        return conn_factors(cfg.nu, cfg.mu, cfg.mup, cfg.lam, cfg.n, cfg.k, arg)
    raise UnsupportedFusion(f"weights with labels ({cfg.m},{cfg.n}) are not available")


_WEIGHT_CACHE: Dict[Tuple, QSeries] = {}


def face_weight(cfg: FaceConfig, order: int = DEFAULT_ORDER, zeta=1) -> QSeries:
    """W^{(m,n)}_k(lam, mu, mu', nu | zeta) as a truncated series.

    ``zeta`` is either an integer e (meaning zeta**e) or a :class:`Mono`.
    """
    arg = _as_arg(zeta)
    key = (cfg, order, arg.key())
    hit = _WEIGHT_CACHE.get(key)
    if hit is None:
        hit = face_weight_factors(cfg, arg).expand(order)
        _WEIGHT_CACHE[key] = hit
    return hit


def weight_or_zero(lam, mu, mup, nu, m, n, k, order, zeta=1) -> QSeries:
    cfg = FaceConfig(lam, mu, mup, nu, m, n, k)
    if not cfg.is_admissible():
        return QSeries({}, order)
    return face_weight(cfg, order, zeta)


def conn_n1(cfg: FaceConfig, order: int = DEFAULT_ORDER, zeta=1) -> QSeries:
    """C^{(n,1)}(lam, mu, mu', nu) for ``cfg`` with labels (m, n) = (n, 1)."""
    return conn_factors(cfg.lam, cfg.mu, cfg.mup, cfg.nu, cfg.m, cfg.k, _as_arg(zeta)).expand(order)


def conn_1n(cfg: FaceConfig, order: int = DEFAULT_ORDER, zeta=1) -> QSeries:
    """C^{(1,n)}(lam, mu, mu', nu) = C^{(n,1)}(nu, mu, mu', lam)."""
    return conn_factors(cfg.nu, cfg.mu, cfg.mup, cfg.lam, cfg.n, cfg.k, _as_arg(zeta)).expand(order)


# ----------------------------------------------------------------------
# the (1,1) weights written out explicitly

def w11_bar_factors(lam: int, mu: int, mup: int, nu: int, k: int,
                    arg: Mono = Mono(1, 0, 1)) -> Factored:
    """bar W^{(1,1)}: the A, B, C weights with kappa and the eta ratio removed."""
    cfg = FaceConfig(lam, mu, mup, nu, 1, 1, k)
    if not cfg.is_admissible():
        raise InadmissibleConfig(f"(1,1) face {cfg.corners()} is not admissible")
    a = lam
    s = Fraction(1, 2 * (k + 2))
    r_minus = 2 * (a + 1) * s
    r_plus = 1 - r_minus
    if mu == mup and nu == 2 * mu - a:
        return Factored()
    if nu == a and mu != mup:
        sign = mu - a  # +1 for B^{a+}
        r = r_minus if sign > 0 else r_plus
        g = _gamma_ratio([r, r], [2 * s + r, -2 * s + r], k)
        return (Factored.monomial(qmono(1)) * g * theta_p_factors(arg ** 2, k)
                / theta_p_factors(qmono(2) * arg ** 2, k))
    if nu == a and mu == mup:
        sign = mu - a
        r = r_plus if sign > 0 else r_minus
        pr = Mono(1, p_power_u(r, k), 0)
        return (Factored.monomial(arg) * theta_p_factors(qmono(2), k)
                * theta_p_factors(pr * arg ** 2, k)
                / (theta_p_factors(qmono(2) * arg ** 2, k) * theta_p_factors(pr, k)))
    raise InadmissibleConfig(f"unexpected (1,1) face {cfg.corners()}")


def w11_bar(cfg: FaceConfig, order: int = DEFAULT_ORDER, zeta=1) -> QSeries:
    return w11_bar_factors(cfg.lam, cfg.mu, cfg.mup, cfg.nu, cfg.k, _as_arg(zeta)).expand(order)


def w11_kind(lam, mu, mup, nu) -> str:
    if mu == mup and nu == 2 * mu - lam:
        return "A"
    if nu == lam and mu != mup:
        return "B+" if mu > lam else "B-"
    return "C+" if mu > lam else "C-"


def w11_normalisation_factors(k: int, arg: Mono = Mono(1, 0, 1)) -> Factored:
    """W^{(1,1)} = this factor times bar W^{(1,1)}."""
    return eta_ratio_factors(1, k, arg) / kappa_factors(1, 1, arg)


# ----------------------------------------------------------------------
# crossing factors

def crossing_G_factors(a: int, b: int, k: int) -> Factored:
    s = Fraction(1, 2 * (k + 2))
    if not (0 <= a <= k and 0 <= b <= k) or abs(a - b) != 1:
        raise InvalidPair(f"G needs neighbouring weights, got ({a}, {b})")
    if b == a + 1:
        return _gamma_ratio([1 - 2 * s * (a + 1)], [1 - 2 * s * (a + 2)], k, allow_unbalanced=True)
    return _gamma_ratio([2 * s * (a + 1)], [2 * s * a], k, allow_unbalanced=True)


def crossing_G(pair, order: int = DEFAULT_ORDER) -> QSeries:
    lam, mu = pair
    return crossing_G_factors(lam.a, mu.a, lam.k).expand(order)


# ----------------------------------------------------------------------
# property checks

CROSS_ARG = Mono(-1, -2, 1)   # -q^{-1} zeta


def labels_supported(m: int, n: int) -> bool:
    return m == 1 or n == 1


def _check_labels(*pairs):
    for m, n in pairs:
        if not labels_supported(m, n):
            raise UnsupportedFusion(f"labels ({m},{n}) not supported")


def ybe_sides(m: int, n: int, l: int, boundary: Sequence[int], exps: Sequence[int],
              k: int = 3, order: int = 13) -> Tuple[QSeries, QSeries]:
    """Both sides of the face Yang-Baxter equation for boundary
    (alpha, beta, gamma, delta, lambda, mu) and zeta_i = zeta**exps[i]."""
    _check_labels((m, n), (n, l), (m, l))
    al, be, ga, de, la, mu = boundary
    e1, e2, e3 = exps
    lhs = QSeries({}, order)
    rhs = QSeries({}, order)
    for nu in range(k + 1):
        t1 = weight_or_zero(al, nu, mu, la, n, l, k, order, e2 - e3)
        if not t1.is_zero():
            t2 = weight_or_zero(al, be, nu, ga, m, n, k, order, e1 - e2)
            if not t2.is_zero():
                t3 = weight_or_zero(nu, ga, la, de, m, l, k, order, e1 - e3)
                lhs = lhs + t1 * t2 * t3
        s1 = weight_or_zero(al, be, mu, nu, m, l, k, order, e1 - e3)
        if not s1.is_zero():
            s2 = weight_or_zero(mu, nu, la, de, m, n, k, order, e1 - e2)
            if not s2.is_zero():
                s3 = weight_or_zero(be, ga, nu, de, n, l, k, order, e2 - e3)
                rhs = rhs + s1 * s2 * s3
    return lhs.truncate(order), rhs.truncate(order)


def check_ybe(m: int, n: int, l: int, boundary=None, exps=(3, 1, 0), k: int = 3,
              order: int = 13) -> bool:
    """Face Yang-Baxter equation; ``boundary=None`` means all boundaries."""
    boundaries = [boundary] if boundary is not None else itertools.product(range(k + 1), repeat=6)
    for b in boundaries:
        lhs, rhs = ybe_sides(m, n, l, b, exps, k, order)
        if not lhs.agrees_with(rhs):
            return False
    return True


def first_ybe_counterexample(m, n, l, exps=(3, 1, 0), k=3, order=13):
    for b in itertools.product(range(k + 1), repeat=6):
        lhs, rhs = ybe_sides(m, n, l, b, exps, k, order)
        if not lhs.agrees_with(rhs):
            return b, lhs, rhs
    return None


def inversion_sum(m, n, lam, mu, alpha, nu, k=3, order=13, zpow=1) -> QSeries:
    total = QSeries({}, order)
    for mup in range(k + 1):
        a = weight_or_zero(lam, mu, mup, nu, m, n, k, order, zpow)
        if a.is_zero():
            continue
        b = weight_or_zero(lam, mup, alpha, nu, n, m, k, order, -zpow)
        total = total + a * b
    return total


def check_inversion(m: int, n: int, boundary=None, k: int = 3, order: int = 13) -> bool:
    _check_labels((m, n), (n, m))
    boundaries = [boundary] if boundary is not None else itertools.product(range(k + 1), repeat=4)
    for lam, mu, alpha, nu in boundaries:
        # only boundaries for which both sides make sense
        if not (admissible_idx(lam, mu, m, k) and admissible_idx(mu, nu, n, k)
                and admissible_idx(lam, alpha, m, k) and admissible_idx(alpha, nu, n, k)):
            continue
        total = inversion_sum(m, n, lam, mu, alpha, nu, k, order)
        target = QSeries.constant(1 if mu == alpha else 0)
        if not total.agrees_with(target):
            return False
    return True


def crossing_sides(n: int, cfg_corners, k: int = 3, order: int = 13):
    lam, mu, mup, nu = cfg_corners
    cfg = FaceConfig(lam, mu, mup, nu, n, 1, k)
    lhs = face_weight_factors(cfg, CROSS_ARG)
    crossed = FaceConfig(mup, lam, nu, mu, 1, n, k)
    rhs = (crossing_G_factors(lam, mup, k) / crossing_G_factors(mu, nu, k)
           * face_weight_factors(crossed, Mono(1, 0, -1)))
    return lhs.expand(order), rhs.expand(order)


def check_crossing(n: int, boundary=None, k: int = 3, order: int = 13) -> bool:
    boundaries = [boundary] if boundary is not None else itertools.product(range(k + 1), repeat=4)
    for corners in boundaries:
        if not FaceConfig(*corners, n, 1, k).is_admissible():
            continue
        lhs, rhs = crossing_sides(n, corners, k, order)
        if not lhs.agrees_with(rhs):
            return False
    return True


def check_prop1(n: int, k: int = 3, order: int = 13) -> bool:
    """W^{(n,1)}(lam, mu, mu', nu) = W^{(1,n)}(nu, mu, mu', lam)."""
    for lam, mu, mup, nu in itertools.product(range(k + 1), repeat=4):
        cfg = FaceConfig(lam, mu, mup, nu, n, 1, k)
        if not cfg.is_admissible():
            continue
        lhs = face_weight(cfg, order)
        rhs = face_weight(FaceConfig(nu, mu, mup, lam, 1, n, k), order)
        if not lhs.agrees_with(rhs):
            return False
    return True


def admissible_faces(m: int, n: int, k: int = 3) -> List[FaceConfig]:
    out = []
    for c in itertools.product(range(k + 1), repeat=4):
        cfg = FaceConfig(*c, m, n, k)
        if cfg.is_admissible():
            out.append(cfg)
    return out


# the seven named (2,1) weights at level 3 and their partner configurations
NAMED_21 = {
    "A": ((0, 2, 1, 3), (3, 1, 2, 0)),
    "B12e": ((1, 1, 2, 2), (2, 2, 1, 1)),
    "B12d": ((1, 3, 0, 2), (2, 0, 3, 1)),
    "C10e": ((1, 1, 2, 0), (2, 2, 1, 3)),
    "C12e": ((1, 1, 0, 2), (2, 2, 3, 1)),
    "C01d": ((0, 2, 1, 1), (3, 1, 2, 2)),
    "C12d": ((1, 3, 2, 2), (2, 0, 1, 1)),
}


def named_21_weights(order: int = 13, zeta=1) -> Dict[str, QSeries]:
    return {name: face_weight(FaceConfig(*pair[0], 2, 1, 3), order, zeta)
            for name, pair in NAMED_21.items()}


def linear_relations(series: Dict[str, QSeries], order: int) -> List[Dict[str, object]]:
    """Exact rational linear relations among the given series (null space of
    the coefficient matrix), returned as name -> coefficient dicts."""
    from sympy import Matrix, Rational as R
    names = list(series)
    keys = sorted({key for s in series.values() for key in s.terms if key[0] < order})
    rows = []
    for key in keys:
        rows.append([R(int(series[nm].terms.get(key, 0).numerator),
                       int(series[nm].terms.get(key, 0).denominator)) for nm in names])
    if not rows:
        return []
    null = Matrix(rows).nullspace()
    return [{nm: v[i] for i, nm in enumerate(names) if v[i] != 0} for v in null]


# ----------------------------------------------------------------------
# numerical evaluation of the weights

def _factored_value(f: Factored, q: float, zeta: float, tol_exp: int = 400):
    """Numerical value of a factored weight at real q, zeta (infinite products
    truncated where the neglected factors are below the working precision)."""
    coeff, ue, ze, fac = f._materialize(tol_exp)
    u2 = mpmath.mpf(q)
    if ue % 2:
        raise ValueError("odd power of u at real q")
    val = mpmath.mpf(float(coeff)) * u2 ** (ue // 2) * mpmath.mpf(zeta) ** ze
    for (c, u, z), m in fac.items():
        if u % 2:
            raise ValueError("odd power of u at real q")
        x = mpmath.mpf(float(c)) * u2 ** (u // 2) * mpmath.mpf(zeta) ** z
        val *= (1 - x) ** mpmath.mpf(float(m))
    return val


def numeric_weight(cfg: FaceConfig, q: float, zeta: float, precision: int = 30):
    """(value, error bound) of W^{(m,n)} at real (q, zeta)."""
    with mpmath.workdps(precision):
        f = face_weight_factors(cfg, Mono(1, 0, 1))
        # the family cutoff: neglected factors are 1 + O(|q|^(cut/2) zeta^s)
        cut = 60 * p_exponent(cfg.k)
        v1 = _factored_value(f, q, zeta, cut)
        v2 = _factored_value(f, q, zeta, 2 * cut)
        return v2, abs(v2 - v1)


def adm1_configs(n: int, k: int) -> List[Tuple[int, int, int, int]]:
    """Configurations (xi'+L_i, xi+L_{1-i}, xi'+L_{1-i}, xi+L_i) with
    (xi, xi') (n-1)-admissible at level k-1."""
    out = set()
    for b in range(k):
        for bp in range(k):
            if not admissible_idx(b, bp, n - 1, k - 1):
                continue
            for i in (0, 1):
                out.add((bp + i, b + 1 - i, bp + 1 - i, b + i))
    return sorted(out)


def numeric_max_scan(n: int, k: int, q: float, zeta: float, precision: int = 30):
    """Evaluate every W^{(n,1)} weight numerically and compare the maximal
    ones with the ground-state pattern.

    Returns ``(rows, maxima, matches)`` where rows are
    ``(config, value, error)`` sorted by decreasing value.
    """
    if not (0 < -q < 1 / zeta < 1):
        raise RegimeViolation(f"(q, zeta) = ({q}, {zeta}) outside 0 < -q < 1/zeta < 1")
    rows = []
    for cfg in admissible_faces(n, 1, k):
        val, err = numeric_weight(cfg, q, zeta, precision)
        rows.append((cfg.corners(), val, err))
    rows.sort(key=lambda r: -r[1])
    expected = adm1_configs(n, k)
    maxima = sorted(c for c, v, e in rows[:len(expected)])
    # the maximal set must be separated from the rest by more than the error bars
    separated = (len(rows) == len(expected)
                 or rows[len(expected) - 1][1] - rows[len(expected)][1]
                 > rows[len(expected) - 1][2] + rows[len(expected)][2])
    return rows, maxima, maxima == expected and separated
