"""Modules of the quantized affine algebra U_q(sl2-hat), truncated by degree.

* :class:`HWModule` -- the irreducible highest weight module V(lambda),
  built weight space by weight space.  A vector of positive degree is zero
  exactly when both e_0 and e_1 annihilate it, so the image of a candidate
  f_i b is recorded through its e-images and a basis is picked among the
  candidates by exact rank computations over Q(q).
* :func:`free_action` / :func:`contravariant_gram` -- the same algebra on the
  free (Verma) module spanned by f-words, used as an independent oracle.
* :class:`EvalModule` -- the spin N/2 evaluation module at z = 1 in the
  homogeneous basis, with the conversion to the principal basis.
* :class:`Tensor` -- tensor products with the coproduct
  D(e) = e (x) 1 + t (x) e,  D(f) = f (x) t^{-1} + 1 (x) f,  D(t) = t (x) t.
* :func:`omega_space` -- highest weight vectors of a tensor product.

Scalars are elements of the field Q(q) (sympy ``FracElement``); the spectral
parameter is restored afterwards from the principal degree.
"""

import itertools
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from sympy.polys.matrices import DomainMatrix

from .series import _Q, _RF_FIELD, DEFAULT_ORDER, QSeries, RatFunc, q_binomial, \
    ratfunc_to_series, series_sqrt

QF = _RF_FIELD
QDOM = _RF_FIELD.to_domain()
ZERO = QF(0)
ONE = QF(1)


class DegreeOverflow(ValueError):
    pass


class EmptySpace(ValueError):
    pass


# Cartan matrix of sl2-hat
CARTAN = ((2, -2), (-2, 2))


@lru_cache(maxsize=None)
def qint(n: int):
    """[n] = (q^n - q^-n)/(q - q^-1) as an element of Q(q); [-n] = -[n]."""
    return (_Q ** n - _Q ** (-n)) / (_Q - 1 / _Q)


def qpow(n: int):
    return _Q ** n


def to_ratfunc(x) -> RatFunc:
    return RatFunc(x)


def _add_into(acc: dict, key, val):
    if not val:
        return
    cur = acc.get(key)
    new = val if cur is None else cur + val
    if new:
        acc[key] = new
    elif cur is not None:
        del acc[key]


def vec_add(a: dict, b: dict, scale=ONE) -> dict:
    out = dict(a)
    for k, v in b.items():
        _add_into(out, k, v * scale)
    return out


def vec_scale(a: dict, s) -> dict:
    if not s:
        return {}
    return {k: v * s for k, v in a.items()}


# ----------------------------------------------------------------------
# exact linear algebra helpers (sympy DomainMatrix over Q(q))

def _matrix(rows: List[Dict[int, object]], ncols: int) -> DomainMatrix:
    sdm = {i: {j: QDOM.convert(v) for j, v in r.items() if v} for i, r in enumerate(rows)}
    sdm = {i: r for i, r in sdm.items() if r}
    return DomainMatrix.from_dict_sympy(len(rows), ncols, {}).convert_to(QDOM) if not sdm else \
        DomainMatrix(sdm, (len(rows), ncols), QDOM)


def rref_columns(columns: List[Dict[int, object]], nrows: int):
    """RREF of the matrix whose columns are given as sparse dicts.

    Returns (pivot column indices, rref rows as dicts col -> value).
    """
    rows: List[Dict[int, object]] = [dict() for _ in range(nrows)]
    for c, col in enumerate(columns):
        for r, v in col.items():
            if v:
                rows[r][c] = v
    if not columns:
        return [], []
    m = DomainMatrix({i: r for i, r in enumerate(rows) if r}, (nrows, len(columns)), QDOM) \
        if any(rows) else DomainMatrix.zeros((nrows, len(columns)), QDOM)
    red, pivots = m.to_sparse().rref()
    sdm = red.to_sdm()
    out = [dict(sdm.get(i, {})) for i in range(len(pivots))]
    return list(pivots), out


def nullspace(rows: List[Dict[int, object]], ncols: int) -> List[Dict[int, object]]:
    """Basis of {x : rows . x = 0}; each basis vector has a 1 at its own free
    column and zeros at the other free columns."""
    if ncols == 0:
        return []
    nz = [r for r in rows if any(r.values())]
    if not nz:
        return [{j: ONE} for j in range(ncols)]
    m = DomainMatrix({i: {j: v for j, v in r.items() if v} for i, r in enumerate(nz)},
                     (len(nz), ncols), QDOM)
    red, pivots = m.to_sparse().rref()
    sdm = red.to_sdm()
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        vec = {free: ONE}
        for i, pc in enumerate(pivots):
            v = sdm.get(i, {}).get(free)
            if v:
                vec[pc] = -v
        basis.append(vec)
    return basis


def solve_unique(rows: List[Dict[int, object]], rhs: List[object], ncols: int) -> Dict[int, object]:
    """Solve rows . x = rhs; raises ValueError if inconsistent or underdetermined."""
    aug = [dict(r) for r in rows]
    for r, b in zip(aug, rhs):
        if b:
            r[ncols] = b
    nz = [r for r in aug if r]
    if not nz:
        if ncols:
            raise ValueError("underdetermined system")
        return {}
    m = DomainMatrix({i: r for i, r in enumerate(nz)}, (len(nz), ncols + 1), QDOM)
    red, pivots = m.to_sparse().rref()
    if ncols in pivots:
        raise ValueError("inconsistent system")
    if len(pivots) != ncols:
        raise ValueError(f"underdetermined system (rank {len(pivots)} < {ncols})")
    sdm = red.to_sdm()
    return {pc: sdm.get(i, {}).get(ncols, ZERO) for i, pc in enumerate(pivots)
            if sdm.get(i, {}).get(ncols)}


# ----------------------------------------------------------------------
# free (Verma) module on f-words

Word = Tuple[int, ...]     # (i1, ..., ik) means f_{i1} ... f_{ik} v


def word_weight(word: Word) -> Tuple[int, int]:
    return (word.count(0), word.count(1))


def h_values(dynkin: Tuple[int, int], n0: int, n1: int) -> Tuple[int, int]:
    """(<h_0, wt>, <h_1, wt>) of a vector with n0 f_0's and n1 f_1's."""
    m0, m1 = dynkin
    return (m0 - 2 * n0 + 2 * n1, m1 - 2 * n1 + 2 * n0)


def free_action(gen: str, elem: Dict[Word, object], dynkin: Tuple[int, int]) -> Dict[Word, object]:
    """Action of e0, e1, f0, f1, t0, t1 on a combination of f-words applied to
    the highest weight vector of the free module (no null vectors removed)."""
    kind, i = gen[0], int(gen[1])
    out: Dict[Word, object] = {}
    for word, c in elem.items():
        if kind == "f":
            _add_into(out, (i,) + word, c)
        elif kind == "t":
            h = h_values(dynkin, *word_weight(word))[i]
            _add_into(out, word, c * qpow(h))
        elif kind == "e":
            for p, j in enumerate(word):
                if j != i:
                    continue
                tail = word[p + 1:]
                h = h_values(dynkin, *word_weight(tail))[i]
                _add_into(out, word[:p] + tail, c * qint(h))
        else:
            raise ValueError(f"unknown generator {gen!r}")
    return out


def contravariant_pairing(u: Word, w: Word, dynkin) -> object:
    """<u v, w v> with <f_i x, y> = <x, e_i y> and <v, v> = 1."""
    if word_weight(u) != word_weight(w):
        return ZERO
    vec = {w: ONE}
    for i in u:
        vec = free_action(f"e{i}", vec, dynkin)
        if not vec:
            return ZERO
    return vec.get((), ZERO)


def words_of_weight(n0: int, n1: int) -> List[Word]:
    out = set()
    for pos in itertools.combinations(range(n0 + n1), n0):
        out.add(tuple(0 if p in pos else 1 for p in range(n0 + n1)))
    return sorted(out)


def contravariant_gram(dynkin: Tuple[int, int], degree: int,
                       weight: Optional[Tuple[int, int]] = None):
    """Gram matrix (list of lists of RatFunc) of the contravariant form on the
    f-words of the given degree (optionally of a single weight)."""
    if weight is None:
        words = sorted(itertools.product((0, 1), repeat=degree))
    else:
        words = words_of_weight(*weight)
    return words, [[RatFunc(contravariant_pairing(u, w, dynkin)) for w in words] for u in words]


def gram_rank(dynkin, weight) -> int:
    words, g = contravariant_gram(dynkin, sum(weight), weight)
    if not words:
        return 0
    rows = [{j: x._f for j, x in enumerate(r) if not x.is_zero()} for r in g]
    return len(words) - len(nullspace(rows, len(words)))


# ----------------------------------------------------------------------
# irreducible highest weight modules

Key = Tuple[int, int, int]     # (n0, n1, basis index)


class WeightSpace:
    __slots__ = ("weight", "words", "e_images")

    def __init__(self, weight, words, e_images):
        self.weight = weight
        self.words = words
        # e_images[i][b] = coordinates (dict Key -> coeff) of e_i applied to basis vector b
        self.e_images = e_images

    def __len__(self):
        return len(self.words)


class HWModule:
    """V(lambda) for lambda = m0 Lambda_0 + m1 Lambda_1, up to ``max_degree``."""

    def __init__(self, dynkin: Tuple[int, int], max_degree: int = 5):
        self.dynkin = tuple(dynkin)
        self.max_degree = max_degree
        self.level = sum(dynkin)
        self.spaces: Dict[Tuple[int, int], WeightSpace] = {}
        # f_images[(w, i)][b] = coordinates of f_i applied to basis vector b of w
        self.f_images: Dict[Tuple[Tuple[int, int], int], List[dict]] = {}
        self.spaces[(0, 0)] = WeightSpace((0, 0), [()], [[{}], [{}]])
        for d in range(1, max_degree + 1):
            for n0 in range(d + 1):
                self._build((n0, d - n0))

    def __repr__(self):
        return f"HWModule({self.dynkin}, max_degree={self.max_degree})"

    # -- structure --------------------------------------------------------
    def h(self, weight) -> Tuple[int, int]:
        return h_values(self.dynkin, *weight)

    def dim(self, weight) -> int:
        sp = self.spaces.get(tuple(weight))
        return 0 if sp is None else len(sp)

    def weights_of_degree(self, d: int) -> List[Tuple[int, int]]:
        self._check_degree(d)
        return [(n0, d - n0) for n0 in range(d + 1) if self.dim((n0, d - n0))]

    def basis_keys(self, weight) -> List[Key]:
        return [(weight[0], weight[1], b) for b in range(self.dim(weight))]

    def _check_degree(self, d):
        if d > self.max_degree:
            raise DegreeOverflow(f"degree {d} exceeds the module truncation {self.max_degree}")

    @staticmethod
    def _lower(w, i):
        return (w[0] - 1, w[1]) if i == 0 else (w[0], w[1] - 1)

    @staticmethod
    def _raise(w, i):
        return (w[0] + 1, w[1]) if i == 0 else (w[0], w[1] + 1)

    def _build(self, w):
        # candidates f_i b, b in the basis of w - alpha_i
        cands = []   # (i, b, word)
        for i in (0, 1):
            low = self._lower(w, i)
            if min(low) < 0 or low not in self.spaces:
                continue
            for b, word in enumerate(self.spaces[low].words):
                cands.append((i, b, (i,) + word))
        if not cands:
            return
        # rows of the e-image coordinates: keys of w - alpha_0 and w - alpha_1
        row_index: Dict[Tuple[int, Key], int] = {}
        for j in (0, 1):
            low = self._lower(w, j)
            for key in self.basis_keys(low) if low in self.spaces else []:
                row_index[(j, key)] = len(row_index)
        images = []
        for i, b, _word in cands:
            images.append(self._e_image_of_candidate(w, i, b))
        columns = [{row_index[(j, key)]: v for j in (0, 1) for key, v in images[c][j].items()}
                   for c in range(len(cands))]
        pivots, red = rref_columns(columns, len(row_index))
        if not pivots:
            # every candidate is a null vector: the weight space is zero
            for i in (0, 1):
                low = self._lower(w, i)
                if low in self.spaces:
                    self.f_images.setdefault((low, i), [{} for _ in self.spaces[low].words])
            return
        words = [cands[c][2] for c in pivots]
        e_imgs = [[images[c][j] for c in pivots] for j in (0, 1)]
        self.spaces[w] = WeightSpace(w, words, e_imgs)
        # coordinates of every candidate in the chosen basis
        for c, (i, b, _word) in enumerate(cands):
            low = self._lower(w, i)
            lst = self.f_images.setdefault((low, i), [None] * len(self.spaces[low].words))
            coords = {}
            for r, pc in enumerate(pivots):
                v = red[r].get(c)
                if v:
                    coords[(w[0], w[1], r)] = v
            lst[b] = coords

    def _e_image_of_candidate(self, w, i, b):
        """(e_0 f_i b, e_1 f_i b) as coordinate dicts, using
        e_j f_i = f_i e_j + delta_ij [h_i]."""
        low = self._lower(w, i)
        out = []
        for j in (0, 1):
            acc: dict = {}
            eb = self.spaces[low].e_images[j][b]
            if eb:
                acc = self.apply_f(i, eb)
            if i == j:
                _add_into(acc, (low[0], low[1], b), qint(self.h(low)[i]))
            out.append(acc)
        return out

    # -- action -------------------------------------------------------------
    def apply_f(self, i: int, vec: dict) -> dict:
        out: dict = {}
        for (n0, n1, b), c in vec.items():
            w = (n0, n1)
            self._check_degree(n0 + n1 + 1)
            imgs = self.f_images.get((w, i))
            if imgs is None:
                continue
            for key, v in imgs[b].items():
                _add_into(out, key, c * v)
        return out

    def apply_e(self, i: int, vec: dict) -> dict:
        out: dict = {}
        for (n0, n1, b), c in vec.items():
            for key, v in self.spaces[(n0, n1)].e_images[i][b].items():
                _add_into(out, key, c * v)
        return out

    def t_exp(self, i: int, key) -> int:
        return self.h((key[0], key[1]))[i]

    def apply(self, gen: str, key) -> dict:
        kind, i = gen[0], int(gen[1])
        vec = {key: ONE}
        if kind == "e":
            return self.apply_e(i, vec)
        if kind == "f":
            return self.apply_f(i, vec)
        if kind == "t":
            return {key: qpow(self.t_exp(i, key))}
        raise ValueError(gen)

    def degree(self, key) -> int:
        return key[0] + key[1]

    def highest(self) -> dict:
        return {(0, 0, 0): ONE}

    def word_vector(self, word: Word) -> dict:
        """Coordinates of f_{i1} ... f_{ik} v."""
        vec = self.highest()
        for i in reversed(word):
            vec = self.apply_f(i, vec)
            if not vec:
                return {}
        return vec

    def key_word(self, key) -> Word:
        return self.spaces[(key[0], key[1])].words[key[2]]


@lru_cache(maxsize=None)
def hw_module(dynkin: Tuple[int, int], max_degree: int = 5) -> HWModule:
    return HWModule(tuple(dynkin), max_degree)


# ----------------------------------------------------------------------
# evaluation modules

class EvalModule:
    """Spin N/2 evaluation module at z = 1, homogeneous basis v_0 .. v_N:

    e1 v_j = [j] v_{j-1},  f1 v_j = [N-j] v_{j+1},  t1 v_j = q^{N-2j} v_j,
    e0 v_j = [N-j] v_{j+1} (times z),  f0 v_j = [j] v_{j-1} (times 1/z),
    t0 = t1^{-1}.
    """

    def __init__(self, N: int):
        self.N = N

    def __repr__(self):
        return f"EvalModule({self.N})"

    def t_exp(self, i: int, j: int) -> int:
        e = self.N - 2 * j
        return e if i == 1 else -e

    def apply(self, gen: str, j: int) -> dict:
        kind, i = gen[0], int(gen[1])
        N = self.N
        if kind == "t":
            return {j: qpow(self.t_exp(i, j))}
        lower = (kind == "e") == (i == 1)   # e1, f0 lower the index
        if lower:
            return {j - 1: qint(j)} if j > 0 else {}
        return {j + 1: qint(N - j)} if j < N else {}

    def degree(self, j) -> int:
        return 0


def principal_constant(N: int, j: int, order: int = DEFAULT_ORDER) -> QSeries:
    """c_j^{(N)} = qbinom(N, j)^{1/2} q^{j(N-j)/2} as a series in u = q^{1/2}."""
    qb = ratfunc_to_series(q_binomial(N, j), order + 2 * N * N)
    return (series_sqrt(qb) * QSeries.monomial(1, j * (N - j), 0)).truncate(order)


def eval_action(gen: str, j: int, N: int, flavor: str = "principal",
                order: int = DEFAULT_ORDER) -> Dict[int, QSeries]:
    """Action of a generator on a basis vector of the evaluation module with
    the spectral parameter restored: homogeneous e0 ~ z, f0 ~ 1/z (z = zeta^2);
    principal e_i ~ zeta, f_i ~ 1/zeta, u_j = c_j zeta^j v_j."""
    mod = EvalModule(N)
    raw = mod.apply(gen, j)
    kind, i = gen[0], int(gen[1])
    out = {}
    for jj, c in raw.items():
        coeff = ratfunc_to_series(RatFunc(c), order)
        if flavor == "homogeneous":
            zp = 0 if kind == "t" or i == 1 else (2 if kind == "e" else -2)
            out[jj] = coeff.shift(0, zp)
        elif flavor == "principal":
            zp = 0 if kind == "t" else (1 if kind == "e" else -1)
            ratio = principal_constant(N, j, order) / principal_constant(N, jj, order)
            out[jj] = (coeff * ratio).shift(0, zp).truncate(order)
        else:
            raise ValueError(f"unknown flavor {flavor!r}")
    return out


def principal_to_homogeneous(j: int, N: int, order: int = DEFAULT_ORDER) -> QSeries:
    """Coefficient of v_j in the image of u_j under C_N(zeta): c_j zeta^j."""
    return principal_constant(N, j, order).shift(0, j)


# ----------------------------------------------------------------------
# tensor products

class Tensor:
    """Tensor product of modules (HWModule / EvalModule) with the coproduct
    D(e_i) = e_i (x) 1 + t_i (x) e_i, D(f_i) = f_i (x) t_i^{-1} + 1 (x) f_i."""

    def __init__(self, *factors):
        self.factors = tuple(factors)

    def __repr__(self):
        return "Tensor(" + ", ".join(map(repr, self.factors)) + ")"

    def apply(self, gen: str, vec: dict) -> dict:
        kind, i = gen[0], int(gen[1])
        out: dict = {}
        nf = len(self.factors)
        for key, c in vec.items():
            if kind == "t":
                e = sum(f.t_exp(i, k) for f, k in zip(self.factors, key))
                _add_into(out, key, c * qpow(e))
                continue
            for p in range(nf):
                if kind == "e":
                    te = sum(self.factors[r].t_exp(i, key[r]) for r in range(p))
                else:
                    te = -sum(self.factors[r].t_exp(i, key[r]) for r in range(p + 1, nf))
                img = self.factors[p].apply(gen, key[p])
                if not img:
                    continue
                s = c * qpow(te)
                for kp, v in img.items():
                    _add_into(out, key[:p] + (kp,) + key[p + 1:], s * v)
        return out

    def apply_word(self, word: Word, vec: dict) -> dict:
        """D(f_{i1} ... f_{ik}) vec."""
        for i in reversed(word):
            vec = self.apply(f"f{i}", vec)
            if not vec:
                return {}
        return vec

    def degree(self, key) -> int:
        return sum(f.degree(k) for f, k in zip(self.factors, key))

    def t_exps(self, key) -> Tuple[int, int]:
        return tuple(sum(f.t_exp(i, k) for f, k in zip(self.factors, key)) for i in (0, 1))


def tensor_action(gen: str, factors: Sequence, vec: dict) -> dict:
    return Tensor(*factors).apply(gen, vec)


def truncate_degree(tensor: Tensor, vec: dict, max_degree: int) -> dict:
    return {k: v for k, v in vec.items() if tensor.degree(k) <= max_degree}


# ----------------------------------------------------------------------
# spaces of highest weight vectors

def tensor_weight_keys(m1: HWModule, m2: HWModule, degree: int, h1_total: int) -> List[Tuple[Key, Key]]:
    """Basis keys of V(xi) (x) V(eta) of total degree ``degree`` with
    <h_1, weight> = h1_total."""
    keys = []
    for d1 in range(degree + 1):
        d2 = degree - d1
        for w1 in m1.weights_of_degree(d1):
            for w2 in m2.weights_of_degree(d2):
                if m1.h(w1)[1] + m2.h(w2)[1] == h1_total:
                    for k1 in m1.basis_keys(w1):
                        for k2 in m2.basis_keys(w2):
                            keys.append((k1, k2))
    return keys


def omega_space(xi: Tuple[int, int], eta: Tuple[int, int], a: int, degree: int,
                max_degree: int = 5) -> List[dict]:
    """Highest weight vectors of weight lambda_a - (degree/2) delta in
    V(xi) (x) V(eta) (those of the given principal degree).

    Returned in a canonical basis: the projections onto v_xi (x) V(eta) are in
    reduced row echelon form.
    """
    m1, m2 = hw_module(tuple(xi), max_degree), hw_module(tuple(eta), max_degree)
    if degree > max_degree:
        raise DegreeOverflow(f"degree {degree} exceeds {max_degree}")
    ten = Tensor(m1, m2)
    keys = tensor_weight_keys(m1, m2, degree, a)
    if not keys:
        return []
    rows_by_key: Dict[Tuple, Dict[int, object]] = {}
    for c, k in enumerate(keys):
        for gen in ("e0", "e1"):
            for kk, v in ten.apply(gen, {k: ONE}).items():
                rows_by_key.setdefault((gen, kk), {})[c] = v
    basis = nullspace(list(rows_by_key.values()), len(keys))
    vecs = [{keys[c]: v for c, v in b.items()} for b in basis]
    return canonical_omega_basis(vecs)


def projection_on_top(vec: dict) -> dict:
    """The V(eta) part of the v_xi (x) V(eta) component."""
    return {k2: v for (k1, k2), v in vec.items() if k1 == (0, 0, 0)}


def canonical_omega_basis(vecs: List[dict]) -> List[dict]:
    if not vecs:
        return []
    keys = sorted({k for v in vecs for k in projection_on_top(v)})
    if not keys:
        raise EmptySpace("highest weight vectors with no v_xi component")
    idx = {k: r for r, k in enumerate(keys)}
    cols = [{idx[k]: c for k, c in projection_on_top(v).items()} for v in vecs]
    # express the RREF of the projections as combinations of the vectors
    m = DomainMatrix({r: {c: cols[c][r] for c in range(len(vecs)) if r in cols[c]}
                      for r in range(len(keys)) if any(r in col for col in cols)},
                     (len(keys), len(vecs)), QDOM)
    # rows of m.transpose() are the projections; reduce them while tracking combinations
    aug = m.transpose().hstack(DomainMatrix.eye(len(vecs), QDOM))
    red, pivots = aug.to_sparse().rref()
    sdm = red.to_sdm()
    out = []
    for r in range(len(pivots)):
        if pivots[r] >= len(keys):
            raise EmptySpace("dependent highest weight vectors")
        comb = {c - len(keys): v for c, v in sdm.get(r, {}).items() if c >= len(keys)}
        vec: dict = {}
        for c, s in comb.items():
            for k, v in vecs[c].items():
                _add_into(vec, k, s * v)
        out.append(vec)
    return out


def is_highest(xi, eta, vec: dict, max_degree: int = 5) -> bool:
    ten = Tensor(hw_module(tuple(xi), max_degree), hw_module(tuple(eta), max_degree))
    return not ten.apply("e0", vec) and not ten.apply("e1", vec)


def words_to_tensor(xi, eta, terms: Iterable[Tuple[object, Word, Word]], max_degree: int = 5) -> dict:
    """sum c * (F v_xi) (x) (G v_eta) in coordinates."""
    m1, m2 = hw_module(tuple(xi), max_degree), hw_module(tuple(eta), max_degree)
    out: dict = {}
    for c, w1, w2 in terms:
        c = c._f if isinstance(c, RatFunc) else c
        a, b = m1.word_vector(tuple(w1)), m2.word_vector(tuple(w2))
        for k1, v1 in a.items():
            for k2, v2 in b.items():
                _add_into(out, (k1, k2), c * v1 * v2)
    return out


def normalise_to_anchor(vec: dict, eta, anchor_word: Word, anchor_coeff, max_degree: int = 5) -> dict:
    """Scale ``vec`` so that its v_xi (x) V(eta) component equals
    anchor_coeff * (anchor_word v_eta) (checked on one coordinate)."""
    m2 = hw_module(tuple(eta), max_degree)
    target = vec_scale(m2.word_vector(tuple(anchor_word)), anchor_coeff)
    proj = projection_on_top(vec)
    for k, v in target.items():
        if proj.get(k):
            return vec_scale(vec, v / proj[k])
    raise EmptySpace("anchor term absent from the vector")


def bar_word(word: Word) -> Word:
    return tuple(1 - i for i in word)


def bar_tensor(xi, eta, vec: dict, max_degree: int = 5) -> dict:
    """The 0 <-> 1 exchange: V(xi) (x) V(eta) -> V(bar xi) (x) V(bar eta)."""
    m1, m2 = hw_module(tuple(xi), max_degree), hw_module(tuple(eta), max_degree)
    terms = [(c, bar_word(m1.key_word(k1)), bar_word(m2.key_word(k2))) for (k1, k2), c in vec.items()]
    return words_to_tensor(tuple(reversed(xi)), tuple(reversed(eta)), terms, max_degree)


def space_dimensions(xi, eta, a: int, max_degree: int = 5) -> List[int]:
    return [len(omega_space(xi, eta, a, d, max_degree)) for d in range(max_degree + 1)]


# ----------------------------------------------------------------------
# Omega bases and the listed vectors

def as_dynkin(weight) -> Tuple[int, int]:
    """Accept (m0, m1) or a WeightIndex (level k, index a) -> (k - a, a)."""
    if hasattr(weight, "k") and hasattr(weight, "a"):
        return (weight.k - weight.a, weight.a)
    return tuple(weight)


def omega_basis(xi, eta, a: int, max_degree: int = 4, module_degree: int = 5) -> List[Tuple[int, dict]]:
    """(degree, vector) pairs spanning the highest weight vectors of weight
    lambda_a in V(xi) (x) V(eta) up to ``max_degree``, ordered by degree.

    Where the text lists a vector, that vector is used with its normalisation
    (it is checked to lie in the computed space); otherwise the canonical
    normalisation of :func:`canonical_omega_basis` is used.
    """
    xi, eta = as_dynkin(xi), as_dynkin(eta)
    if sum(xi) + sum(eta) < a or a < 0:
        raise ValueError("invalid weight index")
    listed = {}
    for label, entry in listed_vectors().items():
        if entry["xi"] == xi and entry["eta"] == eta and entry["a"] == a:
            listed.setdefault(entry["degree"], []).append(label)
    out = []
    for d in range(max_degree + 1):
        vecs = omega_space(xi, eta, a, d, module_degree)
        labels = listed.get(d, [])
        if labels and len(labels) == len(vecs):
            vecs = [listed_vector(lb, module_degree) for lb in labels]
        out.extend((d, v) for v in vecs)
    if not out:
        raise EmptySpace(f"no highest weight vectors of weight index {a} in V{xi} (x) V{eta}")
    return out


@lru_cache(maxsize=None)
def _listed_raw():
    from .golden import load
    return load("omega_vectors.yaml")


def listed_vectors() -> Dict[str, dict]:
    """Label -> {xi, eta, a, degree, bar_of?} for the listed vectors."""
    raw = _listed_raw()
    out = {}
    for label, entry in raw.items():
        if "bar_of" in entry:
            src = raw[entry["bar_of"]]
            out[label] = {"xi": tuple(reversed(src["xi"])), "eta": tuple(reversed(src["eta"])),
                          "a": entry["a"], "degree": src["degree"], "bar_of": entry["bar_of"]}
        else:
            out[label] = {"xi": tuple(entry["xi"]), "eta": tuple(entry["eta"]),
                          "a": entry["a"], "degree": entry["degree"]}
    return out


def listed_terms(label: str):
    from .golden import parse_coefficient, parse_word
    entry = _listed_raw()[label]
    return [(parse_coefficient(c), parse_word(w1), parse_word(w2)) for c, w1, w2 in entry["terms"]]


@lru_cache(maxsize=None)
def _listed_vector(label: str, max_degree: int):
    entry = _listed_raw()[label]
    if "bar_of" in entry:
        src = _listed_raw()[entry["bar_of"]]
        return bar_tensor(tuple(src["xi"]), tuple(src["eta"]),
                          _listed_vector(entry["bar_of"], max_degree), max_degree)
    return words_to_tensor(tuple(entry["xi"]), tuple(entry["eta"]), listed_terms(label), max_degree)


def listed_vector(label: str, max_degree: int = 5) -> dict:
    return dict(_listed_vector(label, max_degree))


def reproduce_listed_vector(label: str, max_degree: int = 5) -> dict:
    """Compute the highest weight space at the label's degree, scale its single
    element to the label's top component and return it (raises if the space
    is not one-dimensional)."""
    info = listed_vectors()[label]
    vecs = omega_space(info["xi"], info["eta"], info["a"], info["degree"], max_degree)
    if len(vecs) != 1:
        raise EmptySpace(f"{label}: highest weight space has dimension {len(vecs)}")
    target = listed_vector(label, max_degree)
    proj_t, proj_v = projection_on_top(target), projection_on_top(vecs[0])
    k = next(k for k in sorted(proj_t) if proj_v.get(k))
    return vec_scale(vecs[0], proj_t[k] / proj_v[k])


def check_listed_vector(label: str, max_degree: int = 5) -> bool:
    """Exact coefficient-for-coefficient comparison with the listed vector."""
    return reproduce_listed_vector(label, max_degree) == listed_vector(label, max_degree)
