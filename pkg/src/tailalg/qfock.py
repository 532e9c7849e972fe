"""The q-deformed Fock space over l2(Z), truncated to a window and a cap.

Basis vectors are arbitrary integer words (repetitions allowed); ``()`` is the
vacuum.  The q-inner product is block diagonal by length and vanishes between
words with different letter multisets, so Gram matrices are stored per
multiset class.  Scalars are integer polynomials in q (see :mod:`qpoly`)
unless a rational q-point is supplied.
"""

from __future__ import annotations

import itertools
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import sqrt
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from . import qpoly as qp
from .fock import Letter, TruncationWindow, Word
from .qpoly import Poly, QScalar
from .rational import fmt_frac
from .report import Report
from .words import PermutationSpec

QWord = Tuple[int, ...]
QVec = Dict[QWord, Poly]

FACTORIAL_LIMIT = 6
NORM_TOL = 1e-9


class FactorialLimitError(ValueError):
    pass


class GramNotPositiveError(ArithmeticError):
    """The truncated Gram matrix is not positive definite at a q-point."""


def q_basis(window: TruncationWindow) -> List[QWord]:
    sites = list(window.sites)
    out: List[QWord] = []
    for n in range(window.cap + 1):
        out.extend(itertools.product(sites, repeat=n))
    return out


def _cls(w: QWord) -> QWord:
    return tuple(sorted(w))


# -- inner product ----------------------------------------------------------

@lru_cache(maxsize=None)
def gram_entry(u: QWord, v: QWord) -> Poly:
    """Sum of q^inv(pi) over permutations pi with v[pi(k)] == u[k].

    Fixing pi(0) = k first contributes the k unused positions to its left as
    inversions, which walks the permutation tree one level at a time.
    """
    if len(u) != len(v):
        return qp.ZERO
    if not u:
        return qp.ONE
    acc = qp.ZERO
    for k, x in enumerate(v):
        if x == u[0]:
            acc = qp.add(acc, qp.shift(gram_entry(u[1:], v[:k] + v[k + 1:]), k))
    return acc


def gram_entry_bruteforce(u: QWord, v: QWord) -> Poly:
    """Literal sum over the symmetric group; used as an oracle."""
    if len(u) != len(v):
        return qp.ZERO
    acc = qp.ZERO
    for pi in itertools.permutations(range(len(u))):
        if all(v[pi[k]] == u[k] for k in range(len(u))):
            inv = sum(1 for a, b in itertools.combinations(pi, 2) if a > b)
            acc = qp.add(acc, qp.mono(inv))
    return acc


@dataclass
class QGram:
    """Gram blocks grouped by multiset class; absent pairs are zero."""

    window: TruncationWindow
    mode: str
    q: Optional[Fraction]
    classes: Dict[QWord, List[QWord]]
    entries: Dict[Tuple[QWord, QWord], Poly]

    def scalar(self, u: QWord, v: QWord) -> QScalar:
        p = self.entries.get((u, v), qp.ZERO)
        if self.mode == "symbolic":
            return QScalar(poly=p)
        return QScalar(value=qp.evaluate(p, self.q), q=self.q)

    def block(self, n: int) -> Dict[Tuple[QWord, QWord], QScalar]:
        return {k: self.scalar(*k) for k in self.entries if len(k[0]) == n}

    def class_matrix(self, cls: QWord, q) -> np.ndarray:
        words = self.classes[cls]
        m = np.empty((len(words), len(words)))
        for a, u in enumerate(words):
            for b, v in enumerate(words):
                m[a, b] = float(qp.evaluate(self.entries[(u, v)], q))
        return m

    def to_json(self) -> dict:
        rows = sorted(self.entries, key=lambda k: (len(k[0]), k))
        return {
            "window": self.window.to_dict(),
            "mode": self.mode,
            "q": None if self.q is None else fmt_frac(self.q),
            "entries": [[list(u), list(v), self.scalar(u, v).to_json()] for u, v in rows],
        }


def q_gram(window: TruncationWindow, mode: Union[str, Fraction] = "symbolic",
           limit: int = FACTORIAL_LIMIT) -> QGram:
    if window.cap > limit:
        raise FactorialLimitError(f"cap {window.cap} exceeds the factorial limit {limit}")
    classes: Dict[QWord, List[QWord]] = defaultdict(list)
    for w in q_basis(window):
        classes[_cls(w)].append(w)
    entries = {}
    for words in classes.values():
        for u in words:
            for v in words:
                entries[(u, v)] = gram_entry(u, v)
    if mode == "symbolic":
        return QGram(window, "symbolic", None, dict(classes), entries)
    return QGram(window, "evaluated", Fraction(mode), dict(classes), entries)


def q_inner(x: QVec, y: QVec) -> Poly:
    by_cls: Dict[QWord, List[Tuple[QWord, Poly]]] = defaultdict(list)
    for v, c in y.items():
        by_cls[_cls(v)].append((v, c))
    acc = qp.ZERO
    for u, a in x.items():
        for v, b in by_cls.get(_cls(u), ()):
            acc = qp.add(acc, qp.mul(qp.mul(a, b), gram_entry(u, v)))
    return acc


# -- operators --------------------------------------------------------------

def q_create(site: int, w: QWord) -> QVec:
    return {(site,) + w: qp.ONE}


def q_annihilate(site: int, w: QWord) -> QVec:
    out: QVec = {}
    for k, x in enumerate(w):
        if x == site:
            r = w[:k] + w[k + 1:]
            out[r] = qp.add(out.get(r, qp.ZERO), qp.mono(k))
    return {r: c for r, c in out.items() if c}


def q_act(letter: Letter, w: QWord) -> QVec:
    return q_create(letter.site, w) if letter.dagger else q_annihilate(letter.site, w)


def _vec_add(acc: QVec, vec: QVec, coeff: Poly = qp.ONE) -> None:
    for r, c in vec.items():
        nv = qp.add(acc.get(r, qp.ZERO), qp.mul(coeff, c))
        if nv:
            acc[r] = nv
        else:
            acc.pop(r, None)


def apply_q_word(word: Sequence[Letter], vec: QVec) -> QVec:
    """Exact action on the untruncated space, rightmost letter first."""
    cur = dict(vec)
    for letter in reversed(word):
        nxt: QVec = {}
        for w, c in cur.items():
            _vec_add(nxt, q_act(letter, w), c)
        cur = nxt
        if not cur:
            break
    return cur


@dataclass
class QOperatorMatrix:
    window: TruncationWindow
    cols: Dict[QWord, QVec]
    boundary: FrozenSet[QWord] = frozenset()
    name: str = ""

    def column(self, c: QWord) -> QVec:
        return self.cols.get(c, {})

    def entries(self) -> Dict[Tuple[QWord, QWord], Poly]:
        return {(r, c): v for c, col in self.cols.items() for r, v in col.items()}

    def interior(self) -> List[QWord]:
        return [c for c in q_basis(self.window) if c not in self.boundary]

    def __matmul__(self, other: "QOperatorMatrix") -> "QOperatorMatrix":
        cols: Dict[QWord, QVec] = {}
        boundary = set(other.boundary)
        for c, col in other.cols.items():
            acc: QVec = {}
            for r, p in col.items():
                if r in self.boundary:
                    boundary.add(c)
                _vec_add(acc, self.column(r), p)
            if acc:
                cols[c] = acc
        return QOperatorMatrix(self.window, cols, frozenset(boundary), f"({self.name})({other.name})")

    def combine(self, other: "QOperatorMatrix", coeff: Poly = qp.ONE) -> "QOperatorMatrix":
        """``self + coeff * other``."""
        cols = {c: dict(v) for c, v in self.cols.items()}
        for c, col in other.cols.items():
            acc = cols.setdefault(c, {})
            _vec_add(acc, col, coeff)
            if not acc:
                del cols[c]
        return QOperatorMatrix(self.window, cols, self.boundary | other.boundary, f"{self.name}+{other.name}")

    def to_json(self) -> dict:
        basis = q_basis(self.window)
        index = {w: i for i, w in enumerate(basis)}
        ents = sorted(((index[r], index[c], list(p)) for (r, c), p in self.entries().items()))
        return {
            "window": self.window.to_dict(),
            "name": self.name,
            "rows": [list(w) for w in basis],
            "boundary": sorted(index[c] for c in self.boundary),
            "entries": [[r, c, p] for r, c, p in ents],
        }


def _q_from_fn(window: TruncationWindow, fn: Callable[[QWord], QVec], name: str) -> QOperatorMatrix:
    cols: Dict[QWord, QVec] = {}
    boundary = set()
    for w in q_basis(window):
        img = fn(w)
        if any(len(r) > window.cap or any(not window.lo <= x <= window.hi for x in r) for r in img):
            boundary.add(w)
            continue
        if img:
            cols[w] = img
    return QOperatorMatrix(window, cols, frozenset(boundary), name)


def q_identity(window: TruncationWindow) -> QOperatorMatrix:
    return _q_from_fn(window, lambda w: {w: qp.ONE}, "I")


def q_operator(letter: Letter, window: TruncationWindow) -> QOperatorMatrix:
    if letter.site not in window.sites:
        raise ValueError(f"site {letter.site} outside window [{window.lo}, {window.hi}]")
    name = f"l{letter.site}" + ("+" if letter.dagger else "")
    return _q_from_fn(window, lambda w: q_act(letter, w), name)


def s_j(site: int, window: TruncationWindow) -> QOperatorMatrix:
    """The self-adjoint generator l_j + l_j^+."""
    op = q_operator(Letter(site, False), window).combine(q_operator(Letter(site, True), window))
    op.name = f"s{site}"
    return op


# -- relation checks --------------------------------------------------------

def _is_zero(p: Poly, q: Optional[Fraction]) -> bool:
    return not p if q is None else qp.evaluate(p, q) == 0


def q_norm(site: int, window: TruncationWindow, q, gram: Optional[QGram] = None) -> float:
    """Largest q-geometry singular value of the truncated annihilator l_site.

    Solved per multiset class M as the generalized eigenproblem
    L^T G_{M - site} L x = s^2 G_M x.
    """
    q = Fraction(q)
    gram = gram or q_gram(window)
    best = 0.0
    for cls, words in gram.classes.items():
        g = gram.class_matrix(cls, q)
        if np.linalg.eigvalsh(g).min() <= 0:
            raise GramNotPositiveError(f"Gram block {cls} not positive definite at q={q}")
        if site not in cls:
            continue
        target = list(cls)
        target.remove(site)
        tcls = tuple(target)
        tw = gram.classes[tcls]
        tindex = {w: i for i, w in enumerate(tw)}
        lmat = np.zeros((len(tw), len(words)))
        for b, w in enumerate(words):
            for r, p in q_annihilate(site, w).items():
                lmat[tindex[r], b] = float(qp.evaluate(p, q))
        gt = gram.class_matrix(tcls, q)
        a = lmat.T @ gt @ lmat
        top = scipy.linalg.eigh(a, g, eigvals_only=True).max()
        best = max(best, top)
    return sqrt(max(best, 0.0))


def norm_bound(q) -> float:
    q = float(q)
    return 1.0 / sqrt(1.0 - q) if q >= 0 else 1.0


def verify_q_relations(window: TruncationWindow, q_point: Optional[Fraction] = None,
                       norm_points: Optional[Sequence[Fraction]] = None) -> Report:
    """Adjointness, the q-commutation relation and the norm bound.

    With ``q_point`` None the identities are checked as polynomials in q and
    the norm bound at ``norm_points`` (default 1/2 and -1/2); otherwise all
    three are checked at that rational point.
    """
    if window.cap < 2:
        raise ValueError("cap must be at least 2")
    qv = None if q_point is None else Fraction(q_point)
    if qv is not None and not -1 < qv < 1:
        raise ValueError("q must lie in (-1, 1)")
    rep = Report("qfock.relations", {"window": window.to_dict(),
                                     "q": "symbolic" if qv is None else fmt_frac(qv)})
    sites = list(window.sites)
    ann = {j: q_operator(Letter(j, False), window) for j in sites}
    cre = {j: q_operator(Letter(j, True), window) for j in sites}
    gram = q_gram(window)
    ident = q_identity(window)

    # (a) <l_j u, v> = <u, l_j^+ v>.  Both sides vanish unless v lies in the
    # class of u with one j removed, by multiset sparsity of the Gram.
    adj_pairs = 0
    for j in sites:
        for u in q_basis(window):
            if j not in u:
                continue
            rest = list(_cls(u))
            rest.remove(j)
            lu = ann[j].column(u)
            for v in gram.classes[tuple(rest)]:
                if v in cre[j].boundary:
                    continue
                lhs = qp.ZERO
                for r, p in lu.items():
                    lhs = qp.add(lhs, qp.mul(p, gram.entries[(r, v)]))
                rhs = qp.ZERO
                for r, p in cre[j].column(v).items():
                    rhs = qp.add(rhs, qp.mul(p, gram.entries[(u, r)]))
                adj_pairs += 1
                if not _is_zero(qp.sub(lhs, rhs), qv):
                    rep.violate("adjoint", site=j, u=list(u), v=list(v),
                                lhs=list(lhs), rhs=list(rhs))

    # (b) l_i l_j^+ - q l_j^+ l_i = delta_ij I on interior columns.
    rel_cols = 0
    for i in sites:
        for j in sites:
            op = (ann[i] @ cre[j]).combine(cre[j] @ ann[i], qp.neg(qp.Q))
            if i == j:
                op = op.combine(ident, (-1,))
            for c in op.interior():
                rel_cols += 1
                bad = {r: p for r, p in op.column(c).items() if not _is_zero(p, qv)}
                if bad:
                    rep.violate("qcommutation", i=i, j=j, column=list(c),
                                residual={" ".join(map(str, r)): list(p) for r, p in bad.items()})

    # (c) norm of l_j in the q-geometry.
    points = [qv] if qv is not None else [Fraction(x) for x in (norm_points or (Fraction(1, 2), Fraction(-1, 2)))]
    norms = []
    for qn in points:
        bound = norm_bound(qn)
        worst = 0.0
        for j in sites:
            nj = q_norm(j, window, qn, gram)
            worst = max(worst, nj)
            if nj > bound + NORM_TOL:
                rep.violate("normBound", site=j, q=fmt_frac(qn), norm=nj, bound=bound)
        norms.append({"q": fmt_frac(qn), "maxNorm": worst, "bound": bound})
    rep.payload = {"adjointPairs": adj_pairs, "relationColumns": rel_cols, "norms": norms}
    return rep


# -- Wick ordering ----------------------------------------------------------

def is_wick_ordered(word: Sequence[Letter]) -> bool:
    seen_ann = False
    for x in word:
        if x.dagger and seen_ann:
            return False
        seen_ann = seen_ann or not x.dagger
    return True


@dataclass
class WickExpression:
    terms: Dict[Word, Poly] = field(default_factory=dict)
    identity: Poly = qp.ZERO

    def __post_init__(self):
        bad = [w for w in self.terms if not is_wick_ordered(w)]
        if bad:
            raise ValueError(f"not Wick ordered: {bad[0]}")

    def __eq__(self, other) -> bool:
        return isinstance(other, WickExpression) and self.terms == other.terms and self.identity == other.identity

    def at(self, q) -> Tuple[Dict[Word, Fraction], Fraction]:
        return ({w: qp.evaluate(p, q) for w, p in self.terms.items()}, qp.evaluate(self.identity, q))

    def to_json(self) -> dict:
        keys = sorted(self.terms, key=lambda w: (len(w), [(not x.dagger, x.site) for x in w]))
        return {
            "terms": [{"word": [x.token() for x in w], "coeff": list(self.terms[w])} for w in keys],
            "identity": list(self.identity),
        }


def _redexes(word: Word) -> List[int]:
    return [k for k in range(len(word) - 1) if not word[k].dagger and word[k + 1].dagger]


def wick_normal_form(word: Sequence[Letter], rng: Optional[random.Random] = None) -> WickExpression:
    """Rewrite with l_i l_j^+ -> q l_j^+ l_i + delta_ij.

    The leftmost redex is used unless ``rng`` is given, in which case the
    rewrite position is drawn at random at every step.
    """
    pending: Dict[Word, Poly] = {tuple(word): qp.ONE}
    done: Dict[Word, Poly] = {}
    while pending:
        w, c = pending.popitem()
        red = _redexes(w)
        if not red:
            nv = qp.add(done.get(w, qp.ZERO), c)
            if nv:
                done[w] = nv
            else:
                done.pop(w, None)
            continue
        k = rng.choice(red) if rng is not None else red[0]
        a, b = w[k], w[k + 1]
        swapped = w[:k] + (b, a) + w[k + 2:]
        out = [(swapped, qp.shift(c))]
        if a.site == b.site:
            out.append((w[:k] + w[k + 2:], c))
        for nw, nc in out:
            nv = qp.add(pending.get(nw, qp.ZERO), nc)
            if nv:
                pending[nw] = nv
            else:
                pending.pop(nw, None)
    ident = done.pop((), qp.ZERO)
    return WickExpression(done, ident)


@lru_cache(maxsize=1 << 20)
def _moment(word: Word) -> Poly:
    if not word:
        return qp.ONE
    # A creator on the far left or an annihilator on the far right survives
    # every rewrite, so such branches carry no identity component.
    if word[0].dagger or not word[-1].dagger:
        return qp.ZERO
    k = _redexes(word)[0]
    a, b = word[k], word[k + 1]
    acc = qp.shift(_moment(word[:k] + (b, a) + word[k + 2:]))
    if a.site == b.site:
        acc = qp.add(acc, _moment(word[:k] + word[k + 2:]))
    return acc


def vacuum_moment(word: Sequence[Letter]) -> Poly:
    """omega_q(W) as a polynomial: the identity part of the Wick form."""
    return _moment(tuple(word))


def vacuum_moment_numeric(word: Sequence[Letter], q) -> Fraction:
    """<W zeta, zeta>_q by direct action at a rational q on the window
    spanned by the word's sites with cap equal to the word length."""
    q = Fraction(q)
    if not word:
        return Fraction(1)
    sites = [x.site for x in word]
    window = TruncationWindow(min(sites), max(sites), len(word))
    cur: Dict[QWord, Fraction] = {(): Fraction(1)}
    for letter in reversed(word):
        nxt: Dict[QWord, Fraction] = defaultdict(Fraction)
        for w, c in cur.items():
            for r, p in q_act(letter, w).items():
                if not window.contains(r):
                    raise AssertionError("truncation reached")  # cap = len(word) makes this impossible
                nxt[r] += c * qp.evaluate(p, q)
        cur = {r: c for r, c in nxt.items() if c}
    return cur.get((), Fraction(0)) * qp.evaluate(gram_entry((), ()), q)


# -- invariance ---------------------------------------------------------------

@dataclass(frozen=True)
class SiteMap:
    kind: str  # "permutation" | "increasing" | "shift"
    fn: Callable[[int], int]
    label: str

    @classmethod
    def permutation(cls, sigma: PermutationSpec) -> "SiteMap":
        return cls("permutation", sigma, f"perm{list(sigma.images)}")

    @classmethod
    def increasing(cls, fn: Union[Callable[[int], int], Dict[int, int]], label: str = "g") -> "SiteMap":
        if isinstance(fn, dict):
            table = dict(fn)

            def g(i: int) -> int:
                if i not in table:
                    raise ValueError(f"map undefined at site {i}")
                return table[i]
            return cls("increasing", g, label)
        return cls("increasing", fn, label)

    @classmethod
    def shift(cls, k: int) -> "SiteMap":
        return cls("shift", lambda i: i + k, f"shift{k}")

    def apply(self, word: Sequence[Letter]) -> Word:
        sites = sorted({x.site for x in word})
        images = [self.fn(i) for i in sites]
        if self.kind == "increasing" and any(a >= b for a, b in zip(images, images[1:])):
            raise ValueError(f"{self.label} is not strictly increasing on {sites}")
        table = dict(zip(sites, images))
        return tuple(Letter(table[x.site], x.dagger) for x in word)


def invariance_check(word: Sequence[Letter], transform: SiteMap) -> Report:
    moved = transform.apply(word)
    a, b = vacuum_moment(word), vacuum_moment(moved)
    rep = Report("qfock.invariance", {"word": [x.token() for x in word], "transform": transform.label})
    rep.payload = {"moment": list(a), "transformedMoment": list(b),
                   "transformedWord": [x.token() for x in moved]}
    if a != b:
        rep.violate("momentInvariance", moment=list(a), transformed=list(b))
    return rep


# -- tail vanishing -----------------------------------------------------------

def wick_words(sites: Sequence[int], max_len: int, min_len: int = 1) -> Iterable[Word]:
    for n in range(min_len, max_len + 1):
        for c in range(n + 1):
            for cs in itertools.product(sites, repeat=c):
                for ds in itertools.product(sites, repeat=n - c):
                    yield tuple(Letter(s, True) for s in cs) + tuple(Letter(s, False) for s in ds)


def tail_vanishing_probe(n0: int, max_len: int, window: TruncationWindow) -> Report:
    """<W eta_i, eta_j>_q for Wick words W far out and eta_i, eta_j near the origin.

    ``window.cap`` bounds the length of eta_i and eta_j; W acts exactly.
    Pairs whose multiset classes differ vanish by the Gram's multiset
    sparsity and are counted without evaluation.
    """
    if not (window.hi > n0 and window.lo < -n0):
        raise ValueError("window must extend beyond [-N0, N0] on both sides")
    rep = Report("qfock.tail_probe", {"N0": n0, "maxLen": max_len, "window": window.to_dict()})
    far = [p for p in window.sites if abs(p) > n0]
    near = TruncationWindow(-n0, n0, window.cap)
    etas = q_basis(near)
    by_cls: Dict[QWord, List[QWord]] = defaultdict(list)
    for e in etas:
        by_cls[_cls(e)].append(e)
    words = evaluated = 0
    for w in wick_words(far, max_len):
        words += 1
        for ei in etas:
            img = apply_q_word(w, {ei: qp.ONE})
            for cls in {_cls(r) for r in img}:
                for ej in by_cls.get(cls, ()):
                    evaluated += 1
                    val = q_inner(img, {ej: qp.ONE})
                    if val:
                        rep.violate("tailVanishing", word=[x.token() for x in w],
                                    eta_i=list(ei), eta_j=list(ej), value=list(val))
    rep.payload = {"wickWords": words, "etaVectors": len(etas),
                   "pairs": words * len(etas) ** 2, "evaluatedPairs": evaluated}
    return rep


# -- symmetry implementors ----------------------------------------------------

def u_sigma(sigma: PermutationSpec, window: TruncationWindow) -> QOperatorMatrix:
    return _q_from_fn(window, lambda w: {tuple(sigma(i) for i in w): qp.ONE},
                      f"U{list(sigma.support)}")


def u_tau(window: TruncationWindow) -> QOperatorMatrix:
    return _q_from_fn(window, lambda w: {tuple(i + 1 for i in w): qp.ONE}, "Utau")


def level_projection(n: int, window: TruncationWindow) -> QOperatorMatrix:
    return _q_from_fn(window, lambda w: {w: qp.ONE} if len(w) == n else {}, f"P{n}")


@dataclass
class SymmetryImplementors:
    u_sigma: Dict[Tuple[int, int], QOperatorMatrix]
    u_tau: QOperatorMatrix
    projections: Dict[int, QOperatorMatrix]
    witness: QVec
    report: Report


def symmetry_witness(i: int = 1, j: int = 2, vector: QWord = (1,)) -> QVec:
    """(U_tau U_sigma - U_sigma U_tau) applied to a basis word, sigma = (i j)."""
    sigma = PermutationSpec.transposition(i, j)

    def us(w):
        return tuple(sigma(x) for x in w)

    def ut(w):
        return tuple(x + 1 for x in w)
    out: QVec = {}
    _vec_add(out, {ut(us(vector)): qp.ONE})
    _vec_add(out, {us(ut(vector)): qp.ONE}, (-1,))
    return out


def symmetry_implementors(window: TruncationWindow, lambdas: Optional[Sequence[int]] = None) -> SymmetryImplementors:
    rep = Report("qfock.implementors", {"window": window.to_dict()})
    lambdas = list(lambdas) if lambdas is not None else [n + 1 for n in range(window.cap + 1)]
    gram = q_gram(window)
    gens = {}
    for i in range(window.lo, window.hi):
        sigma = PermutationSpec.transposition(i, i + 1)
        gens[(i, i + 1)] = (sigma, u_sigma(sigma, window))
    proj = {n: level_projection(n, window) for n in range(window.cap + 1)}
    weighted = QOperatorMatrix(window, {})
    for n, p in proj.items():
        weighted = weighted.combine(p, (lambdas[n],) if lambdas[n] else qp.ZERO)
    for key, (sigma, u) in gens.items():
        # U* G U = G blockwise: G(sigma u, sigma v) = G(u, v).
        for (a, b), p in gram.entries.items():
            sa, sb = tuple(sigma(x) for x in a), tuple(sigma(x) for x in b)
            if gram.entries.get((sa, sb), qp.ZERO) != p:
                rep.violate("gramPreserved", sigma=list(key), u=list(a), v=list(b))
        comm = (weighted @ u).combine(u @ weighted, (-1,))
        for c in comm.interior():
            if comm.column(c):
                rep.violate("levelCommutation", sigma=list(key), column=list(c))
    witness = symmetry_witness()
    if not witness:
        rep.violate("commutatorWitness", detail="commutator vanished on e_1")
    rep.payload = {
        "generators": [list(k) for k in gens],
        "lambdas": lambdas,
        "witness": {"vector": [1], "image": [{"word": list(w), "coeff": list(c)} for w, c in sorted(witness.items())]},
    }
    return SymmetryImplementors({k: u for k, (s, u) in gens.items()}, u_tau(window), proj, witness, rep)
