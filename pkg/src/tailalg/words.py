"""Symbolic *-algebra of monotone words.

Elements are finite combinations of words in the letters ``a_i`` / ``a_i^+``.
:func:`normal_form` rewrites them onto the Hamel basis made of the identity,
the lambda-forms ``a_{i1}^+ ... a_{im}^+ a_{j1} ... a_{jn}`` (creators
increasing, annihilators decreasing, ``a_i^+ a_i`` excluded) and the
length-two pi-forms ``a_k a_k^+``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from . import fock
from .fock import VACUUM, Letter, TruncationWindow, Word
from .rational import fmt_frac, nullspace, solve_combination
from .report import Report


class ReductionError(RuntimeError):
    """The rewriting left a term that is not a Hamel basis label."""


@dataclass
class WordExpression:
    terms: Dict[Word, Fraction] = field(default_factory=dict)
    identity: Fraction = Fraction(0)

    def __post_init__(self):
        self.identity = Fraction(self.identity)
        terms: Dict[Word, Fraction] = {}
        for w, c in self.terms.items():
            w = tuple(w)
            c = Fraction(c)
            if not w:
                self.identity += c
            elif c:
                terms[w] = terms.get(w, 0) + c
        self.terms = {w: c for w, c in terms.items() if c}

    @classmethod
    def word(cls, letters: Iterable[Letter], coeff=1) -> "WordExpression":
        return cls({tuple(letters): Fraction(coeff)})

    @classmethod
    def scalar(cls, c) -> "WordExpression":
        return cls({}, Fraction(c))

    def __add__(self, other: "WordExpression") -> "WordExpression":
        terms = dict(self.terms)
        for w, c in other.terms.items():
            terms[w] = terms.get(w, 0) + c
        return WordExpression(terms, self.identity + other.identity)

    def __sub__(self, other: "WordExpression") -> "WordExpression":
        return self + other.scale(-1)

    def scale(self, a) -> "WordExpression":
        a = Fraction(a)
        return WordExpression({w: a * c for w, c in self.terms.items()}, a * self.identity)

    def __mul__(self, other: "WordExpression") -> "WordExpression":
        left = dict(self.terms)
        right = dict(other.terms)
        if self.identity:
            left[()] = self.identity
        if other.identity:
            right[()] = other.identity
        out: Dict[Word, Fraction] = {}
        for (u, a), (v, b) in itertools.product(left.items(), right.items()):
            out[u + v] = out.get(u + v, 0) + a * b
        return WordExpression(out)

    def adjoint(self) -> "WordExpression":
        return WordExpression({fock.word_adjoint(w): c for w, c in self.terms.items()}, self.identity)

    @property
    def sites(self) -> List[int]:
        return sorted({x.site for w in self.terms for x in w})


class HamelLabel(NamedTuple):
    """``lambda1`` creators (increasing), ``lambda2`` annihilators in word order
    (decreasing).  ``pi`` marks ``a_k a_k^+`` with lambda1 = lambda2 = (k,)."""

    lambda1: Tuple[int, ...]
    lambda2: Tuple[int, ...]
    pi: bool = False

    def word(self) -> Word:
        if self.pi:
            k = self.lambda1[0]
            return (Letter(k, False), Letter(k, True))
        return tuple(Letter(i, True) for i in self.lambda1) + tuple(Letter(j, False) for j in self.lambda2)

    @property
    def length(self) -> int:
        return len(self.lambda1) + len(self.lambda2)

    @property
    def sites(self) -> set:
        return set(self.lambda1) | set(self.lambda2)

    def is_valid(self) -> bool:
        l1, l2 = self.lambda1, self.lambda2
        if self.pi:
            return len(l1) == 1 and l1 == l2
        if any(a >= b for a, b in zip(l1, l1[1:])) or any(a <= b for a, b in zip(l2, l2[1:])):
            return False
        return not (len(l1) == 1 and len(l2) == 1 and l1 == l2)

    def adjoint(self) -> "HamelLabel":
        if self.pi:
            return self
        return HamelLabel(tuple(reversed(self.lambda2)), tuple(reversed(self.lambda1)))

    def sort_key(self):
        return (self.length, self.pi, self.lambda1, self.lambda2)

    def to_dict(self) -> dict:
        return {"lambda1": list(self.lambda1), "lambda2": list(self.lambda2), "pi": self.pi}


IDENTITY = HamelLabel((), ())


def pi_label(k: int) -> HamelLabel:
    return HamelLabel((k,), (k,), True)


@dataclass
class HamelCoords:
    identity: Fraction = Fraction(0)
    coeffs: Dict[HamelLabel, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.identity = Fraction(self.identity)
        self.coeffs = {k: Fraction(v) for k, v in self.coeffs.items() if v}
        for k in self.coeffs:
            if k == IDENTITY or not k.is_valid():
                raise ReductionError(f"invalid Hamel label {k}")

    @classmethod
    def from_flat(cls, flat: Dict[HamelLabel, Fraction]) -> "HamelCoords":
        flat = dict(flat)
        ident = flat.pop(IDENTITY, Fraction(0))
        return cls(ident, flat)

    def flat(self) -> Dict[HamelLabel, Fraction]:
        out = dict(self.coeffs)
        if self.identity:
            out[IDENTITY] = self.identity
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, HamelCoords) and self.flat() == other.flat()

    def __add__(self, other: "HamelCoords") -> "HamelCoords":
        return HamelCoords.from_flat(_add_flat(self.flat(), other.flat(), 1))

    def scale(self, a) -> "HamelCoords":
        a = Fraction(a)
        return HamelCoords.from_flat({k: a * v for k, v in self.flat().items()})

    def adjoint(self) -> "HamelCoords":
        return HamelCoords(self.identity, {k.adjoint(): v for k, v in self.coeffs.items()})

    def decode(self) -> WordExpression:
        return WordExpression({k.word(): v for k, v in self.coeffs.items()}, self.identity)

    def to_json(self) -> dict:
        return {
            "identity": fmt_frac(self.identity),
            "terms": [
                {**k.to_dict(), "c": fmt_frac(v)}
                for k, v in sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())
            ],
        }


def _add_flat(a: dict, b: dict, sign) -> dict:
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0) + sign * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


# -- rewriting ---------------------------------------------------------------

def _pair_vanishes(x: Letter, y: Letter) -> bool:
    if x.dagger and y.dagger:
        return x.site >= y.site
    if not x.dagger and not y.dagger:
        return x.site <= y.site
    if not x.dagger and y.dagger:
        return x.site != y.site
    return False


def _sum_range(word: Word, pos: int, k: int) -> List[int]:
    """Sites ``l <= k`` whose term survives in ``X a_l^+ a_l Y`` when the
    factor ``a_k a_k^+`` at ``pos`` is expanded."""
    if pos + 2 < len(word):
        y = word[pos + 2]
        if y.dagger:
            return [y.site] if y.site <= k else []
        return list(range(y.site + 1, k + 1))
    x = word[pos - 1]
    if x.dagger:
        return list(range(x.site + 1, k + 1))
    return [x.site] if x.site <= k else []


@lru_cache(maxsize=200_000)
def _reduce_word(word: Word) -> Tuple[Tuple[HamelLabel, Fraction], ...]:
    for x, y in zip(word, word[1:]):
        if _pair_vanishes(x, y):
            return ()
    if not word:
        return ((IDENTITY, Fraction(1)),)
    for pos in range(len(word) - 1):
        x, y = word[pos], word[pos + 1]
        if not x.dagger and y.dagger:
            k = x.site  # x.site == y.site, otherwise the pair vanished
            if len(word) == 2:
                return ((pi_label(k), Fraction(1)),)
            # X a_k a_k^+ Y = X Y - sum_{l <= k} X a_l^+ a_l Y, the sum being finite here
            acc: Dict[HamelLabel, Fraction] = dict(_reduce_word(word[:pos] + word[pos + 2:]))
            for l in _sum_range(word, pos, k):
                sub = word[:pos] + (Letter(l, True), Letter(l, False)) + word[pos + 2:]
                acc = _add_flat(acc, dict(_reduce_word(sub)), -1)
            return tuple(acc.items())
    # creators strictly increasing, then annihilators strictly decreasing
    l1 = tuple(x.site for x in word if x.dagger)
    l2 = tuple(x.site for x in word if not x.dagger)
    if len(l1) == 1 and len(l2) == 1 and l1 == l2:
        i = l1[0]
        return ((pi_label(i - 1), Fraction(1)), (pi_label(i), Fraction(-1)))
    return ((HamelLabel(l1, l2), Fraction(1)),)


def normal_form(expr: WordExpression) -> HamelCoords:
    acc: Dict[HamelLabel, Fraction] = {}
    if expr.identity:
        acc[IDENTITY] = expr.identity
    for w, c in expr.terms.items():
        for label, v in _reduce_word(tuple(w)):
            acc = _add_flat(acc, {label: c * v}, 1)
    out = HamelCoords.from_flat(acc)
    for k in out.coeffs:
        if not k.is_valid():
            raise ReductionError(f"rewriting left non-basis term {k}")
    return out


def column_mismatches(lhs: WordExpression, rhs: WordExpression) -> List[tuple]:
    """Basis columns on which two expressions act differently.

    The columns are all tuples over the sites of both sides widened by 1 and
    of length up to the longest word; a word of length L only inspects the
    first L + 1 indices of a tuple, so this set covers every order pattern.
    Images are computed with the untruncated action, hence exactly.
    """
    sites = sorted(set(lhs.sites) | set(rhs.sites))
    if not sites:
        return [] if lhs.identity == rhs.identity else [VACUUM]
    cap = max([len(w) for w in lhs.terms] + [len(w) for w in rhs.terms])
    window = TruncationWindow(sites[0] - 1, sites[-1] + 1, cap)
    bad = []
    for t in fock.enumerate_monotone_basis(window):
        if _act_expr(lhs, t) != _act_expr(rhs, t):
            bad.append(t)
    return bad


def _act_expr(expr: WordExpression, t) -> dict:
    out = {t: expr.identity} if expr.identity else {}
    for w, c in expr.terms.items():
        for r, x in fock.apply_word(w, {t: Fraction(1)}).items():
            nv = out.get(r, 0) + c * x
            if nv:
                out[r] = nv
            else:
                out.pop(r, None)
    return out


def reconstructs(expr: WordExpression) -> bool:
    return not column_mismatches(expr, normal_form(expr).decode())


# -- permutations ------------------------------------------------------------

@dataclass(frozen=True)
class PermutationSpec:
    """Finite permutation of the integers; identity off ``images``' keys."""

    images: Tuple[Tuple[int, int], ...] = ()

    def __post_init__(self):
        m = dict(self.images)
        if sorted(m) != sorted(m.values()):
            raise ValueError("permutation must be a bijection on its support")
        object.__setattr__(self, "images", tuple(sorted((k, v) for k, v in m.items() if k != v)))

    @classmethod
    def from_mapping(cls, mapping: Dict[int, int]) -> "PermutationSpec":
        return cls(tuple(mapping.items()))

    @classmethod
    def transposition(cls, i: int, j: int) -> "PermutationSpec":
        return cls(((i, j), (j, i)))

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(k for k, _ in self.images)

    def __call__(self, i: int) -> int:
        return dict(self.images).get(i, i)

    def inverse(self) -> "PermutationSpec":
        return PermutationSpec(tuple((v, k) for k, v in self.images))

    def preserves_order(self, ordered: Sequence[int]) -> bool:
        """True when the relative order of ``ordered`` survives (either direction)."""
        imgs = [self(i) for i in ordered]
        return all((a < b) == (x < y) for (a, b), (x, y) in zip(zip(ordered, ordered[1:]), zip(imgs, imgs[1:])))


def tsigma_label(label: HamelLabel, sigma: PermutationSpec) -> Optional[HamelLabel]:
    if not (sigma.preserves_order(label.lambda1) and sigma.preserves_order(label.lambda2)):
        return None
    return HamelLabel(tuple(sigma(i) for i in label.lambda1), tuple(sigma(j) for j in label.lambda2), label.pi)


def apply_tsigma(coords: HamelCoords, sigma: PermutationSpec) -> HamelCoords:
    out: Dict[HamelLabel, Fraction] = {}
    for k, v in coords.coeffs.items():
        img = tsigma_label(k, sigma)
        if img is not None:
            out[img] = out.get(img, 0) + v
    return HamelCoords(coords.identity, out)


# -- states and conditional expectation ---------------------------------------

@dataclass(frozen=True)
class StateSpec:
    """``gamma * omega + (1 - gamma) * omega_infinity``."""

    gamma: Fraction = Fraction(1)

    def __post_init__(self):
        g = Fraction(self.gamma)
        if not 0 <= g <= 1:
            raise ValueError(f"gamma must lie in [0, 1], got {g}")
        object.__setattr__(self, "gamma", g)


def vacuum_value(coords: HamelCoords) -> Fraction:
    # omega is 1 on pi-forms and vanishes on lambda-forms of positive length
    return coords.identity + sum((v for k, v in coords.coeffs.items() if k.pi), Fraction(0))


def evaluate_state(coords: HamelCoords, state: StateSpec) -> Fraction:
    g = state.gamma
    return g * vacuum_value(coords) + (1 - g) * coords.identity


def iota_embed(a11, a12, a21, a22, beta, j: int) -> WordExpression:
    """Image of ``[[a11, a12], [a21, a22]] + beta`` at site ``j``.

    The tail sum ``sum_{k<j} a_k^+ a_k`` is written as ``I - a_{j-1} a_{j-1}^+``.
    """
    A, C = Letter(j, False), Letter(j, True)
    Am, Cm = Letter(j - 1, False), Letter(j - 1, True)
    return WordExpression(
        {(A, C): a11, (A,): a12, (C,): a21, (C, A): a22, (Am, Cm): -Fraction(beta)},
        Fraction(beta),
    )


@dataclass(frozen=True)
class TailElement:
    """``c_zeta P_zeta + c_perp P_zeta^perp``."""

    c_zeta: Fraction
    c_perp: Fraction

    def __mul__(self, other: "TailElement") -> "TailElement":
        return TailElement(self.c_zeta * other.c_zeta, self.c_perp * other.c_perp)

    def __add__(self, other: "TailElement") -> "TailElement":
        return TailElement(self.c_zeta + other.c_zeta, self.c_perp + other.c_perp)

    def vector_state(self, gamma) -> Fraction:
        """``<E xi_phi, xi_phi>`` for ``xi_phi`` carrying weights (gamma, 1 - gamma)."""
        g = Fraction(gamma)
        return g * self.c_zeta + (1 - g) * self.c_perp


P_ZETA = TailElement(Fraction(1), Fraction(0))
P_PERP = TailElement(Fraction(0), Fraction(1))
TAIL_ONE = TailElement(Fraction(1), Fraction(1))

PSI_NOTE = "psi=omega-infinity (canonical)"


def conditional_expectation(coords: HamelCoords) -> TailElement:
    """``E(X) = omega(X) P_zeta + psi(P^perp X P^perp) P^perp`` with psi = omega_infinity.

    psi kills the span of positive-length words and all finite-rank terms,
    leaving the identity coefficient.
    """
    return TailElement(vacuum_value(coords), coords.identity)


# -- de Finetti factorization -------------------------------------------------

@dataclass
class TailedExpr:
    """``left * expr * right`` with optional tail projections ``"zeta"`` / ``"perp"``."""

    expr: WordExpression
    left: Optional[str] = None
    right: Optional[str] = None

    def expectation(self) -> TailElement:
        e = conditional_expectation(normal_form(self.expr))
        return _tail(self.left) * e * _tail(self.right)

    def apply(self, vec: dict, cap: int) -> dict:
        v = _project(vec, self.right)
        v = _apply_expr(self.expr, v, cap)
        return _project(v, self.left)


def _tail(kind: Optional[str]) -> TailElement:
    return {None: TAIL_ONE, "zeta": P_ZETA, "perp": P_PERP}[kind]


def _project(vec: dict, kind: Optional[str]) -> dict:
    if kind is None:
        return vec
    if kind == "zeta":
        return {VACUUM: vec[VACUUM]} if vec.get(VACUUM) else {}
    return {k: v for k, v in vec.items() if k != VACUUM}


def _apply_expr(expr: WordExpression, vec: dict, cap: int) -> dict:
    out = {k: expr.identity * v for k, v in vec.items()} if expr.identity else {}
    for w, c in expr.terms.items():
        for r, x in fock.apply_word(w, vec, cap=cap).items():
            nv = out.get(r, 0) + c * x
            if nv:
                out[r] = nv
            else:
                out.pop(r, None)
    return out


def factorization_pair(X: TailedExpr, Y: TailedExpr) -> Tuple[Fraction, Fraction]:
    """``(<X Y zeta, zeta>, c_zeta(E X) * c_zeta(E Y))``.

    The left side is evaluated with fock-core matrices on the exactness
    window; the right side only through normal forms and the tail algebra.
    """
    cap = max([len(w) for w in X.expr.terms] + [0]) + max([len(w) for w in Y.expr.terms] + [0])
    v = Y.apply({VACUUM: Fraction(1)}, cap)
    v = X.apply(v, cap)
    lhs = v.get(VACUUM, Fraction(0))
    rhs = X.expectation().c_zeta * Y.expectation().c_zeta
    return lhs, rhs


def _rand_frac(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-3, 3), rng.randint(1, 3))


def _random_iota(rng: random.Random, sites: Sequence[int]) -> WordExpression:
    return iota_embed(*(_rand_frac(rng) for _ in range(5)), rng.choice(sites))


def _random_tailed(rng: random.Random, sites: Sequence[int]) -> TailedExpr:
    expr = WordExpression.scalar(1)
    for _ in range(rng.randint(1, 3)):
        expr = expr * _random_iota(rng, sites)
    tails = [None, None, "zeta", "perp"]
    return TailedExpr(expr, rng.choice(tails), rng.choice(tails))


def definetti_factorization_check(H: Sequence[int], J: Sequence[int], samples: int = 200, seed: int = 0,
                                  distribution_samples: int = 50) -> Report:
    H, J = sorted(set(H)), sorted(set(J))
    if set(H) & set(J):
        raise ValueError(f"index sets overlap: {sorted(set(H) & set(J))}")
    rep = Report("definetti_factorization_check",
                 {"H": H, "J": J, "samples": samples, "distributionSamples": distribution_samples}, seed=seed)
    rng = random.Random(seed)
    nonzero = 0
    for s in range(samples):
        X, Y = _random_tailed(rng, H), _random_tailed(rng, J)
        lhs, rhs = factorization_pair(X, Y)
        nonzero += bool(lhs)
        if lhs != rhs:
            rep.violate("factorization", sample=s, lhs=fmt_frac(lhs), rhs=fmt_frac(rhs))
    for s in range(distribution_samples):
        params = [_rand_frac(rng) for _ in range(5)]
        i, k = rng.choice(H), rng.choice(J)
        ei = conditional_expectation(normal_form(iota_embed(*params, i)))
        ek = conditional_expectation(normal_form(iota_embed(*params, k)))
        if ei != ek:
            rep.violate("identical_distribution", sample=s, i=i, k=k)
    rep.payload = {"pairs": samples, "nonzeroPairs": nonzero, "psi": PSI_NOTE}
    rep.caveats.append(PSI_NOTE)
    return rep


# -- invariant spaces ---------------------------------------------------------

def hamel_labels(sites: Sequence[int], max_len: int) -> List[HamelLabel]:
    """Identity, pi-forms and lambda-forms over ``sites`` of length <= max_len."""
    sites = sorted(sites)
    out = [IDENTITY]
    if max_len >= 2:
        out.extend(pi_label(k) for k in sites)
    for m in range(max_len + 1):
        for n in range(max_len + 1 - m):
            if m + n == 0:
                continue
            for l1 in itertools.combinations(sites, m):
                for l2 in itertools.combinations(sites, n):
                    label = HamelLabel(l1, tuple(reversed(l2)))
                    if label.is_valid():
                        out.append(label)
    return sorted(out, key=HamelLabel.sort_key)


def adjacent_transpositions(lo: int, hi: int) -> List[PermutationSpec]:
    return [PermutationSpec.transposition(s, s + 1) for s in range(lo, hi)]


def fixed_elements(max_len: int, lo: int, hi: int, room: Optional[int] = None) -> List[HamelCoords]:
    """Basis of ``{X : T_sigma X = X}`` over labels with sites in [lo, hi].

    sigma ranges over adjacent transpositions of [lo, hi + room]; ``room``
    defaults to the window width so a label can be moved off its own sites.
    """
    room = (hi - lo + 1) if room is None else room
    labels = hamel_labels(range(lo, hi + 1), max_len)
    eqs = []
    for sigma in adjacent_transpositions(lo, hi + room):
        rows: Dict[HamelLabel, Dict[int, Fraction]] = {}
        for i, k in enumerate(labels):
            img = tsigma_label(k, sigma)
            if img is not None:
                row = rows.setdefault(img, {})
                row[i] = row.get(i, 0) + 1
            row = rows.setdefault(k, {})
            row[i] = row.get(i, 0) - 1
        eqs.extend({i: v for i, v in r.items() if v} for r in rows.values())
    return [HamelCoords.from_flat({labels[i]: v for i, v in vec.items()})
            for vec in nullspace(eqs, len(labels))]


def invariant_functionals(max_len: int, lo: int, hi: int) -> Tuple[List[HamelLabel], List[Dict[int, Fraction]]]:
    """Labels over [lo, hi] and a basis of the functionals with ``phi o T_sigma = phi``."""
    labels = hamel_labels(range(lo, hi + 1), max_len)
    index = {k: i for i, k in enumerate(labels)}
    eqs = []
    for sigma in adjacent_transpositions(lo, hi):
        for k, i in index.items():
            img = tsigma_label(k, sigma)
            row = {i: Fraction(-1)}
            if img is not None:
                row[index[img]] = row.get(index[img], 0) + 1
            row = {a: b for a, b in row.items() if b}
            if row:
                eqs.append(row)
    return labels, nullspace(eqs, len(labels))


def omega_functional(labels: List[HamelLabel]) -> Dict[int, Fraction]:
    return {i: Fraction(1) for i, k in enumerate(labels) if k == IDENTITY or k.pi}


def omega_infinity_functional(labels: List[HamelLabel]) -> Dict[int, Fraction]:
    return {labels.index(IDENTITY): Fraction(1)}


def invariant_space_dim(mode: str, max_len: int, lo: int, hi: int, room: Optional[int] = None) -> Report:
    """Report wrapper around :func:`fixed_elements` / :func:`invariant_functionals`.

    For ``symmetric_moments`` the payload says whether omega and
    omega_infinity lie in the solution space and whether they span it.
    """
    inputs = {"mode": mode, "maxLen": max_len, "window": [lo, hi]}
    rep = Report("invariant_space_dim", inputs)
    if mode == "exchangeable_elements":
        inputs["room"] = (hi - lo + 1) if room is None else room
        basis = fixed_elements(max_len, lo, hi, room)
        rep.payload = {"dimension": len(basis), "basis": [c.to_json() for c in basis]}
        return rep
    if mode == "symmetric_moments":
        labels, basis = invariant_functionals(max_len, lo, hi)
        pair = [omega_functional(labels), omega_infinity_functional(labels)]
        rep.payload = {
            "dimension": len(basis),
            "labels": len(labels),
            "omegaInSpace": solve_combination(basis, pair[0]) is not None,
            "omegaInfinityInSpace": solve_combination(basis, pair[1]) is not None,
            "spannedByOmegaPair": all(solve_combination(pair, v) is not None for v in basis),
            "representatives": [_functional_json(labels, vec) for vec in basis],
        }
        return rep
    raise ValueError(f"unknown mode {mode!r}")


def _functional_json(labels: List[HamelLabel], vec: Dict[int, Fraction]) -> List[dict]:
    return [{**labels[i].to_dict(), "value": fmt_frac(v)} for i, v in sorted(vec.items())]


# -- sampling -----------------------------------------------------------------

def random_word(rng: random.Random, sites: Sequence[int], max_len: int, avoid_zero_pairs: bool = True) -> Word:
    """Random word of length 1..max_len.

    With ``avoid_zero_pairs`` each next letter is drawn among those that do
    not form a vanishing adjacent pair with the previous one (when any
    exists); uniform words are almost always zero.
    """
    length = rng.randint(1, max_len)
    letters = [Letter(s, d) for s in sites for d in (False, True)]
    word: List[Letter] = []
    for _ in range(length):
        pool = letters
        if avoid_zero_pairs and word:
            ok = [y for y in letters if not _pair_vanishes(word[-1], y)]
            pool = ok or letters
        word.append(rng.choice(pool))
    return tuple(word)
