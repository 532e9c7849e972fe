"""Discrete monotone Fock space on a finite window of sites.

Basis vectors are strictly increasing integer tuples; ``()`` is the vacuum.
The creator ``a_i^+`` prepends ``i`` when ``i`` is smaller than the first
index, and the annihilator ``a_i`` strips a leading ``i``.  Both send basis
vectors to basis vectors or to zero, so every matrix here is a 0/1 partial
injection stored column-wise with exact rational entries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .rational import fmt_frac
from .report import Report

Tuple_ = Tuple[int, ...]
VACUUM: Tuple_ = ()

DEFAULT_BASIS_LIMIT = 200_000


class CapacityError(ValueError):
    """Raised when a window's basis would exceed the configured limit."""


class Letter(NamedTuple):
    site: int
    dagger: bool

    def adjoint(self) -> "Letter":
        return Letter(self.site, not self.dagger)

    def token(self) -> str:
        return f"{self.site}+" if self.dagger else str(self.site)


Word = Tuple[Letter, ...]


def parse_letter(token: str) -> Letter:
    """Parse ``"3"``, ``"3+"``, ``"-2"``; a leading ``a``/``l`` is accepted."""
    t = token.strip()
    if t[:1] in ("a", "l"):
        t = t[1:]
    dagger = t.endswith("+")
    if dagger:
        t = t[:-1]
    try:
        return Letter(int(t), dagger)
    except ValueError:
        raise ValueError(f"bad letter token {token!r}") from None


def parse_word(tokens: Iterable[str]) -> Word:
    return tuple(parse_letter(t) for t in tokens)


def word_adjoint(word: Sequence[Letter]) -> Word:
    return tuple(x.adjoint() for x in reversed(word))


@dataclass(frozen=True)
class TruncationWindow:
    lo: int
    hi: int
    cap: int

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError(f"window needs lo <= hi, got [{self.lo}, {self.hi}]")
        if self.cap < 0:
            raise ValueError(f"cap must be >= 0, got {self.cap}")

    @property
    def sites(self) -> range:
        return range(self.lo, self.hi + 1)

    @property
    def basis_size(self) -> int:
        n = self.hi - self.lo + 1
        return sum(comb(n, k) for k in range(self.cap + 1))

    def contains(self, t: Tuple_) -> bool:
        return len(t) <= self.cap and all(self.lo <= i <= self.hi for i in t)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "cap": self.cap}


def enumerate_monotone_basis(window: TruncationWindow, limit: int = DEFAULT_BASIS_LIMIT) -> List[Tuple_]:
    """Vacuum first, then by length, then lexicographically."""
    if window.basis_size > limit:
        raise CapacityError(
            f"basis size {window.basis_size} exceeds limit {limit}; shrink the window or cap"
        )
    sites = list(window.sites)
    out: List[Tuple_] = []
    for k in range(window.cap + 1):
        out.extend(itertools.combinations(sites, k))
    return out


def create(site: int, t: Tuple_) -> Optional[Tuple_]:
    if not t or site < t[0]:
        return (site,) + t
    return None


def annihilate(site: int, t: Tuple_) -> Optional[Tuple_]:
    if t and t[0] == site:
        return t[1:]
    return None


def act(letter: Letter, t: Tuple_) -> Optional[Tuple_]:
    return create(letter.site, t) if letter.dagger else annihilate(letter.site, t)


def apply_word(word: Sequence[Letter], vec: Dict[Tuple_, Fraction], cap: Optional[int] = None) -> Dict[Tuple_, Fraction]:
    """Apply a word (rightmost letter first) to a sparse vector.

    With ``cap`` set, intermediate vectors longer than ``cap`` are dropped,
    which is exactly the truncated-matrix product.  Without it the action is
    that of the infinite space.
    """
    cur = dict(vec)
    for letter in reversed(word):
        nxt: Dict[Tuple_, Fraction] = {}
        for t, c in cur.items():
            img = act(letter, t)
            if img is None or (cap is not None and len(img) > cap):
                continue
            nxt[img] = nxt.get(img, 0) + c
        cur = {k: v for k, v in nxt.items() if v}
        if not cur:
            break
    return cur


@dataclass
class SparseOperator:
    """Exact operator on a truncated window, stored column-wise.

    ``boundary`` lists columns whose true image leaves the window; identity
    checks must skip them.
    """

    window: TruncationWindow
    cols: Dict[Tuple_, Dict[Tuple_, Fraction]] = field(default_factory=dict)
    boundary: FrozenSet[Tuple_] = frozenset()
    name: str = ""

    @property
    def entries(self) -> Dict[Tuple[Tuple_, Tuple_], Fraction]:
        return {(r, c): x for c, col in self.cols.items() for r, x in col.items()}

    def column(self, c: Tuple_) -> Dict[Tuple_, Fraction]:
        return self.cols.get(c, {})

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        out: Dict[Tuple_, Dict[Tuple_, Fraction]] = {}
        for c, col in other.cols.items():
            acc: Dict[Tuple_, Fraction] = {}
            for k, x in col.items():
                for r, y in self.cols.get(k, {}).items():
                    acc[r] = acc.get(r, 0) + x * y
            acc = {r: v for r, v in acc.items() if v}
            if acc:
                out[c] = acc
        return SparseOperator(self.window, out, self.boundary | other.boundary)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return _combine(self, other, 1)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return _combine(self, other, -1)

    def scale(self, a) -> "SparseOperator":
        a = Fraction(a)
        if not a:
            return SparseOperator(self.window, {}, self.boundary)
        return SparseOperator(self.window, {c: {r: a * x for r, x in col.items()} for c, col in self.cols.items()}, self.boundary)

    def transpose(self) -> "SparseOperator":
        out: Dict[Tuple_, Dict[Tuple_, Fraction]] = {}
        for c, col in self.cols.items():
            for r, x in col.items():
                out.setdefault(r, {})[c] = x
        return SparseOperator(self.window, out, frozenset(), name=f"{self.name}*" if self.name else "")

    def equal_on(self, other: "SparseOperator", columns: Iterable[Tuple_]) -> List[Tuple_]:
        """Columns (from ``columns``) where the two operators differ."""
        return [c for c in columns if self.column(c) != other.column(c)]

    def to_json(self) -> dict:
        basis = enumerate_monotone_basis(self.window)
        trip = [[list(r), list(c), fmt_frac(x)] for c in basis for r, x in sorted(self.column(c).items(), key=lambda kv: _label_key(kv[0]))]
        return {
            "window": self.window.to_dict(),
            "rows": [list(t) for t in basis],
            "cols": [list(t) for t in basis],
            "entries": trip,
        }


def _label_key(t: Tuple_):
    return (len(t), t)


def _combine(a: SparseOperator, b: SparseOperator, sign: int) -> SparseOperator:
    out = {c: dict(col) for c, col in a.cols.items()}
    for c, col in b.cols.items():
        dst = out.setdefault(c, {})
        for r, x in col.items():
            v = dst.get(r, 0) + sign * x
            if v:
                dst[r] = v
            else:
                dst.pop(r, None)
    return SparseOperator(a.window, {c: col for c, col in out.items() if col}, a.boundary | b.boundary)


def identity_operator(window: TruncationWindow) -> SparseOperator:
    return SparseOperator(window, {t: {t: Fraction(1)} for t in enumerate_monotone_basis(window)}, name="I")


def _from_map(window: TruncationWindow, fn, name: str) -> SparseOperator:
    """Operator sending basis ``t`` to basis ``fn(t)`` (or 0 for None)."""
    cols: Dict[Tuple_, Dict[Tuple_, Fraction]] = {}
    boundary = set()
    for t in enumerate_monotone_basis(window):
        img = fn(t)
        if img is None:
            continue
        if window.contains(img):
            cols[t] = {img: Fraction(1)}
        else:
            boundary.add(t)
    return SparseOperator(window, cols, frozenset(boundary), name=name)


def monotone_operator(letter: Letter, window: TruncationWindow) -> SparseOperator:
    """Matrix of ``a_i`` or ``a_i^+`` on the window; over-cap creations are boundary columns."""
    if not window.lo <= letter.site <= window.hi:
        raise ValueError(f"site {letter.site} outside window [{window.lo}, {window.hi}]")
    return _from_map(window, lambda t: act(letter, t), letter.token())


def word_operator(word: Sequence[Letter], window: TruncationWindow) -> SparseOperator:
    """Truncated matrix of a word, i.e. the product of its letter matrices."""
    out = identity_operator(window)
    for letter in word:
        out = out @ monotone_operator(letter, window)
    return out


def _shift(t: Tuple_) -> Tuple_:
    return tuple(i + 1 for i in t)


def _raise_last(t: Tuple_) -> Tuple_:
    return t[:-1] + (t[-1] + 1,) if t else t


def special_operator(kind: str, window: TruncationWindow, n: Optional[int] = None) -> SparseOperator:
    """``vacuum_projection``, ``shift`` (U), ``last_raise`` (S), ``level_projection``
    (tuples with first index <= n) or ``core_projection`` (tuples meeting [-n, n])."""
    if kind == "vacuum_projection":
        return SparseOperator(window, {VACUUM: {VACUUM: Fraction(1)}}, name="P_zeta")
    if kind in ("shift", "last_raise"):
        if window.hi - window.lo < 1:
            raise ValueError("shift operators need a window with at least two sites")
        fn = _shift if kind == "shift" else _raise_last
        return _from_map(window, fn, "U" if kind == "shift" else "S")
    if kind == "level_projection":
        if n is None:
            raise ValueError("level_projection needs n")
        return _diag(window, lambda t: bool(t) and t[0] <= n, f"P_level({n})")
    if kind == "core_projection":
        if n is None:
            raise ValueError("core_projection needs n")
        return _diag(window, lambda t: any(-n <= i <= n for i in t), f"P_core({n})")
    raise ValueError(f"unknown special operator {kind!r}")


def _diag(window: TruncationWindow, pred, name: str) -> SparseOperator:
    return SparseOperator(window, {t: {t: Fraction(1)} for t in enumerate_monotone_basis(window) if pred(t)}, name=name)


def verify_monotone_relations(window: TruncationWindow) -> Report:
    """Check the monotone relations and adjointness as exact matrix identities.

    Every site of the window is checked.  The identity
    ``a_i a_i^+ = I - sum_{lo <= k <= i} a_k^+ a_k`` is asserted on columns of
    length < cap, where the creator in ``a_i a_i^+`` is not truncated away.
    """
    if window.cap < 2:
        raise ValueError("relation checks need cap >= 2")
    rep = Report("verify_monotone_relations", {"window": window.to_dict()})
    basis = enumerate_monotone_basis(window)
    sites = list(window.sites)
    ann = {i: monotone_operator(Letter(i, False), window) for i in sites}
    cre = {i: monotone_operator(Letter(i, True), window) for i in sites}
    interior = [t for t in basis if len(t) < window.cap]
    ident = identity_operator(window)
    checks = 0
    for i in sites:
        if cre[i].entries != ann[i].transpose().entries:
            rep.violate("adjoint", site=i)
        checks += 1
        for j in sites:
            if i >= j:
                for name, prod in (("cc", cre[i] @ cre[j]), ("aa", ann[j] @ ann[i])):
                    checks += 1
                    if prod.cols:
                        rep.violate(f"zero_{name}", i=i, j=j, columns=[list(c) for c in sorted(prod.cols, key=_label_key)[:3]])
            if i != j:
                checks += 1
                prod = ann[i] @ cre[j]
                if prod.cols:
                    rep.violate("zero_ac", i=i, j=j)
    running = SparseOperator(window)
    for i in sites:
        running = running + (cre[i] @ ann[i])
        rhs = ident - running
        lhs = ann[i] @ cre[i]
        checks += 1
        bad = lhs.equal_on(rhs, interior)
        if bad:
            rep.violate("comrul2", site=i, columns=[list(c) for c in bad[:3]])
    top = ann[window.hi] @ cre[window.hi]
    checks += 1
    if top.entries != special_operator("vacuum_projection", window).entries:
        rep.violate("top_site_is_vacuum_projection", site=window.hi)
    rep.payload = {"checks": checks, "basisSize": len(basis), "interiorColumns": len(interior)}
    rep.caveats.append("comrul2 asserted on columns of length < cap (creation beyond cap is truncated)")
    return rep


def vacuum_window(expr) -> TruncationWindow:
    """Exactness window for a word expression: sites +-1, cap = longest word."""
    sites = [x.site for w in expr.terms for x in w]
    if not sites:
        return TruncationWindow(0, 0, 0)
    cap = max(len(w) for w in expr.terms)
    return TruncationWindow(min(sites) - 1, max(sites) + 1, cap)


def vacuum_expectation_numeric(expr) -> Fraction:
    """``<expr zeta, zeta>`` from truncated matrices on the exactness window.

    Each letter only inserts or removes its own index and a word of length L
    never builds a tuple longer than L from the vacuum, so the truncation is
    exact here.
    """
    window = vacuum_window(expr)
    total = Fraction(expr.identity)
    for word, c in expr.terms.items():
        out = apply_word(word, {VACUUM: Fraction(1)}, cap=window.cap)
        total += c * out.get(VACUUM, 0)
    return total
