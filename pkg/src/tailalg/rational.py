"""Exact rational helpers: canonical serialization and sparse echelon forms.

Vectors are sparse ``dict[int, Fraction]`` keyed by coordinate index.  Zero
entries are never stored.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Iterable, List, Optional

SparseVec = Dict[int, Fraction]


def fmt_frac(x) -> str:
    """Canonical ``"p/q"`` string (q > 0, gcd 1); integers keep ``/1``."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_frac(text: str) -> Fraction:
    text = str(text).strip()
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not an exact rational: {text!r}") from exc


def clean(vec: SparseVec) -> SparseVec:
    return {k: v for k, v in vec.items() if v}


def axpy(y: SparseVec, a: Fraction, x: SparseVec) -> None:
    """In place ``y += a * x``, dropping cancelled entries."""
    for k, v in x.items():
        nv = y.get(k, 0) + a * v
        if nv:
            y[k] = nv
        else:
            y.pop(k, None)


class EchelonBasis:
    """Incrementally maintained row-echelon basis of a subspace of Q^n.

    Each stored row has a distinct pivot (its smallest coordinate).  Rows are
    only semi-reduced while being built; :meth:`rref` returns the canonical
    fully reduced form, which identifies the subspace uniquely.
    """

    def __init__(self, vectors: Iterable[SparseVec] = ()):
        self._rows: Dict[int, SparseVec] = {}
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self._rows)

    def reduce(self, vec: SparseVec) -> SparseVec:
        """Return the remainder of ``vec`` after elimination against the rows."""
        v = dict(vec)
        heap = [k for k in v if k in self._rows]
        heapq.heapify(heap)
        while heap:
            p = heapq.heappop(heap)
            c = v.get(p)
            if not c:
                continue
            row = self._rows[p]
            factor = -c / row[p]
            for k, x in row.items():
                nv = v.get(k, 0) + factor * x
                if nv:
                    if k not in v and k in self._rows:
                        heapq.heappush(heap, k)
                    v[k] = nv
                else:
                    v.pop(k, None)
        return v

    def add(self, vec: SparseVec) -> bool:
        """Insert ``vec``; return True when it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        p = min(r)
        inv = 1 / r[p]
        self._rows[p] = {k: x * inv for k, x in r.items()}
        return True

    def contains(self, vec: SparseVec) -> bool:
        return not self.reduce(vec)

    def rref(self) -> List[SparseVec]:
        """Fully reduced rows with unit pivots, sorted by pivot."""
        pivots = sorted(self._rows, reverse=True)
        done: Dict[int, SparseVec] = {}
        for p in pivots:
            row = dict(self._rows[p])
            for q in [k for k in row if k != p and k in done]:
                c = row.get(q)
                if c:
                    axpy(row, -c, done[q])
            inv = 1 / row[p]
            done[p] = {k: x * inv for k, x in row.items()}
        return [done[p] for p in sorted(done)]


def rank(vectors: Iterable[SparseVec]) -> int:
    return len(EchelonBasis(vectors))


def nullspace(equations: Iterable[SparseVec], nvars: int) -> List[SparseVec]:
    """Basis of ``{x in Q^nvars : e . x = 0 for every equation e}``.

    The result is canonical: one vector per free variable, with that free
    variable set to 1 and all other free variables 0.
    """
    ech = EchelonBasis()
    for e in equations:
        if e:
            ech.add(e)
    rows = ech.rref()
    pivot_rows = {min(r): r for r in rows}
    free = [j for j in range(nvars) if j not in pivot_rows]
    # column index -> list of (pivot, coefficient) for fast assembly
    by_col: Dict[int, List[tuple]] = {}
    for p, r in pivot_rows.items():
        for k, x in r.items():
            if k != p:
                by_col.setdefault(k, []).append((p, x))
    basis = []
    for f in free:
        vec: SparseVec = {f: Fraction(1)}
        for p, x in by_col.get(f, ()):
            vec[p] = -x
        basis.append(vec)
    return basis


def solve_combination(basis: List[SparseVec], target: SparseVec) -> Optional[List[Fraction]]:
    """Coefficients c with ``sum c_i basis_i == target`` or None if impossible."""
    # Augment each basis vector with a tag coordinate so the combination can
    # be read back from the reduction of the target.
    if not basis:
        return [] if not target else None
    offset = 1 + max([max(v) for v in basis if v] + [max(target) if target else 0])
    ech = EchelonBasis()
    for i, v in enumerate(basis):
        aug = dict(v)
        aug[offset + i] = Fraction(1)
        ech.add(aug)
    r = ech.reduce(target)
    if any(k < offset for k in r):
        return None
    coeffs = [Fraction(0)] * len(basis)
    for k, x in r.items():
        coeffs[k - offset] = -x
    return coeffs
