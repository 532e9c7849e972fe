"""Exact subspaces of d x d rational matrices: algebra closure, commutants,
intersections and fixed points, plus the monotone tail experiment.

A matrix is a sparse ``{(row, col): Fraction}``; it is flattened to the
coordinate ``row * d + col`` for echelon computations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .fock import (
    Letter,
    SparseOperator,
    TruncationWindow,
    enumerate_monotone_basis,
    monotone_operator,
    special_operator,
)
from .rational import EchelonBasis, SparseVec, fmt_frac, nullspace
from .report import Report

Matrix = Dict[Tuple[int, int], Fraction]


def identity(d: int) -> Matrix:
    return {(i, i): Fraction(1) for i in range(d)}


def transpose(m: Matrix) -> Matrix:
    return {(c, r): v for (r, c), v in m.items()}


def matmul(a: Matrix, b: Matrix) -> Matrix:
    rows_b: Dict[int, List[Tuple[int, Fraction]]] = {}
    for (k, c), v in b.items():
        rows_b.setdefault(k, []).append((c, v))
    out: Dict[Tuple[int, int], Fraction] = {}
    for (r, k), x in a.items():
        for c, y in rows_b.get(k, ()):
            out[(r, c)] = out.get((r, c), 0) + x * y
    return {k: v for k, v in out.items() if v}


def flatten(m: Matrix, d: int) -> SparseVec:
    return {r * d + c: Fraction(v) for (r, c), v in m.items() if v}


def unflatten(v: SparseVec, d: int) -> Matrix:
    return {divmod(k, d): x for k, x in v.items()}


def operator_matrix(op: SparseOperator, basis: Sequence[tuple]) -> Matrix:
    index = {t: i for i, t in enumerate(basis)}
    return {(index[r], index[c]): v for (r, c), v in op.entries.items()}


@dataclass
class SpanBasis:
    ambient_dim: int
    basis: List[SparseVec]
    stabilized: Optional[bool] = None
    _ech: Optional[EchelonBasis] = field(default=None, repr=False, compare=False)

    @classmethod
    def of(cls, d: int, matrices: Iterable[Matrix], stabilized: Optional[bool] = None) -> "SpanBasis":
        ech = EchelonBasis(flatten(m, d) for m in matrices)
        return cls(d, ech.rref(), stabilized)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def echelon(self) -> EchelonBasis:
        if self._ech is None:
            self._ech = EchelonBasis(self.basis)
        return self._ech

    def contains(self, m: Matrix) -> bool:
        return self.echelon().contains(flatten(m, self.ambient_dim))

    def matrices(self) -> List[Matrix]:
        return [unflatten(v, self.ambient_dim) for v in self.basis]

    def __eq__(self, other) -> bool:
        return isinstance(other, SpanBasis) and self.ambient_dim == other.ambient_dim and self.basis == other.basis

    def to_json(self) -> dict:
        d = self.ambient_dim
        mats = []
        for v in self.basis:
            mats.append([[k // d, k % d, fmt_frac(x)] for k, x in sorted(v.items())])
        return {"ambientDim": d, "dim": self.dim, "stabilized": self.stabilized, "basis": mats}


def _check_dims(d: int, mats: Iterable[Matrix]) -> None:
    for m in mats:
        if any(not (0 <= r < d and 0 <= c < d) for r, c in m):
            raise ValueError(f"matrix does not fit ambient dimension {d}")


def algebra_span(generators: Sequence[Matrix], degree: int, dim: int) -> SpanBasis:
    """Span of I and all products of generators and their adjoints of length <= degree.

    Each level multiplies only the products that enlarged the span at the
    previous level.  ``stabilized`` records whether one further level would
    have added nothing.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    _check_dims(dim, generators)
    gens: List[Matrix] = []
    seen = set()
    for g in list(generators) + [transpose(g) for g in generators]:
        key = frozenset(g.items())
        if key not in seen:
            seen.add(key)
            gens.append(g)
    ech = EchelonBasis([flatten(identity(dim), dim)])
    frontier = [identity(dim)]
    stabilized = None
    for _ in range(degree):
        new = []
        for m in frontier:
            for g in gens:
                p = matmul(m, g)
                if p and ech.add(flatten(p, dim)):
                    new.append(p)
        frontier = new
        if not new:
            stabilized = True
            break
    if stabilized is None:
        probe = EchelonBasis(ech.rref())
        stabilized = not any(probe.add(flatten(matmul(m, g), dim)) for m in frontier for g in gens)
    return SpanBasis(dim, ech.rref(), stabilized)


def commutant(span: SpanBasis) -> SpanBasis:
    """All X with XB = BX for every basis element B."""
    d = span.ambient_dim
    eqs: List[SparseVec] = []
    for b in span.matrices():
        rows: Dict[int, List[Tuple[int, Fraction]]] = {}
        cols: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in b.items():
            rows.setdefault(r, []).append((c, v))
            cols.setdefault(c, []).append((r, v))
        # (XB - BX)[r, c] = sum_k X[r, k] B[k, c] - B[r, k] X[k, c]
        for r in range(d):
            for c in range(d):
                e: SparseVec = {}
                for k, v in cols.get(c, ()):
                    e[r * d + k] = e.get(r * d + k, 0) + v
                for k, v in rows.get(r, ()):
                    e[k * d + c] = e.get(k * d + c, 0) - v
                e = {i: x for i, x in e.items() if x}
                if e:
                    eqs.append(e)
    return SpanBasis(d, EchelonBasis(nullspace(eqs, d * d)).rref())


def _intersect_pair(a: SpanBasis, b: SpanBasis) -> SpanBasis:
    # Reduction against b's fixed echelon rows is linear, so x = sum c_i a_i
    # lies in b exactly when sum c_i rem(a_i) = 0.
    ech = b.echelon()
    rems = [ech.reduce(v) for v in a.basis]
    eqs: Dict[int, SparseVec] = {}
    for i, r in enumerate(rems):
        for k, x in r.items():
            eqs.setdefault(k, {})[i] = x
    sols = nullspace(eqs.values(), len(a.basis))
    out = EchelonBasis()
    for s in sols:
        v: SparseVec = {}
        for i, c in s.items():
            for k, x in a.basis[i].items():
                v[k] = v.get(k, 0) + c * x
        out.add({k: x for k, x in v.items() if x})
    return SpanBasis(a.ambient_dim, out.rref())


def intersect(spans: Sequence[SpanBasis]) -> SpanBasis:
    if not spans:
        raise ValueError("need at least one span")
    d = spans[0].ambient_dim
    if any(s.ambient_dim != d for s in spans):
        raise ValueError("ambient dimension mismatch")
    cur = spans[0]
    for s in spans[1:]:
        cur = _intersect_pair(cur, s)
    return SpanBasis(d, EchelonBasis(cur.basis).rref())


def fixed_points_under_unitaries(span: Optional[SpanBasis], unitaries: Sequence[Tuple[Matrix, Sequence[int]]],
                                 dim: int) -> Tuple[SpanBasis, dict]:
    """Solve UX = XU over ``span`` (or all d x d matrices when None).

    Each unitary comes with its boundary columns, whose images left the
    truncation.  Only entries (r, c) with c interior and r in the image of
    the interior columns are constrained; the rest would involve basis
    vectors outside the window.
    """
    d = dim
    if span is not None:
        coords = span.matrices()
        nvars = len(coords)
    else:
        coords = None
        nvars = d * d
    eqs: List[SparseVec] = []
    masked = []
    for u, boundary in unitaries:
        bset = set(boundary)
        interior = [c for c in range(d) if c not in bset]
        image_rows = sorted({r for (r, c) in u if c not in bset})
        masked.append({"boundaryColumns": sorted(bset), "maskedRows": [r for r in range(d) if r not in set(image_rows)]})
        u_cols: Dict[int, List[Tuple[int, Fraction]]] = {}
        u_rows: Dict[int, List[Tuple[int, Fraction]]] = {}
        for (r, c), v in u.items():
            u_cols.setdefault(c, []).append((r, v))
            u_rows.setdefault(r, []).append((c, v))
        for r in image_rows:
            for c in interior:
                # (UX - XU)[r, c] = sum_k U[r, k] X[k, c] - X[r, k] U[k, c]
                e: Dict[Tuple[int, int], Fraction] = {}
                for k, v in u_rows.get(r, ()):
                    e[(k, c)] = e.get((k, c), 0) + v
                for k, v in u_cols.get(c, ()):
                    e[(r, k)] = e.get((r, k), 0) - v
                if coords is None:
                    eq = {a * d + b: x for (a, b), x in e.items() if x}
                else:
                    eq = {}
                    for i, m in enumerate(coords):
                        s = sum((x * m.get(key, 0) for key, x in e.items()), Fraction(0))
                        if s:
                            eq[i] = s
                if eq:
                    eqs.append(eq)
    sols = nullspace(eqs, nvars)
    if coords is None:
        fixed = SpanBasis(d, EchelonBasis(sols).rref())
    else:
        out = EchelonBasis()
        for s in sols:
            v: SparseVec = {}
            for i, c in s.items():
                for k, x in span.basis[i].items():
                    v[k] = v.get(k, 0) + c * x
            out.add({k: x for k, x in v.items() if x})
        fixed = SpanBasis(d, out.rref())
    return fixed, {"masks": masked}


# -- monotone experiments -----------------------------------------------------

@dataclass(frozen=True)
class ExperimentConfig:
    window: TruncationWindow
    degree: Optional[int] = None
    n_range: Tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if self.degree is not None and self.degree < 1:
            raise ValueError("degree must be >= 1")

    @property
    def effective_degree(self) -> int:
        return self.degree if self.degree is not None else 2 * self.window.cap


def _off_block(m: Matrix, inside: set) -> Optional[Tuple[int, int]]:
    for (r, c), v in sorted(m.items()):
        if v and ((r in inside) != (c in inside)):
            return (r, c)
    return None


def tail_span(n: int, window: TruncationWindow, degree: int) -> SpanBasis:
    basis = enumerate_monotone_basis(window)
    gens = [operator_matrix(monotone_operator(Letter(j, False), window), basis)
            for j in window.sites if abs(j) > n]
    return algebra_span(gens, degree, len(basis))


def monotone_tail_experiment(config: ExperimentConfig) -> Report:
    w = config.window
    if w.lo != -w.hi:
        raise ValueError("window must be symmetric around 0")
    if any(not 0 <= n < w.hi for n in config.n_range):
        raise ValueError("nRange must lie in [0, hi)")
    degree = config.effective_degree
    rep = Report("monotone.tail_experiment", {"window": w.to_dict(), "degree": degree,
                                              "nRange": list(config.n_range)})
    basis = enumerate_monotone_basis(w)
    d = len(basis)
    pz = operator_matrix(special_operator("vacuum_projection", w), basis)
    perp = {k: v for k, v in ((k, identity(d).get(k, 0) - pz.get(k, 0)) for k in identity(d)) if v}
    spans = []
    rows = []
    for n in config.n_range:
        span = tail_span(n, w, degree)
        spans.append(span)
        lit = {i for i, t in enumerate(basis) if t and t[0] <= n}
        core = {i for i, t in enumerate(basis) if any(-n <= x <= n for x in t)}
        info = {"n": n, "dim": span.dim, "stabilized": span.stabilized,
                "pZetaMember": span.contains(pz), "pPerpMember": span.contains(perp)}
        if not info["pZetaMember"]:
            rep.violate("membership", n=n, element="P_zeta")
        if not info["pPerpMember"]:
            rep.violate("membership", n=n, element="I-P_zeta")
        lit_bad = core_bad = None
        for m in span.matrices():
            lit_bad = lit_bad or _off_block(m, lit)
            core_bad = core_bad or _off_block(m, core)
            if lit_bad and core_bad:
                break
        info["levelBlockDiagonal"] = lit_bad is None
        info["coreBlockDiagonal"] = core_bad is None
        if lit_bad is not None:
            r, c = lit_bad
            rep.violate("blockDiagonal", n=n, subspace="first index <= n",
                        row=list(basis[r]), column=list(basis[c]))
        if core_bad is not None:
            r, c = core_bad
            rep.violate("blockDiagonal", n=n, subspace="meets [-n, n]",
                        row=list(basis[r]), column=list(basis[c]))
        if not span.stabilized:
            rep.caveats.append(f"closure for n={n} not stabilized at degree {degree}")
        rows.append(info)
    dims = [r["dim"] for r in rows]
    order = sorted(range(len(dims)), key=lambda i: config.n_range[i])
    for a, b in zip(order, order[1:]):
        if dims[b] > dims[a]:
            rep.violate("monotoneDimensions", dims=dims)
    inter = intersect(spans)
    rep.surrogate = True
    rep.caveats.append("intersection dimension is a finite-truncation surrogate; "
                       "the infinite-limit value is 2")
    rep.payload = {"perN": rows, "intersectionDim": inter.dim, "ambientDim": d}
    return rep


def stationary_witnesses(window: TruncationWindow) -> Report:
    """Shift U and last-index raise S on the monotone truncation."""
    rep = Report("monotone.stationary", {"window": window.to_dict()})
    basis = enumerate_monotone_basis(window)
    index = {t: i for i, t in enumerate(basis)}
    U = special_operator("shift", window)
    S = special_operator("last_raise", window)
    Sa = S.transpose()
    interior = [t for t in basis if t not in S.boundary]
    sts = (Sa @ S)
    bad = [t for t in interior if sts.column(t) != {t: Fraction(1)}]
    if bad:
        rep.violate("isometry", column=list(bad[0]))
    w = (1, 2)
    in_range = any(w in S.column(t) for t in basis)
    if in_range or not window.contains(w):
        rep.violate("properIsometry", vector=list(w))
    sss = S @ Sa
    ssw = sss.column(w) if window.contains(w) else {}
    cols = [t for t in basis if t not in S.boundary and t not in U.boundary
            and S.column(t) and all(r not in U.boundary for r in S.column(t))
            and all(r not in S.boundary for r in U.column(t))]
    comm = [t for t in cols if (U @ S).column(t) != (S @ U).column(t)]
    if comm:
        rep.violate("commutesWithU", column=list(comm[0]))
    Um = operator_matrix(U, basis)
    Sm = operator_matrix(S, basis)
    span = SpanBasis.of(len(basis), [Sm])
    fixed, masks = fixed_points_under_unitaries(span, [(Um, [index[t] for t in U.boundary])], len(basis))
    s_fixed = fixed.contains(Sm)
    if not s_fixed:
        rep.violate("fixedByU", detail="S not in the fixed space of U")
    rep.payload = {
        "isometryColumns": len(interior),
        "commutationColumns": len(cols),
        "nonRangeVector": list(w),
        "SSstarOnVector": {" ".join(map(str, r)): fmt_frac(v) for r, v in ssw.items()},
        "SInFixedSpace": s_fixed,
        "masks": masks["masks"],
    }
    return rep
