"""Joint spectral measures of commuting self-adjoint matrices with a cyclic
vector, and the unitary onto the multiplication-operator model."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from .rational import fmt_frac
from .report import Report

DEFAULT_TOL = 1e-10


class NonCommutingError(ValueError):
    pass


def _is_exact(m) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in np.asarray(m, dtype=object).ravel())


@dataclass
class CommutingFamily:
    matrices: List[np.ndarray]
    xi: np.ndarray
    tol: float = DEFAULT_TOL
    exact: bool = False

    @classmethod
    def from_lists(cls, matrices, xi, tol: float = DEFAULT_TOL) -> "CommutingFamily":
        exact = all(_is_exact(m) for m in matrices) and _is_exact(xi)
        if exact:
            mats = [np.array([[Fraction(x) for x in row] for row in m], dtype=object) for m in matrices]
            vec = np.array([Fraction(x) for x in xi], dtype=object)
        else:
            mats = [np.asarray(m, dtype=float) for m in matrices]
            vec = np.asarray(xi, dtype=float)
        return cls(mats, vec, tol, exact)

    @property
    def dim(self) -> int:
        return len(self.xi)

    def float_matrices(self) -> List[np.ndarray]:
        return [np.asarray(m, dtype=float) for m in self.matrices]

    def float_xi(self) -> np.ndarray:
        return np.asarray(self.xi, dtype=float)

    def validate(self) -> None:
        mats = self.float_matrices()
        scale = max([1.0] + [np.abs(m).max() for m in mats if m.size])
        for m in mats:
            if m.shape != (self.dim, self.dim):
                raise ValueError("matrix shape does not match vector")
            if np.abs(m - m.T).max() > self.tol * scale:
                raise ValueError("matrix not self-adjoint")
        for a, b in itertools.combinations(mats, 2):
            if np.abs(a @ b - b @ a).max() > self.tol * scale * scale * self.dim:
                raise NonCommutingError("family does not commute within tolerance")

    def to_json(self) -> dict:
        conv = (lambda x: fmt_frac(x)) if self.exact else float
        return {
            "matrices": [[[conv(x) for x in row] for row in m] for m in self.matrices],
            "xi": [conv(x) for x in self.xi],
            "exact": self.exact,
        }


@dataclass
class AtomicMeasure:
    atoms: List[Tuple[tuple, object]]
    labels: Tuple[int, ...] = ()
    exact: bool = False
    # joint eigenprojections aligned with atoms, plus those missing xi;
    # kept for reconstruction and never serialized
    projections: List[np.ndarray] = field(default_factory=list, repr=False, compare=False)
    null_projections: List[np.ndarray] = field(default_factory=list, repr=False, compare=False)

    def total(self):
        return sum(w for _, w in self.atoms)

    def as_dict(self) -> Dict[tuple, object]:
        return {p: w for p, w in self.atoms}

    def to_json(self) -> dict:
        def conv(x):
            return fmt_frac(x) if self.exact else repr(float(x))
        return {
            "labels": list(self.labels),
            "atoms": [{"point": [conv(x) for x in p], "weight": conv(w)} for p, w in self.atoms],
        }


# -- exact path ---------------------------------------------------------------

def _sym(m) -> sympy.Matrix:
    return sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in row] for row in m])


def _exact_measure(family: CommutingFamily) -> Optional[AtomicMeasure]:
    """Exact joint decomposition when every spectrum is rational, else None."""
    d = family.dim
    mats = [_sym(m) for m in family.matrices]
    blocks: List[Tuple[tuple, sympy.Matrix]] = [((), sympy.eye(d))]
    for a in mats:
        nxt = []
        for point, basis in blocks:
            # restrict a to the block spanned by the columns of basis
            gram = basis.T * basis
            coords = gram.inv() * basis.T * a * basis
            try:
                eig = coords.eigenvects()
            except Exception:  # pragma: no cover - sympy failure means fall back
                return None
            for val, _, vecs in eig:
                if not val.is_Rational:
                    return None
                sub = basis * sympy.Matrix.hstack(*vecs)
                nxt.append((point + (Fraction(int(val.p), int(val.q)),), sub))
        blocks = nxt
    xi = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in family.xi])
    norm2 = (xi.T * xi)[0]
    atoms, projs, null = [], [], []
    for point, basis in sorted(blocks, key=lambda b: b[0]):
        proj = basis * (basis.T * basis).inv() * basis.T
        pxi = proj * xi
        w = (pxi.T * pxi)[0] / norm2
        fproj = np.array(proj.tolist(), dtype=float)
        if w != 0:
            atoms.append((point, Fraction(int(w.p), int(w.q))))
            projs.append(fproj)
        else:
            null.append(fproj)
    return AtomicMeasure(atoms, tuple(range(len(family.matrices))), True, projs, null)


# -- float path ---------------------------------------------------------------

def _split(a: np.ndarray, basis: np.ndarray, thresh: float) -> List[Tuple[float, np.ndarray]]:
    sub = basis.T @ a @ basis
    vals, vecs = np.linalg.eigh((sub + sub.T) / 2)
    groups: List[List[int]] = []
    for i in range(len(vals)):
        if groups and vals[i] - vals[groups[-1][-1]] <= thresh:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [(float(vals[g].mean()), basis @ vecs[:, g]) for g in groups]


def _float_measure(family: CommutingFamily) -> AtomicMeasure:
    mats = family.float_matrices()
    d = family.dim
    radius = max([1.0] + [np.abs(np.linalg.eigvalsh(m)).max() for m in mats if m.size])
    thresh = family.tol * radius
    blocks: List[Tuple[tuple, np.ndarray]] = [((), np.eye(d))]
    for a in mats:
        nxt = []
        for point, basis in blocks:
            for val, sub in _split(a, basis, thresh):
                nxt.append((point + (val,), sub))
        blocks = nxt
    xi = family.float_xi()
    norm2 = float(xi @ xi)
    atoms, projs, null = [], [], []
    for point, basis in sorted(blocks, key=lambda b: b[0]):
        proj = basis @ basis.T
        w = float(np.linalg.norm(basis.T @ xi) ** 2) / norm2
        if w > family.tol:
            atoms.append((point, w))
            projs.append(proj)
        else:
            null.append(proj)
    return AtomicMeasure(atoms, tuple(range(len(mats))), False, projs, null)


def joint_spectral_measure(family: CommutingFamily, tol: Optional[float] = None) -> AtomicMeasure:
    """Atoms at joint eigenvalue tuples weighted by ||P xi||^2 / ||xi||^2.

    Rational families with rational spectra are decomposed exactly; all
    others by recursive eigenspace splitting in floating point, clustering
    eigenvalues closer than the threshold (scaled by the spectral radius).
    Joint eigenspaces that miss xi carry no atom; their projections are kept
    aside so the resolution of the identity can still be checked.
    """
    if tol is not None:
        family = CommutingFamily(family.matrices, family.xi, tol, family.exact)
    family.validate()
    if family.exact:
        m = _exact_measure(family)
        if m is not None:
            return m
    return _float_measure(family)


def _monomials(k: int, max_deg: int):
    for deg in range(max_deg + 1):
        yield from itertools.combinations_with_replacement(range(k), deg)


def verify_moment_identity(family: CommutingFamily, measure: AtomicMeasure, max_deg: int) -> Report:
    rep = Report("classical.moments", {"maxDeg": max_deg, "dim": family.dim})
    k = len(family.matrices)
    checked = 0
    worst = 0.0
    if family.exact and measure.exact:
        mats = [_sym(m) for m in family.matrices]
        xi = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in family.xi])
        norm2 = (xi.T * xi)[0]
        for mono in _monomials(k, max_deg):
            op = sympy.eye(family.dim)
            for j in mono:
                op = op * mats[j]
            lhs = (xi.T * op * xi)[0] / norm2
            rhs = sum((w * _prod(p, mono) for p, w in measure.atoms), Fraction(0))
            checked += 1
            if Fraction(int(lhs.p), int(lhs.q)) != rhs:
                rep.violate("moment", monomial=list(mono), lhs=str(lhs), rhs=fmt_frac(rhs))
    else:
        mats = family.float_matrices()
        xi = family.float_xi()
        norm2 = float(xi @ xi)
        for mono in _monomials(k, max_deg):
            v = xi.copy()
            for j in reversed(mono):
                v = mats[j] @ v
            lhs = float(xi @ v) / norm2
            rhs = sum(float(w) * float(_prod(p, mono)) for p, w in measure.atoms)
            scale = max(1.0, abs(lhs))
            err = abs(lhs - rhs) / scale
            worst = max(worst, err)
            checked += 1
            if err > family.tol:
                rep.violate("moment", monomial=list(mono), lhs=lhs, rhs=rhs)
    rep.payload = {"monomials": checked, "maxRelError": worst}
    return rep


def _prod(point, mono):
    out = 1
    for j in mono:
        out = out * point[j]
    return out


def reconstruct_multiplication_model(family: CommutingFamily, measure: Optional[AtomicMeasure] = None
                                     ) -> Tuple[np.ndarray, Report]:
    """Unitary from the cyclic subspace onto functions on the atoms.

    Row k of U is (P_k xi)^T / ||P_k xi||.  When some joint eigenspace is
    degenerate or misses xi, U only covers the cyclic subspace and the report
    records the restriction.
    """
    measure = measure or joint_spectral_measure(family)
    mats = family.float_matrices()
    xi = family.float_xi()
    xi = xi / np.linalg.norm(xi)
    tol = family.tol
    rep = Report("classical.reconstruct", {"dim": family.dim, "family": len(mats)})
    rows, points, weights = [], [], []
    for (point, w), proj in zip(measure.atoms, measure.projections):
        pxi = proj @ xi
        rows.append(pxi / np.linalg.norm(pxi))
        points.append(point)
        weights.append(float(w))
    U = np.array(rows) if rows else np.zeros((0, family.dim))
    if len(rows) < family.dim:
        rep.caveats.append(f"xi is not cyclic; restricted to the cyclic subspace of dimension {len(rows)}")
    resolution = sum(measure.projections + measure.null_projections, np.zeros((family.dim, family.dim)))
    if np.abs(resolution - np.eye(family.dim)).max() > tol:
        rep.violate("resolution", detail="joint eigenprojections do not sum to I")
    if np.abs(U @ U.T - np.eye(len(rows))).max() > tol:
        rep.violate("unitary", detail="rows not orthonormal")
    one = U @ xi
    expected = np.sqrt(np.array(weights))
    # U xi equals the constant function 1 in L2(mu): coordinates sqrt(w_k)
    err_one = float(np.abs(one - expected).max()) if rows else 0.0
    if err_one > tol:
        rep.violate("cyclicImage", maxError=err_one)
    err_mult = 0.0
    for j, a in enumerate(mats):
        model = U @ a @ U.T
        target = np.diag([float(p[j]) for p in points])
        e = float(np.abs(model - target).max()) if rows else 0.0
        err_mult = max(err_mult, e)
        if e > tol * max(1.0, np.abs(a).max()):
            rep.violate("multiplication", index=j, maxError=e)
        # pulling M_j back recovers A_j on the cyclic subspace
        if len(rows) == family.dim:
            back = U.T @ target @ U
            if np.abs(back - a).max() > tol * max(1.0, np.abs(a).max()):
                rep.violate("roundTrip", index=j)
    rep.payload = {
        "atoms": measure.to_json()["atoms"],
        "unitary": U.tolist(),
        "cyclicDim": len(rows),
        "maxErrorOne": err_one,
        "maxErrorMultiplication": err_mult,
    }
    return U, rep


def marginal(measure: AtomicMeasure, keep: Sequence[int]) -> AtomicMeasure:
    """Pushforward onto the coordinates with labels in ``keep``."""
    missing = [k for k in keep if k not in measure.labels]
    if missing:
        raise ValueError(f"labels {missing} not carried by the measure")
    pos = [measure.labels.index(k) for k in keep]
    acc: Dict[tuple, object] = {}
    for p, w in measure.atoms:
        key = tuple(p[i] for i in pos)
        acc[key] = acc.get(key, 0) + w
    return AtomicMeasure(sorted(acc.items()), tuple(keep), measure.exact)


def _mass_near(point, atoms, radius) -> float:
    return sum(float(w) for q, w in atoms
               if max((abs(float(a) - float(b)) for a, b in zip(point, q)), default=0.0) <= radius)


def kolmogorov_consistency_check(marginals: Sequence[AtomicMeasure], tol: float = DEFAULT_TOL) -> Report:
    """Every marginal pushed forward onto a smaller index set must match it."""
    rep = Report("classical.consistency", {"marginals": [list(m.labels) for m in marginals], "tol": tol})
    for m in marginals:
        if len(set(m.labels)) != len(m.labels):
            raise ValueError(f"incoherent labels: repeated index in {list(m.labels)}")
    pairs = 0
    worst = 0.0
    for big, small in itertools.permutations(marginals, 2):
        if not set(small.labels) < set(big.labels):
            continue
        pushed = marginal(big, small.labels).atoms
        pairs += 1
        gap = 0.0
        # points within sqrt(tol) are identified, so float atoms compare robustly
        radius = 0.0 if big.exact and small.exact else tol ** 0.5
        for p, _ in list(pushed) + list(small.atoms):
            gap = max(gap, abs(_mass_near(p, pushed, radius) - _mass_near(p, small.atoms, radius)))
        worst = max(worst, gap)
        if gap > tol:
            rep.violate("consistency", larger=list(big.labels), smaller=list(small.labels), maxDiscrepancy=gap)
    rep.payload = {"pairs": pairs, "maxDiscrepancy": worst}
    return rep


def random_commuting_family(seed: int, dim: int = 6, count: int = 2, degree: int = 3) -> CommutingFamily:
    """Polynomials of one random symmetric matrix, with a random unit vector."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim))
    m = (g + g.T) / 2
    mats = []
    for _ in range(count):
        coeffs = rng.standard_normal(degree + 1)
        acc = np.zeros((dim, dim))
        power = np.eye(dim)
        for c in coeffs:
            acc = acc + c * power
            power = power @ m
        mats.append((acc + acc.T) / 2)
    xi = rng.standard_normal(dim)
    return CommutingFamily(mats, xi / np.linalg.norm(xi))
