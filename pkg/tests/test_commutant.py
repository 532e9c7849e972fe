import itertools
import random
from fractions import Fraction

import pytest

from tailalg import commutant as cm
from tailalg import qfock
from tailalg.fock import TruncationWindow
from tailalg.words import PermutationSpec


def unit(r, c):
    return {(r, c): Fraction(1)}


def diag(values):
    return {(i, i): Fraction(v) for i, v in enumerate(values) if v}


def full(d):
    return cm.SpanBasis.of(d, [unit(r, c) for r in range(d) for c in range(d)])


def test_algebra_span_examples():
    s = cm.algebra_span([], 3, 4)
    assert s.dim == 1 and s.stabilized
    s = cm.algebra_span([unit(0, 1), unit(1, 0), unit(0, 0), unit(1, 1)], 2, 2)
    assert s.dim == 4
    with pytest.raises(ValueError):
        cm.algebra_span([unit(0, 5)], 2, 2)
    with pytest.raises(ValueError):
        cm.algebra_span([], 0, 2)


def test_monotone_boundary_generators_contain_vacuum_projection():
    # generators a_2, a_-2; basis index 0 is the vacuum
    s = cm.tail_span(1, TruncationWindow(-2, 2, 2), 4)
    assert s.stabilized
    assert s.contains({(0, 0): Fraction(1)})


def test_commutant_examples():
    d = 3
    assert cm.commutant(full(d)).dim == 1
    dg = cm.SpanBasis.of(d, [diag([1, 0, 0]), diag([0, 1, 0]), diag([0, 0, 1])])
    assert cm.commutant(dg) == dg
    assert cm.commutant(cm.SpanBasis.of(d, [cm.identity(d)])).dim == d * d


def random_span(rng, d, k):
    mats = []
    for _ in range(k):
        m = {(rng.randrange(d), rng.randrange(d)): Fraction(rng.randint(-2, 2)) for _ in range(3)}
        mats.append({a: b for a, b in m.items() if b})
    return cm.SpanBasis.of(d, mats)


def test_bicommutant_and_antitone():
    rng = random.Random(0)
    d = 3
    for _ in range(10):
        s = random_span(rng, d, 2)
        cc = cm.commutant(cm.commutant(s))
        assert all(cc.contains(m) for m in s.matrices())
        t = cm.SpanBasis.of(d, s.matrices() + random_span(rng, d, 1).matrices())
        ct, cs = cm.commutant(t), cm.commutant(s)
        assert all(cs.contains(m) for m in ct.matrices())


def test_intersect_examples():
    d = 3
    dg = cm.SpanBasis.of(d, [diag([1, 0, 0]), diag([0, 1, 0]), diag([0, 0, 1])])
    assert cm.intersect([full(d), dg]) == dg
    assert cm.intersect([dg]) == dg
    P, Q = diag([1, 0, 0]), diag([0, 1, 0])
    I = cm.identity(d)
    assert cm.intersect([cm.SpanBasis.of(d, [I, P]), cm.SpanBasis.of(d, [I, Q])]) == cm.SpanBasis.of(d, [I])
    with pytest.raises(ValueError):
        cm.intersect([dg, full(2)])


def test_intersect_order_insensitive():
    rng = random.Random(1)
    spans = [random_span(rng, 3, 5) for _ in range(3)]
    ref = cm.intersect(spans)
    for perm in itertools.permutations(spans):
        assert cm.intersect(list(perm)) == ref


def test_fixed_points_trivial_unitary():
    d = 2
    s = cm.SpanBasis.of(d, [unit(0, 1), cm.identity(d)])
    fixed, _ = cm.fixed_points_under_unitaries(s, [(cm.identity(d), [])], d)
    assert fixed == s


def test_fixed_points_of_swap_on_full_space():
    swap = {(0, 1): Fraction(1), (1, 0): Fraction(1)}
    fixed, _ = cm.fixed_points_under_unitaries(None, [(swap, [])], 2)
    assert fixed.dim == 2  # span{I, swap}


def test_tail_experiment_membership_and_core_blocks():
    rep = cm.monotone_tail_experiment(cm.ExperimentConfig(TruncationWindow(-3, 3, 3)))
    rows = rep.payload["perN"]
    assert all(r["pZetaMember"] and r["pPerpMember"] and r["coreBlockDiagonal"] for r in rows)
    dims = [r["dim"] for r in rows]
    assert dims == sorted(dims, reverse=True)
    assert rep.surrogate and rep.caveats
    # the literal first-index subspace is not invariant: a_{-n-1} maps e_(-n-1) to the vacuum
    assert {v["check"] for v in rep.violations} == {"blockDiagonal"}
    assert all(v["subspace"] == "first index <= n" for v in rep.violations)


def test_tail_experiment_preconditions():
    with pytest.raises(ValueError):
        cm.monotone_tail_experiment(cm.ExperimentConfig(TruncationWindow(-2, 3, 2)))
    with pytest.raises(ValueError):
        cm.ExperimentConfig(TruncationWindow(-2, 2, 2), degree=0)


def test_stationary_witnesses():
    rep = cm.stationary_witnesses(TruncationWindow(-3, 3, 3))
    assert rep.ok and rep.payload["SInFixedSpace"]


def test_q_side_level_operator_fixed_by_u_sigma():
    w = TruncationWindow(-1, 1, 2)
    basis = qfock.q_basis(w)
    index = {t: i for i, t in enumerate(basis)}
    d = len(basis)
    lam = {(index[t], index[t]): Fraction(len(t) + 1) for t in basis}
    unitaries = []
    for i in range(w.lo, w.hi):
        u = qfock.u_sigma(PermutationSpec.transposition(i, i + 1), w)
        m = {(index[r], index[c]): Fraction(1) for c, col in u.cols.items() for r in col}
        unitaries.append((m, []))
    fixed, _ = cm.fixed_points_under_unitaries(cm.SpanBasis.of(d, [lam]), unitaries, d)
    assert fixed.dim == 1


def test_span_json():
    js = cm.SpanBasis.of(2, [cm.identity(2)]).to_json()
    assert js == {"ambientDim": 2, "dim": 1, "stabilized": None, "basis": [[[0, 0, "1/1"], [1, 1, "1/1"]]]}
