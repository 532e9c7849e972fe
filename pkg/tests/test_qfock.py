import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tailalg import qfock, qpoly
from tailalg.fock import Letter, TruncationWindow, parse_word
from tailalg.qpoly import QScalar
from tailalg.words import PermutationSpec

W = parse_word


def test_poly_arithmetic():
    assert qpoly.add((1, 2), (0, -2)) == (1,)
    assert qpoly.mul((1, 1), (1, -1)) == (1, 0, -1)
    assert qpoly.shift((1,), 2) == (0, 0, 1)
    assert qpoly.evaluate((1, 1), Fraction(1, 2)) == Fraction(3, 2)
    assert qpoly.trim((0, 0)) == ()


def test_qscalar_modes():
    a = QScalar(poly=(1, 1, 0))
    assert a.poly == (1, 1)
    b = a.at(Fraction(1, 3))
    assert b.value == Fraction(4, 3) and b.to_json() == "4/3"
    with pytest.raises(ValueError):
        a + b
    with pytest.raises(ValueError):
        QScalar()


@pytest.mark.parametrize("u, v, expected", [
    ((1, 2), (2, 1), (0, 1)),
    ((1, 2), (1, 2), (1,)),
    ((1, 1), (1, 1), (1, 1)),
    ((1, 2), (1, 1), ()),
    ((), (), (1,)),
])
def test_gram_examples(u, v, expected):
    assert qfock.gram_entry(u, v) == expected


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=0, max_size=5), st.randoms(use_true_random=False))
def test_gram_recursion_matches_permutation_sum(u, rnd):
    v = list(u)
    rnd.shuffle(v)
    u, v = tuple(u), tuple(v)
    assert qfock.gram_entry(u, v) == qfock.gram_entry_bruteforce(u, v)
    assert qfock.gram_entry(u, v) == qfock.gram_entry(v, u)


def test_gram_invariants():
    g = qfock.q_gram(TruncationWindow(-1, 1, 3))
    for (u, v), p in g.entries.items():
        assert sorted(u) == sorted(v)
        assert g.entries[(v, u)] == p
        if u == v:
            assert p[0] == 1
    for q in (Fraction(-1, 2), Fraction(0), Fraction(1, 2)):
        for cls in g.classes:
            assert np.linalg.eigvalsh(g.class_matrix(cls, q)).min() > 0


def test_gram_limits_and_json():
    with pytest.raises(qfock.FactorialLimitError):
        qfock.q_gram(TruncationWindow(0, 0, 7))
    g = qfock.q_gram(TruncationWindow(1, 2, 2), Fraction(1, 2))
    js = g.to_json()
    assert [[1, 2], [2, 1], "1/2"] in js["entries"]


def test_operator_examples():
    w = TruncationWindow(-2, 2, 3)
    ann = qfock.q_operator(Letter(1, False), w)
    assert ann.column((1, 1)) == {(1,): (1, 1)}
    assert ann.column(()) == {}
    cre = qfock.q_operator(Letter(2, True), w)
    assert cre.column((1,)) == {(2, 1): (1,)}
    assert (0, 0, 0) in cre.boundary
    with pytest.raises(ValueError):
        qfock.q_operator(Letter(3, False), w)
    s = qfock.s_j(1, w)
    assert s.column(()) == {(1,): (1,)}


def test_relations_at_point_and_symbolic():
    w = TruncationWindow(-1, 1, 3)
    assert qfock.verify_q_relations(w).ok
    rep = qfock.verify_q_relations(w, Fraction(1, 3))
    assert rep.ok and rep.payload["norms"][0]["q"] == "1/3"
    with pytest.raises(ValueError):
        qfock.verify_q_relations(w, Fraction(1))


def test_gram_not_positive():
    # at the degenerate point q = -1 the two-letter block (1, 1) has norm 0
    with pytest.raises(qfock.GramNotPositiveError):
        qfock.q_norm(0, TruncationWindow(0, 0, 2), Fraction(-1))


def test_norm_at_zero_is_one():
    assert abs(qfock.q_norm(0, TruncationWindow(-1, 1, 3), 0) - 1) < 1e-12


def test_wick_examples():
    e = qfock.wick_normal_form(W(["1", "1+"]))
    assert e.to_json() == {"terms": [{"word": ["1+", "1"], "coeff": [0, 1]}], "identity": [1]}
    e = qfock.wick_normal_form(W(["1", "2+"]))
    assert e.to_json() == {"terms": [{"word": ["2+", "1"], "coeff": [0, 1]}], "identity": []}
    assert qfock.wick_normal_form(W(["1", "2", "1+", "2+"])).identity == (0, 1)
    with pytest.raises(ValueError):
        qfock.WickExpression({tuple(W(["1", "1+"])): (1,)})


@pytest.mark.parametrize("tokens, moment", [
    (["1", "1+"], (1,)),
    (["1", "2", "1+", "2+"], (0, 1)),
    (["1+", "1"], ()),
    ([], (1,)),
])
def test_moments(tokens, moment):
    assert qfock.vacuum_moment(W(tokens)) == moment
    assert qfock.vacuum_moment_numeric(W(tokens), Fraction(1, 3)) == qpoly.evaluate(moment, Fraction(1, 3))


def test_free_case():
    assert qpoly.evaluate(qfock.vacuum_moment(W(["2", "2+"])), 0) == 1
    assert qpoly.evaluate(qfock.vacuum_moment(W(["1", "2", "1+", "2+"])), 0) == 0


def test_wick_confluence_sample():
    rng = random.Random(1)
    letters = [Letter(s, d) for s in (1, 2) for d in (False, True)]
    for _ in range(100):
        w = tuple(rng.choice(letters) for _ in range(rng.randint(1, 7)))
        base = qfock.wick_normal_form(w)
        assert all(qfock.is_wick_ordered(k) for k in base.terms)
        assert qfock.wick_normal_form(w, random.Random(rng.random())) == base
        assert base.identity == qfock.vacuum_moment(w)


def test_invariance_examples():
    w = W(["1", "2", "1+", "2+"])
    rep = qfock.invariance_check(w, qfock.SiteMap.permutation(PermutationSpec.transposition(1, 2)))
    assert rep.ok and rep.payload["moment"] == [0, 1]
    assert qfock.invariance_check(W(["1", "1+"]), qfock.SiteMap.increasing(lambda i: 2 * i)).ok
    assert qfock.invariance_check(w, qfock.SiteMap.shift(0)).ok
    with pytest.raises(ValueError):
        qfock.invariance_check(w, qfock.SiteMap.increasing({1: 5}))
    with pytest.raises(ValueError):
        qfock.invariance_check(w, qfock.SiteMap.increasing(lambda i: -i))


def test_tail_probe_small():
    rep = qfock.tail_vanishing_probe(1, 2, TruncationWindow(-3, 3, 2))
    assert rep.ok and rep.payload["wickWords"] == 4 * 2 + 16 * 3
    with pytest.raises(ValueError):
        qfock.tail_vanishing_probe(3, 2, TruncationWindow(-3, 3, 2))


def test_tail_probe_detects_near_words():
    # sanity check of the harness: an annihilator inside [-N0, N0] does not vanish
    v = qfock.apply_q_word(W(["1"]), {(1,): (1,)})
    assert qfock.q_inner(v, {(): (1,)}) == (1,)


def test_implementors():
    impl = qfock.symmetry_implementors(TruncationWindow(-3, 3, 2))
    assert impl.report.ok
    u = impl.u_sigma[(1, 2)]
    assert u.column((1, 2)) == {(2, 1): (1,)}
    p0 = impl.projections[0]
    for op in impl.u_sigma.values():
        assert (p0 @ op).cols == (op @ p0).cols
    assert impl.witness == {(3,): (1,), (1,): (-1,)}
    assert impl.u_tau.column((1,)) == {(2,): (1,)}


def test_operator_json():
    js = qfock.q_operator(Letter(1, False), TruncationWindow(1, 1, 2)).to_json()
    assert js["entries"] == [[0, 1, [1]], [1, 2, [1, 1]]]
