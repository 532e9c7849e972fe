from fractions import Fraction

import pytest

from tailalg import fock
from tailalg.fock import Letter, TruncationWindow, parse_word
from tailalg.words import WordExpression


def test_basis_small_windows():
    assert fock.enumerate_monotone_basis(TruncationWindow(1, 2, 2)) == [(), (1,), (2,), (1, 2)]
    assert fock.enumerate_monotone_basis(TruncationWindow(-1, 1, 0)) == [()]
    assert len(fock.enumerate_monotone_basis(TruncationWindow(-4, 4, 4))) == 256
    assert TruncationWindow(-4, 4, 4).basis_size == 256


def test_capacity_limit():
    with pytest.raises(fock.CapacityError):
        fock.enumerate_monotone_basis(TruncationWindow(-10, 10, 6), limit=1000)


def test_window_validation():
    with pytest.raises(ValueError):
        TruncationWindow(2, 1, 1)
    with pytest.raises(ValueError):
        TruncationWindow(0, 1, -1)


@pytest.mark.parametrize("letter, vec, image", [
    (Letter(1, False), (1, 3), (3,)),
    (Letter(1, False), (2, 3), None),
    (Letter(1, True), (2, 3), (1, 2, 3)),
    (Letter(2, True), (1, 3), None),
    (Letter(1, False), (), None),
    (Letter(1, True), (), (1,)),
])
def test_letter_action(letter, vec, image):
    assert fock.act(letter, vec) == image


def test_operator_entries_are_partial_injections():
    w = TruncationWindow(-2, 2, 3)
    for site in w.sites:
        for dagger in (False, True):
            op = fock.monotone_operator(Letter(site, dagger), w)
            for col in op.cols.values():
                assert len(col) <= 1 and set(col.values()) <= {Fraction(1)}


def test_operator_rejects_outside_site():
    with pytest.raises(ValueError):
        fock.monotone_operator(Letter(5, False), TruncationWindow(-2, 2, 2))


def test_norm_one():
    w = TruncationWindow(-2, 2, 3)
    for site in w.sites:
        op = fock.monotone_operator(Letter(site, False), w)
        # partial isometry: each column has norm <= 1, attained on e_site
        assert all(sum(x * x for x in col.values()) <= 1 for col in op.cols.values())
        assert op.column((site,)) == {(): Fraction(1)}


def test_relations_pass_small_window():
    rep = fock.verify_monotone_relations(TruncationWindow(-2, 2, 3))
    assert rep.status == "pass" and not rep.violations


def test_top_site_annihilator_product_is_vacuum_projection():
    w = TruncationWindow(-2, 2, 3)
    prod = fock.monotone_operator(Letter(2, False), w) @ fock.monotone_operator(Letter(2, True), w)
    assert prod.entries == fock.special_operator("vacuum_projection", w).entries


def test_special_operators():
    w = TruncationWindow(-3, 3, 3)
    S = fock.special_operator("last_raise", w)
    assert S.column((1, 2)) == {(1, 3): Fraction(1)}
    assert S.column(()) == {(): Fraction(1)}
    U = fock.special_operator("shift", w)
    assert U.column((-1, 2)) == {(0, 3): Fraction(1)}
    assert (3,) in U.boundary and (1, 3) in S.boundary


def test_shift_conjugates_letters():
    w = TruncationWindow(-3, 3, 3)
    U = fock.special_operator("shift", w)
    Ut = U.transpose()
    for i in range(-3, 3):
        for dagger in (False, True):
            a = fock.monotone_operator(Letter(i, dagger), w)
            b = fock.monotone_operator(Letter(i + 1, dagger), w)
            lhs, rhs = U @ a @ Ut, b
            cols = [t for t in fock.enumerate_monotone_basis(w)
                    if all(x - 1 >= w.lo for x in t) and len(t) < w.cap and 3 not in t and 2 not in t]
            assert not lhs.equal_on(rhs, cols)


def test_literal_level_projection_is_not_invariant():
    # a_{-n-1}^+ e_(n+1) = e_(-n-1, n+1) leaves the complement of the
    # first-index-<=n subspace, while the subspace of tuples meeting [-n, n]
    # is invariant.
    w = TruncationWindow(-3, 3, 3)
    n = 1
    P = fock.special_operator("level_projection", w, n)
    Q = fock.special_operator("core_projection", w, n)
    a = fock.monotone_operator(Letter(-2, True), w)
    assert (P @ a).column((2,)) != (a @ P).column((2,))
    for j in (-3, -2, 2, 3):
        for dagger in (False, True):
            op = fock.monotone_operator(Letter(j, dagger), w)
            assert (Q @ op).entries == (op @ Q).entries
    # one-sided generators j > n do preserve the first-index subspace
    for j in (2, 3):
        for dagger in (False, True):
            op = fock.monotone_operator(Letter(j, dagger), w)
            assert (P @ op).entries == (op @ P).entries


@pytest.mark.parametrize("tokens, value", [
    (["1", "1+"], 1),
    (["-2", "-2+"], 1),
    (["1+", "2"], 0),
])
def test_vacuum_expectation(tokens, value):
    assert fock.vacuum_expectation_numeric(WordExpression.word(parse_word(tokens))) == value
    assert fock.vacuum_expectation_numeric(WordExpression.scalar(1)) == 1


def test_json_triplets():
    w = TruncationWindow(1, 2, 2)
    js = fock.monotone_operator(Letter(1, True), w).to_json()
    assert js["entries"] == [[[1], [], "1/1"], [[1, 2], [2], "1/1"]]
    assert js["rows"] == [[], [1], [2], [1, 2]]


def test_parse_letter():
    assert fock.parse_letter("a-3+") == Letter(-3, True)
    assert fock.parse_letter("l2") == Letter(2, False)
    with pytest.raises(ValueError):
        fock.parse_letter("x")
