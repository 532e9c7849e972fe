import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tailalg import fock, words
from tailalg.fock import Letter, parse_word
from tailalg.words import (
    HamelCoords,
    HamelLabel,
    PermutationSpec,
    StateSpec,
    TailElement,
    WordExpression,
    pi_label,
)


def nf(*tokens):
    return words.normal_form(WordExpression.word(parse_word(tokens)))


def test_zero_rules():
    assert nf("1", "2+") == HamelCoords()
    assert nf("2+", "1+") == HamelCoords()
    assert nf("1", "2") == HamelCoords()


def test_number_operator_rule():
    assert nf("1+", "1") == HamelCoords(0, {pi_label(0): 1, pi_label(1): -1})


def test_internal_pi_factor():
    got = nf("1+", "2", "2+", "1")
    assert got == HamelCoords(0, {pi_label(0): 1, pi_label(1): -1, HamelLabel((1, 2), (2, 1)): -1})
    assert words.reconstructs(WordExpression.word(parse_word(["1+", "2", "2+", "1"])))


def test_lambda_form_is_fixed():
    assert nf("1+", "3+", "2", "-1") == HamelCoords(0, {HamelLabel((1, 3), (2, -1)): 1})


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.integers(-2, 2), st.booleans()), min_size=1, max_size=5))
def test_reconstruction_property(letters):
    expr = WordExpression.word(Letter(s, d) for s, d in letters)
    assert words.reconstructs(expr)


def test_tsigma_examples():
    sigma = PermutationSpec.transposition(1, 2)
    assert words.tsigma_label(HamelLabel((1,), (2,)), sigma) == HamelLabel((2,), (1,))
    assert words.tsigma_label(HamelLabel((1, 2), ()), sigma) is None
    c = HamelCoords(3, {HamelLabel((1, 3), (2,)): 2})
    assert words.apply_tsigma(c, PermutationSpec()) == c


def test_tsigma_star_and_inverse():
    rng = random.Random(3)
    for _ in range(100):
        w = words.random_word(rng, range(-2, 3), 5)
        c = words.normal_form(WordExpression.word(w))
        i, j = rng.sample(range(-2, 3), 2)
        s = PermutationSpec.transposition(i, j)
        assert words.apply_tsigma(c.adjoint(), s) == words.apply_tsigma(c, s).adjoint()
        for label in c.coeffs:
            if words.tsigma_label(label, s) is not None:
                assert words.tsigma_label(words.tsigma_label(label, s), s.inverse()) == label


def test_states():
    pk = HamelCoords(0, {pi_label(4): 1})
    assert words.evaluate_state(pk, StateSpec(1)) == 1
    assert words.evaluate_state(pk, StateSpec(Fraction(1, 2))) == Fraction(1, 2)
    assert words.evaluate_state(HamelCoords(1, {HamelLabel((1,), ()): 3}), StateSpec(0)) == 1
    with pytest.raises(ValueError):
        StateSpec(2)


def test_states_are_symmetric():
    rng = random.Random(4)
    for _ in range(100):
        c = words.normal_form(WordExpression.word(words.random_word(rng, range(-2, 3), 5)))
        s = PermutationSpec.transposition(*rng.sample(range(-2, 3), 2))
        for g in (0, 1):
            assert words.evaluate_state(words.apply_tsigma(c, s), StateSpec(g)) == words.evaluate_state(c, StateSpec(g))


def test_positivity_witnesses():
    rng = random.Random(6)
    for _ in range(60):
        x = WordExpression()
        for _ in range(3):
            x = x + WordExpression.word(words.random_word(rng, range(-2, 3), 3), rng.randint(-3, 3))
        xx = x.adjoint() * x
        c = words.normal_form(xx)
        assert fock.vacuum_expectation_numeric(xx) == words.evaluate_state(c, StateSpec(1)) >= 0
        assert c.identity >= 0


@pytest.mark.parametrize("args, expected", [
    ((0, 1, 0, 0, 0, 3), WordExpression.word(parse_word(["3"]))),
    ((0, 0, 0, 0, 1, 0), WordExpression({tuple(parse_word(["-1", "-1+"])): -1}, 1)),
    ((1, 0, 0, 1, 0, 1), WordExpression({tuple(parse_word(["1", "1+"])): 1, tuple(parse_word(["1+", "1"])): 1})),
])
def test_iota_embed(args, expected):
    assert words.iota_embed(*args) == expected


def test_conditional_expectation():
    assert words.conditional_expectation(nf("1+", "2")) == TailElement(0, 0)
    assert words.conditional_expectation(HamelCoords(1)) == words.TAIL_ONE
    assert words.conditional_expectation(nf("3", "3+")) == words.P_ZETA


def test_conditional_expectation_preserves_vector_states():
    rng = random.Random(8)
    for _ in range(50):
        c = words.normal_form(WordExpression.word(words.random_word(rng, range(-2, 3), 5), 2) + WordExpression.scalar(1))
        for g in (0, Fraction(1, 3), 1):
            assert words.conditional_expectation(c).vector_state(g) == words.evaluate_state(c, StateSpec(g))
    e = words.conditional_expectation(HamelCoords(Fraction(2), {pi_label(0): 1}))
    assert e * words.TAIL_ONE == e


def test_definetti_examples():
    X = words.TailedExpr(WordExpression.word(parse_word(["1", "1+"])))
    Y = words.TailedExpr(WordExpression.word(parse_word(["2", "2+"])))
    assert words.factorization_pair(X, Y) == (1, 1)
    X = words.TailedExpr(WordExpression.word(parse_word(["1+"])))
    Y = words.TailedExpr(WordExpression.word(parse_word(["2"])))
    assert words.factorization_pair(X, Y) == (0, 0)
    P = words.TailedExpr(WordExpression.scalar(1), "zeta")
    assert words.factorization_pair(P, P) == (1, 1)


def test_definetti_check_and_overlap():
    rep = words.definetti_factorization_check([1, 2], [5, 6], samples=50, seed=1, distribution_samples=10)
    assert rep.ok and rep.seed == 1
    with pytest.raises(ValueError):
        words.definetti_factorization_check([1, 2], [2, 3])


def test_exchangeable_elements():
    rep = words.invariant_space_dim("exchangeable_elements", 3, -2, 2)
    assert rep.payload["dimension"] == 1
    # permutations confined to the window leave sum_k a_k a_k^+ and friends fixed
    assert len(words.fixed_elements(3, -2, 2, room=0)) == 5
    assert len(words.fixed_elements(2, 0, 0, room=0)) == len(words.hamel_labels([0], 2))


def test_symmetric_moments_content():
    rep = words.invariant_space_dim("symmetric_moments", 4, -3, 3)
    p = rep.payload
    # omega and omega_infinity are invariant; three further classes
    # (a, a^+ and a_i^+ a_j with i != j) are invariant linear functionals too
    assert p["omegaInSpace"] and p["omegaInfinityInSpace"]
    assert p["dimension"] == 5


def test_coords_json():
    js = nf("1+", "1").to_json()
    assert js == {"identity": "0/1", "terms": [
        {"lambda1": [0], "lambda2": [0], "pi": True, "c": "1/1"},
        {"lambda1": [1], "lambda2": [1], "pi": True, "c": "-1/1"},
    ]}
