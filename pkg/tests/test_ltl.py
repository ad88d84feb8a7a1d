import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopcore import _kernels, ltl
from coopcore.gen import random_formula, random_game
from oracles import all_lassos, unroll_holds

p, q = ltl.Atom("p"), ltl.Atom("q")


def test_precedence_unary_binds_tightest():
    assert ltl.parse_ltl("!p & q") == ltl.And(ltl.Not(p), q)
    assert ltl.parse_ltl("X p U q") == ltl.Until(ltl.Next(p), q)


def test_until_is_right_associative():
    assert ltl.parse_ltl("p U q U p") == ltl.Until(p, ltl.Until(q, p))


def test_and_over_or_over_implies_over_iff():
    assert ltl.parse_ltl("p | q & p") == ltl.Or(p, ltl.And(q, p))
    assert ltl.parse_ltl("p -> q | p") == ltl.implies(p, ltl.Or(q, p))
    assert ltl.parse_ltl("p <-> q -> p") == ltl.iff(p, ltl.implies(q, p))


def test_sugar_expands():
    assert ltl.parse_ltl("F p") == ltl.Until(ltl.TRUE, p)
    assert ltl.parse_ltl("G p") == ltl.Not(ltl.Until(ltl.TRUE, ltl.Not(p)))
    assert ltl.parse_ltl("¬p ∧ q") == ltl.parse_ltl("!p & q")


@pytest.mark.parametrize("text", ["p &", "(p", "p q", "P", "p U", ")", ""])
def test_syntax_errors_have_positions(text):
    with pytest.raises(ltl.LtlSyntaxError) as err:
        ltl.parse_ltl(text)
    assert err.value.pos >= 0


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 4))
def test_print_parse_round_trip(seed, depth):
    f = random_formula(seed, ("p", "q", "r1"), depth)
    assert ltl.parse_ltl(ltl.to_text(f)) == f


def _random_lasso(rng, states):
    stem = tuple(rng.choice(states) for _ in range(rng.randint(0, 3)))
    loop = tuple(rng.choice(states) for _ in range(rng.randint(1, 3)))
    return ltl.Lasso(stem, loop)


LAB = {"a": frozenset(), "b": frozenset({"p"}), "c": frozenset({"q"}), "d": frozenset({"p", "q"})}


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10**6))
def test_eval_matches_unrolling(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ("p", "q"), rng.randint(0, 4))
    lasso = _random_lasso(rng, list(LAB))
    assert ltl.eval_on_lasso(f, lasso, LAB) == unroll_holds(f, lasso, LAB)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_buchi_accepts_exactly_models(seed):
    rng = random.Random(seed)
    f = random_formula(rng, ("p", "q"), rng.randint(0, 3))
    lasso = _random_lasso(rng, list(LAB))
    assert ltl.to_buchi(f).accepts(lasso, LAB) == unroll_holds(f, lasso, LAB)


def test_eval_every_position():
    lasso = ltl.Lasso(("a", "b"), ("c", "d"))
    f = ltl.parse_ltl("F (p & q)")
    got = ltl.eval_positions(f, lasso, LAB)
    assert list(got) == [unroll_holds(f, lasso, LAB, t) for t in range(4)]


def test_normalised_lasso_is_same_word():
    lasso = ltl.Lasso(("a", "b", "c"), ("b", "c", "b", "c"))
    norm = lasso.normalised()
    assert norm == ltl.Lasso(("a",), ("b", "c"))
    assert lasso.prefix(20) == norm.prefix(20)


def test_empty_loop_rejected():
    with pytest.raises(ValueError):
        ltl.Lasso(("a",), ())


def test_check_lasso_rejects_missing_edge():
    succ = {"a": ["b"], "b": ["b"]}
    ltl.check_lasso(ltl.Lasso(("a",), ("b",)), succ.__getitem__)
    with pytest.raises(ValueError):
        ltl.check_lasso(ltl.Lasso(("b",), ("a",)), succ.__getitem__)


@pytest.mark.parametrize("seed", range(40))
def test_exists_path_against_lasso_enumeration(seed):
    rng = random.Random(seed)
    game = random_game("general-ltl", {"agents": 2, "states": 3}, seed)
    f = random_formula(rng, ("p", "q"), 2)
    m = game.structure
    found = ltl.exists_path(game, f)
    lassos = all_lassos(m.successors, m.initial, 6)
    brute = any(unroll_holds(f, l, game.labelling) for l in lassos)
    assert (found is not None) == brute
    if found is not None:
        ltl.check_lasso(found, m.successors)
        assert found.stem[:1] == (m.initial,) or (not found.stem and found.loop[0] == m.initial)
        assert unroll_holds(f, found, game.labelling)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.booleans(), min_size=1, max_size=12),
    st.lists(st.booleans(), min_size=1, max_size=12),
    st.integers(0, 11),
)
def test_until_kernels_agree(left, right, k):
    n = min(len(left), len(right))
    left, right = np.array(left[:n]), np.array(right[:n])
    k = min(k, n - 1)
    want = _kernels.until_on_lasso_np(left, right, k)
    lasso = ltl.Lasso(tuple(range(k)), tuple(range(k, n)))
    lab = {i: frozenset(x for x, b in (("p", left[i]), ("q", right[i])) if b) for i in range(n)}
    oracle = [unroll_holds(ltl.Until(p, q), lasso, lab, t) for t in range(n)]
    assert list(want) == oracle
    if _kernels.HAVE_NUMBA:
        assert list(_kernels.until_on_lasso_nb(left, right, k)) == oracle
