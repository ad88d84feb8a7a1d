import random

import pytest

from coopcore import gen, ltl
from coopcore.bisim import BisimError, bisimilar, check_bisimulation, duplicate_state, games_bisimilar
from coopcore.coop_ltl import e_core
from coopcore.game import ConcurrentGameStructure, Game, validate_game


def test_game_is_bisimilar_to_itself():
    game, _ = gen.coordination()
    rel = games_bisimilar(game, game)
    assert rel is not None
    assert not check_bisimulation(rel, game.structure, game.labelling, game.structure, game.labelling)


@pytest.mark.parametrize("seed", range(25))
def test_duplicated_state_is_bisimilar(seed):
    rng = random.Random(seed)
    game = gen.random_game("general-ltl", {"agents": 2}, seed)
    twin = duplicate_state(game, rng.choice(game.states), seed)
    validate_game(twin)
    rel = games_bisimilar(game, twin)
    assert rel is not None
    assert check_bisimulation(rel, game.structure, game.labelling, twin.structure, twin.labelling) == []


def test_label_change_breaks_bisimulation():
    game, _ = gen.heads_tails()
    lab = dict(game.labelling)
    lab["down"] = frozenset({"p"})
    other = Game(game.structure, lab, game.goals, props=game.props)
    assert games_bisimilar(game, other) is None


def test_checker_reports_bad_relation():
    game, _ = gen.heads_tails()
    m = game.structure
    problems = check_bisimulation({("start", "start"), ("up", "down")}, m, game.labelling, m, game.labelling)
    assert any("labels differ" in p for p in problems)
    assert any("leaves the relation" in p for p in problems)


def test_different_agents_rejected():
    a, _ = gen.coordination()
    b, _ = gen.heads_tails()
    with pytest.raises(BisimError):
        games_bisimilar(a, b)


def test_action_availability_matters():
    avail1 = {(1, "s"): ("a", "b")}
    avail2 = {(1, "s"): ("a",)}
    m1 = ConcurrentGameStructure((1,), ("s",), "s", avail1, {("s", ("a",)): "s", ("s", ("b",)): "s"})
    m2 = ConcurrentGameStructure((1,), ("s",), "s", avail2, {("s", ("a",)): "s"})
    lab = {"s": frozenset()}
    assert bisimilar(m1, lab, m2, lab) is None


@pytest.mark.parametrize("seed", range(10))
def test_e_core_invariant_under_duplication(seed):
    rng = random.Random(seed)
    game = gen.random_game("sink-ltl", {}, seed)
    twin = duplicate_state(game, rng.choice(game.states[1:]), seed)
    for _ in range(3):
        phi = gen.random_formula(rng, game.props, 2)
        assert e_core(game, phi).status == e_core(twin, phi).status
