import random

import pytest

from coopcore import gen, ltl
from coopcore._search import profiles
from coopcore.coop_ltl import (
    a_core,
    core_members,
    core_membership,
    deviation_iteration,
    e_core,
    is_beneficial_deviation,
    is_fulfilled,
    is_sink_game,
    is_strong_beneficial_deviation,
    strong_core_empty_search,
    strong_core_membership,
)
from coopcore.game import restrict
from coopcore.strategies import MemorylessStrategy, enumerate_memoryless, run_of, winners
from coopcore.verdict import Deviation, Status
from oracles import all_lassos, sink_core, sink_strong_core, unroll_holds


def first_round(game, p):
    return tuple(p[i].choice[game.initial] for i in game.agents)


# -- worked examples -------------------------------------------------------------------


def test_coordination_single_deviations_fail():
    game, refs = gen.coordination()
    base = refs["all-false"]
    for i in (1, 2):
        for dev in enumerate_memoryless(game, {i}):
            assert is_beneficial_deviation(game, base, {i}, dev).fails


def test_coordination_joint_deviation_holds():
    game, refs = gen.coordination()
    dev = refs["all-true"].restricted({1, 2})
    assert is_beneficial_deviation(game, refs["all-false"], {1, 2}, dev).holds
    assert core_membership(game, refs["all-false"]).fails


def test_coordination_e_core():
    game, _ = gen.coordination()
    assert e_core(game, ltl.parse_ltl("G (p & q)")).holds
    assert e_core(game, ltl.parse_ltl("F p")).holds
    assert e_core(game, ltl.parse_ltl("G !p")).fails


def _lasso_oracle_core(game, k_len=6):
    """Memoryless core by brute force: a loser coalition is fulfilled when
    some memoryless joint choice defeats every lasso of the others."""
    m = game.structure
    agents = frozenset(game.agents)
    ful = {}

    def fulfilled(c):
        if c in ful:
            return ful[c]
        ok = False
        for dev in enumerate_memoryless(game, c):
            def succ(s):
                outs = []
                for p in m.profiles(s):
                    if all(p[i - 1] == dev[i].choice[s] for i in c):
                        outs.append(m.transition[(s, p)])
                return outs

            if all(all(unroll_holds(game.goal(i), l, game.labelling) for i in c) for l in all_lassos(succ, m.initial, k_len)):
                ok = True
                break
        ful[c] = ok
        return ok

    members = []
    for p in profiles(game, 1):
        lost = agents - winners(game, run_of(game, p))
        subsets = [frozenset(c) for c in _nonempty(lost)]
        if not any(fulfilled(c) for c in subsets):
            members.append(p)
    return members


def _nonempty(s):
    s = sorted(s)
    for mask in range(1, 1 << len(s)):
        yield [x for b, x in enumerate(s) if mask >> b & 1]


def test_coordination_core_runs_satisfy_both_goals():
    game, _ = gen.coordination()
    members = [p for p, v in core_members(game)]
    assert members
    oracle = _lasso_oracle_core(game)
    assert set(members) == set(oracle)
    for p in members:
        run = run_of(game, p)
        assert all(unroll_holds(game.goal(i), run, game.labelling) for i in game.agents)


def test_heads_tails_fulfilment():
    game, refs = gen.heads_tails()
    assert is_fulfilled(game, {1, 3}).holds
    assert is_fulfilled(game, {1, 2}).holds
    assert is_fulfilled(game, {2, 3}).limited
    assert core_membership(game, refs["heads"]).holds
    assert not {1, 3} <= winners(game, run_of(game, refs["heads"]))


def test_non_credible_example():
    game, refs = gen.non_credible()
    aa = refs["aa"]
    assert core_membership(game, aa).holds
    v = strong_core_membership(game, aa)
    assert v.fails and v.witness.coalition == {2}
    dev = {2: MemorylessStrategy({s: "b" for s in game.states})}
    alpha = is_beneficial_deviation(game, aa, {2}, dev)
    assert alpha.fails
    assert alpha.witness.loop == ("s3",)
    assert is_strong_beneficial_deviation(game, aa, {2}, dev).holds


def test_four_agent_rows():
    game, refs = gen.empty_strong_core_4p()
    report = strong_core_empty_search(game)
    assert report.empty and len(report.rows) == 16
    for row in report.rows:
        key = "".join(row.profile[i].choice["s0"] for i in game.agents)
        want_winners, listed = gen.STRONG_CORE_ROWS[key]
        assert row.winners == want_winners
        dev = row.verdict.witness
        assert is_strong_beneficial_deviation(game, refs[key], dev.coalition, dev.strategies).holds
        listed_dev = gen.deviation_from_row(game, listed)
        assert is_strong_beneficial_deviation(game, refs[key], set(listed), listed_dev).holds


def test_a_core_duality():
    game, _ = gen.coordination()
    assert a_core(game, ltl.parse_ltl("G (p & q)")).holds
    assert a_core(game, ltl.parse_ltl("G !p")).fails


# -- random sink games against brute force -------------------------------------------------------


@pytest.mark.parametrize("seed", range(40))
def test_sink_core_matches_brute_force(seed):
    game = gen.random_game("sink-ltl", {}, seed)
    assert is_sink_game(game)
    oracle, _ = sink_core(game)
    ours = {first_round(game, p) for p in profiles(game, 1) if core_membership(game, p).holds}
    reached = {first_round(game, p) for p in profiles(game, 1)}
    assert ours == set(oracle) & reached


@pytest.mark.parametrize("seed", range(40))
def test_sink_strong_core_matches_brute_force(seed):
    game = gen.random_game("sink-ltl", {"agents": 3}, 1000 + seed)
    oracle = set(sink_strong_core(game))
    ours = {first_round(game, p) for p in profiles(game, 1) if strong_core_membership(game, p).holds}
    assert ours == oracle & {first_round(game, p) for p in profiles(game, 1)}


@pytest.mark.parametrize("seed", range(30))
def test_sink_e_core_matches_brute_force(seed):
    rng = random.Random(seed)
    game = gen.random_game("sink-ltl", {}, 2000 + seed)
    core, _ = sink_core(game)
    outcomes = {p: game.structure.transition[(game.initial, p)] for p in core}
    for _ in range(3):
        phi = gen.random_formula(rng, game.props, 2)
        want = any(unroll_holds(phi, ltl.Lasso((game.initial,), (t,)), game.labelling) for t in outcomes.values())
        got = e_core(game, phi)
        assert got.status == (Status.HOLDS if want else Status.FAILS)
        if got.holds:
            assert unroll_holds(phi, got.witness, game.labelling)


@pytest.mark.parametrize("seed", range(20))
def test_deviation_iteration_reaches_core(seed):
    game = gen.random_game("sink-ltl", {}, 3000 + seed)
    start = gen.random_memoryless_profile(game, seed)
    trail = deviation_iteration(game, start)
    assert len(trail) - 1 <= len(game.agents)
    assert core_membership(game, trail[-1]).holds


def test_general_game_reports_bound():
    found = False
    for seed in range(30):
        game = gen.random_game("general-ltl", {"agents": 2, "states": 3}, seed)
        if is_sink_game(game):
            continue
        for p in profiles(game, 1):
            v = core_membership(game, p)
            if v.limited:
                assert v.bound == 1
                found = True
                break
        if found:
            break
    assert found


def test_beneficial_deviation_needs_losers():
    game, refs = gen.heads_tails()
    v = is_beneficial_deviation(game, refs["heads"], {1}, refs["tails"].restricted({1}))
    assert v.fails and "already wins" in v.note


def test_fulfilled_witness_is_winning():
    game, _ = gen.heads_tails()
    v = is_fulfilled(game, {1, 3})
    assert isinstance(v.witness, Deviation)
    arena = restrict(game, {1, 3}, v.witness.strategies)
    bad = ltl.disj(ltl.Not(game.goal(i)) for i in (1, 3))
    assert ltl.exists_path(arena, bad, game.labelling) is None
