"""Core, fulfilled coalitions, E-/A-core and strong core for LTL goal games.

Deviation checks against a given deviation are exact.  Questions that
quantify over strategies search machines with at most ``k`` memory states
and say so: absence of a witness is reported as ``BOUND_LIMITED(k)`` unless
the search is known to be complete.  It is complete at ``k = 1`` on sink
games, where every successor of the initial state is absorbing: the only
decision ever taken is the first one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import ltl
from ._search import JointSearch, profiles
from .game import Game, restrict
from .strategies import StrategyProfile, losers, run_of, winners
from .verdict import Deviation, Status, Verdict, fails, holds, limited


def is_sink_game(game: Game) -> bool:
    m = game.structure
    return all(m.is_absorbing(t) for t in m.successors(m.initial))


def _is_exact(game, k, exact):
    if exact is None:
        return k >= 1 and is_sink_game(game)
    return exact


def _subsets(items, *, largest_first=False, nonempty=True):
    items = sorted(items)
    sizes = range(len(items), -1, -1) if largest_first else range(len(items) + 1)
    for r in sizes:
        if r == 0 and nonempty:
            continue
        for combo in itertools.combinations(items, r):
            yield frozenset(combo)


def _some_goal_fails(game, coalition):
    return ltl.disj(ltl.Not(game.goal(j)) for j in sorted(coalition))


def _all_goals_hold(game, coalition):
    return ltl.conj(game.goal(j) for j in sorted(coalition))


def is_beneficial_deviation(game: Game, profile: StrategyProfile, coalition, deviation) -> Verdict:
    """Does ``coalition``, all losers now, win whatever the others do?"""
    coalition = frozenset(coalition)
    if not coalition:
        raise ValueError("deviating coalition must be non-empty")
    run = run_of(game, profile)
    lost = losers(game, run)
    if not coalition <= lost:
        agent = min(coalition - lost)
        return fails(run, note=f"agent {agent} already wins")
    arena = restrict(game, coalition, deviation)
    bad = ltl.exists_path(arena, _some_goal_fails(game, coalition), game.labelling)
    if bad is not None:
        return fails(bad, note="the other agents can defeat the deviation")
    return holds(Deviation(coalition, dict(deviation)))


def is_fulfilled(game: Game, coalition, k: int = 1) -> Verdict:
    """Search for a joint strategy with at most ``k`` memory states under which
    every member of ``coalition`` wins against all behaviours of the others.
    A miss is ``BOUND_LIMITED(k)``: larger memory might still succeed."""
    coalition = frozenset(coalition)
    if not coalition:
        raise ValueError("coalition must be non-empty")
    target = _some_goal_fails(game, coalition)
    search = JointSearch(game, coalition, k, key="coarse")
    for strategies, succ in search.search():
        if ltl.exists_path(search.graph(succ), target, game.labelling) is None:
            return holds(Deviation(coalition, strategies), bound=k)
    return limited(k)


class _Fulfilment:
    """Per-call cache of fulfilment verdicts."""

    def __init__(self, game, k):
        self.game, self.k = game, k
        self.cache = {}

    def __call__(self, coalition) -> Verdict:
        hit = self.cache.get(coalition)
        if hit is None:
            hit = is_fulfilled(self.game, coalition, self.k)
            self.cache[coalition] = hit
        return hit


def core_membership(game: Game, profile: StrategyProfile, k: int = 1, exact: bool | None = None, fulfilled=None) -> Verdict:
    """Is ``profile`` free of beneficial deviations (searched at bound ``k``)?"""
    exact = _is_exact(game, k, exact)
    fulfilled = fulfilled or _Fulfilment(game, k)
    run = run_of(game, profile)
    lost = losers(game, run)
    for coalition in _subsets(lost):
        v = fulfilled(coalition)
        if v.holds:
            return fails(v.witness, bound=k)
    if not lost or exact:
        return holds(run, bound=k)
    return limited(k, run)


def e_core(game: Game, phi: ltl.Formula, k: int = 1, exact: bool | None = None) -> Verdict:
    """Does some core member's run satisfy ``phi``?

    Tries winner sets W from largest to smallest: a run satisfying ``phi``
    with exactly the winners W must exist, and no coalition of the
    remaining agents may be fulfilled.
    """
    exact = _is_exact(game, k, exact)
    fulfilled = _Fulfilment(game, k)
    agents = frozenset(game.agents)
    undecided = False
    for w in _subsets(agents, largest_first=True, nonempty=False):
        rest = agents - w
        target = ltl.conj([phi, *(game.goal(i) for i in sorted(w)), *(ltl.Not(game.goal(j)) for j in sorted(rest))])
        path = ltl.exists_path(game, target)
        if path is None:
            continue
        blocked = False
        unknown = False
        for coalition in _subsets(rest):
            v = fulfilled(coalition)
            if v.holds:
                blocked = True
                break
            unknown = unknown or not exact
        if blocked:
            continue
        if not unknown:
            return holds(path, bound=k)
        undecided = True
    if undecided:
        return limited(k)
    return fails(bound=k)


def a_core(game: Game, phi: ltl.Formula, k: int = 1, exact: bool | None = None) -> Verdict:
    """Does every core member's run satisfy ``phi``?"""
    v = e_core(game, ltl.Not(phi), k, exact)
    match v.status:
        case Status.HOLDS:
            return fails(v.witness, bound=k, note="a core run violates the property")
        case Status.FAILS:
            return holds(bound=k)
    return limited(k)


# -- strong core -------------------------------------------------------------------------------


def is_strong_beneficial_deviation(game: Game, profile: StrategyProfile, coalition, deviation) -> Verdict:
    """A deviation that wins against the others' actual strategies and that
    cannot be punished without some current winner losing."""
    coalition = frozenset(coalition)
    if not coalition:
        raise ValueError("deviating coalition must be non-empty")
    run = run_of(game, profile)
    won = winners(game, run)
    if coalition & won:
        return fails(run, note=f"agent {min(coalition & won)} already wins")
    new_run = run_of(game, profile.replace(deviation))
    new_won = winners(game, new_run)
    if not coalition <= new_won:
        return fails(new_run, note="the deviation does not win against the current strategies")
    arena = restrict(game, coalition, deviation)
    punish = ltl.And(_all_goals_hold(game, won), _some_goal_fails(game, coalition))
    bad = ltl.exists_path(arena, punish, game.labelling)
    if bad is not None:
        return fails(bad, note="credible punishment exists")
    return holds(Deviation(coalition, dict(deviation)))


def _strong_deviation(game, profile, run, won, coalition, k):
    punish = ltl.And(_all_goals_hold(game, won), _some_goal_fails(game, coalition))
    search = JointSearch(game, coalition, k, key="response")
    for strategies, succ in search.search():
        new_run = run_of(game, profile.replace(strategies))
        if not coalition <= winners(game, new_run):
            continue
        if ltl.exists_path(search.graph(succ), punish, game.labelling) is None:
            return Deviation(coalition, strategies)
    return None


def strong_core_membership(game: Game, profile: StrategyProfile, k: int = 1, exact: bool | None = None) -> Verdict:
    exact = _is_exact(game, k, exact)
    run = run_of(game, profile)
    won = winners(game, run)
    lost = frozenset(game.agents) - won
    for coalition in _subsets(lost):
        dev = _strong_deviation(game, profile, run, won, coalition, k)
        if dev is not None:
            return fails(dev, bound=k)
    if not lost or exact:
        return holds(run, bound=k)
    return limited(k, run)


# -- profile enumeration and searches ----------------------------------------------------------------


def core_members(game: Game, k: int = 1, exact: bool | None = None):
    """Yield ``(profile, verdict)`` for every profile that is not refuted."""
    fulfilled = _Fulfilment(game, k)
    for p in profiles(game, k):
        v = core_membership(game, p, k, exact, fulfilled)
        if not v.fails:
            yield p, v


@dataclass(frozen=True)
class StrongCoreRow:
    profile: StrategyProfile
    winners: frozenset
    verdict: Verdict


@dataclass(frozen=True)
class StrongCoreReport:
    empty: bool
    rows: list = field(default_factory=list)
    bound: int = 1


def strong_core_empty_search(game: Game, k: int = 1, exact: bool | None = None) -> StrongCoreReport:
    """Check every profile at bound ``k``; the strong core is empty at this
    bound when every row has a strong beneficial deviation."""
    rows = []
    for p in profiles(game, k):
        won = winners(game, run_of(game, p))
        rows.append(StrongCoreRow(p, won, strong_core_membership(game, p, k, exact)))
    return StrongCoreReport(all(r.verdict.fails for r in rows), rows, k)


def deviation_iteration(game: Game, profile: StrategyProfile, k: int = 1, max_steps: int | None = None):
    """Apply fulfilled-coalition deviations until none is left.

    Deviators keep their winning strategies from then on, so every step adds
    at least one agent to the set of guaranteed winners.  Returns the list of
    visited profiles; the last one has no deviation found at bound ``k``.
    """
    fulfilled = _Fulfilment(game, k)
    trail = [profile]
    locked = frozenset()
    limit = max_steps if max_steps is not None else len(game.agents) + 1
    for _ in range(limit):
        run = run_of(game, profile)
        lost = losers(game, run)
        step = None
        for coalition in _subsets(lost):
            v = fulfilled(coalition)
            if v.holds:
                step = v.witness
                break
        if step is None:
            return trail
        assert not (step.coalition & locked)
        locked |= step.coalition
        profile = profile.replace(step.strategies)
        trail.append(profile)
    return trail
