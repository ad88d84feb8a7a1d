"""Mean-payoff games: payoffs, cycle means, threshold games, and the core.

All payoffs are exact fractions.  A play's payoff for agent ``i`` is the
liminf of the running average of ``w_i`` over visited states, which on a
lasso is the mean over its loop.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from . import _kernels
from ._search import JointSearch, profiles
from ._simplex import OPTIMAL, maximise
from .game import Game, WeightedGraph, restrict
from .ltl import Lasso
from .strategies import StrategyProfile, run_of
from .verdict import Deviation, fails, holds

Rational = Fraction


def mp_of_lasso(game_or_weights, lasso: Lasso) -> tuple:
    """Loop mean of every agent's weight."""
    weights = getattr(game_or_weights, "weights", game_or_weights)
    n = len(lasso.loop)
    return tuple(Fraction(sum(w[s] for s in lasso.loop), n) for w in weights)


def payoff(game: Game, profile: StrategyProfile) -> tuple:
    return mp_of_lasso(game, run_of(game, profile))


# -- cycle means ---------------------------------------------------------------------


def _reachable(graph: WeightedGraph):
    adj = {}
    for u, v, _ in graph.edges:
        adj.setdefault(u, []).append(v)
    seen = {graph.root}
    queue = deque([graph.root])
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _scalar(weight):
    if callable(weight):
        return weight
    return lambda w: w[weight]


def min_mean_cycle(graph: WeightedGraph, weight=0) -> Fraction:
    """Least mean over cycles reachable from the root (Karp's recurrence).

    ``weight`` selects a coordinate of the edge weight vectors, or is a
    function of the weight vector.
    """
    f = _scalar(weight)
    live = _reachable(graph)
    order = [v for v in graph.nodes if v in live]
    index = {v: k for k, v in enumerate(order)}
    edges = [(index[u], index[v], int(f(w))) for u, v, w in graph.edges if u in live]
    src = np.array([e[0] for e in edges], dtype=np.int64)
    dst = np.array([e[1] for e in edges], dtype=np.int64)
    ws = np.array([e[2] for e in edges], dtype=np.int64)
    num, den = _kernels.karp_min_mean(len(order), index[graph.root], src, dst, ws)
    if den == 0:
        raise ValueError("no cycle is reachable from the root")
    return Fraction(int(num), int(den))


def max_mean_cycle(graph: WeightedGraph, weight=0) -> Fraction:
    f = _scalar(weight)
    return -min_mean_cycle(graph, lambda w: -f(w))


def enumerate_simple_cycles(graph: WeightedGraph) -> list:
    """Every simple cycle once, as a list of nodes starting at its first node."""
    g = nx.DiGraph()
    g.add_nodes_from(graph.nodes)
    g.add_edges_from((u, v) for u, v, _ in graph.edges)
    return [list(c) for c in nx.simple_cycles(g)]


def cycle_means(graph: WeightedGraph) -> list:
    """Mean weight vector of every simple cycle."""
    wmap = {(u, v): w for u, v, w in graph.edges}
    out = []
    for cyc in enumerate_simple_cycles(graph):
        total = None
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            w = wmap[(a, b)]
            total = list(w) if total is None else [x + y for x, y in zip(total, w)]
        out.append(tuple(Fraction(x, len(cyc)) for x in total))
    return out


# -- convex hull of cycle means ------------------------------------------------------------


def hull_slack(vectors, z) -> Fraction:
    """max over convex combinations x of min_i (x_i - z_i)."""
    vectors = [tuple(Fraction(v) for v in vec) for vec in vectors]
    z = [Fraction(v) for v in z]
    if not vectors:
        raise ValueError("need at least one vector")
    d = len(z)
    if d == 0:
        return Fraction(1)
    m = len(vectors)
    big = max(abs(v) for vec in vectors for v in vec) + max(abs(v) for v in z) + 1
    # variables: lambda_1..lambda_m, u = t + big  (t is the slack, u >= 0)
    a_ub, b_ub = [], []
    for i in range(d):
        a_ub.append([-vec[i] for vec in vectors] + [Fraction(1)])
        b_ub.append(big - z[i])
    a_eq = [[Fraction(1)] * m + [Fraction(0)]]
    status, value, _ = maximise([0] * m + [1], a_ub, b_ub, a_eq, [1])
    assert status == OPTIMAL
    return value - big


def hull_feasible(vectors, z, strict: bool = False) -> bool:
    """Is some convex combination of ``vectors`` >= ``z`` (or > when strict)?"""
    slack = hull_slack(vectors, z)
    return slack > 0 if strict else slack >= 0


# -- multi-mean-payoff threshold games ---------------------------------------------------------


@dataclass(frozen=True)
class MultiMpGame:
    """Two-player game on a graph: player 1 owns ``v1``, player 2 owns ``v2``.

    Player 1 wins when every coordinate's mean payoff reaches the threshold.
    """

    v1: tuple
    v2: tuple
    initial: object
    edges: tuple  # (u, v, weight tuple)
    threshold: tuple

    @property
    def nodes(self):
        return self.v1 + self.v2

    def out_edges(self):
        out = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e[0]].append(e)
        return out


def _scc_cycles_feasible(nodes, edges, z, strict, cache):
    key = frozenset(edges)
    hit = cache.get(key)
    if hit is None:
        g = WeightedGraph(tuple(nodes), None, tuple(edges))
        hit = hull_feasible(cycle_means(g), z, strict)
        cache[key] = hit
    return hit


def _player1_wins_graph(root, out, z, strict, cache):
    """One-player graph: is some reachable cycle hull above the threshold?"""
    g = nx.DiGraph()
    seen = {root}
    queue = deque([root])
    g.add_node(root)
    while queue:
        u = queue.popleft()
        for (_, v, _) in out[u]:
            g.add_edge(u, v)
            if v not in seen:
                seen.add(v)
                queue.append(v)
    for comp in nx.strongly_connected_components(g):
        inner = [e for u in comp for e in out[u] if e[1] in comp]
        if not inner:
            continue
        if _scc_cycles_feasible(comp, inner, z, strict, cache):
            return True
    return False


def solve_threshold(g: MultiMpGame, strict: bool = False) -> bool:
    """Does player 1 win?  Player 2's memoryless strategies are enumerated,
    restricted to the nodes that can be reached under the choices so far."""
    out = g.out_edges()
    for v in g.nodes:
        if not out[v]:
            raise ValueError(f"node {v} has no outgoing edge")
    v2 = set(g.v2)
    z = tuple(Fraction(x) for x in g.threshold)
    cache = {}

    def reach_open(choice):
        seen = {g.initial}
        queue = deque([g.initial])
        while queue:
            u = queue.popleft()
            if u in v2:
                if u not in choice:
                    return u
                nexts = [choice[u]]
            else:
                nexts = out[u]
            for e in nexts:
                if e[1] not in seen:
                    seen.add(e[1])
                    queue.append(e[1])
        return None

    stack = [{}]
    while stack:
        choice = stack.pop()
        u = reach_open(choice)
        if u is None:
            residual = {v: ([choice[v]] if v in v2 and v in choice else out[v]) for v in g.nodes}
            if not _player1_wins_graph(g.initial, residual, z, strict, cache):
                return False
            continue
        for e in reversed(out[u]):
            stack.append({**choice, u: e})
    return True


def lower_bound_game(game: Game, coalition, z) -> MultiMpGame:
    """Turn-based game where the coalition picks its joint action and the
    others then pick the successor.  Both half-steps carry the coalition's
    weights at the current state, so mean payoffs are unchanged."""
    m = game.structure
    members = tuple(sorted(coalition))
    others = tuple(i for i in m.agents if i not in members)
    v1, v2, edges = [], [], []
    seen = {m.initial}
    queue = deque([m.initial])
    while queue:
        s = queue.popleft()
        v1.append(s)
        w = tuple(game.weights[i - 1][s] for i in members)
        moves = {}
        for a_c in itertools.product(*(m.actions(i, s) for i in members)):
            succ = set()
            for a_o in itertools.product(*(m.actions(j, s) for j in others)):
                act = dict(zip(members, a_c))
                act.update(zip(others, a_o))
                succ.add(m.transition[(s, tuple(act[i] for i in m.agents))])
            moves.setdefault(tuple(t for t in m.states if t in succ), a_c)
        for targets in moves:
            mid = ("choice", s, targets)
            v2.append(mid)
            edges.append((s, mid, w))
            for t in targets:
                edges.append((mid, t, w))
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
    return MultiMpGame(tuple(v1), tuple(v2), m.initial, tuple(edges), tuple(Fraction(x) for x in z))


def is_lower_bound(game: Game, coalition, z, strict: bool = False) -> bool:
    """Can ``coalition`` guarantee mean payoff at least ``z`` (above it when
    strict) for all its members against every behaviour of the others?"""
    return solve_threshold(lower_bound_game(game, coalition, z), strict)


# -- deviations and the core -------------------------------------------------------------------


def arena_graph(game: Game, arena) -> WeightedGraph:
    """Restricted arena as a weighted graph over its nodes."""
    edges = []
    for u in arena.nodes:
        w = tuple(game.weights[i - 1][u[0]] for i in game.agents)
        for v in arena.successors(u):
            edges.append((u, v, w))
    return WeightedGraph(arena.nodes, arena.initial, tuple(edges))


def _succ_graph(game, root, succ):
    edges = []
    for u, outs in succ.items():
        w = tuple(game.weights[i - 1][u[0]] for i in game.agents)
        for v in outs:
            edges.append((u, v, w))
    return WeightedGraph(tuple(succ), root, tuple(edges))


def _guarantees(game, graph, coalition, target):
    """Every cycle beats ``target[j]`` for each member ``j``."""
    for j in sorted(coalition):
        if min_mean_cycle(graph, j - 1) <= target[j - 1]:
            return False
    return True


def mp_is_beneficial_deviation(game: Game, profile: StrategyProfile, coalition, deviation):
    """Every play consistent with the deviation pays each member strictly more."""
    coalition = frozenset(coalition)
    if not coalition:
        raise ValueError("deviating coalition must be non-empty")
    base = mp_of_lasso(game, run_of(game, profile))
    graph = arena_graph(game, restrict(game, coalition, deviation))
    if _guarantees(game, graph, coalition, base):
        return holds(Deviation(coalition, dict(deviation)))
    return fails(note="some counter-play does not improve every member")


def _has_cycle_at_most(game, succ, coalition, target):
    """Within the part of the arena built so far, is there a cycle paying some
    member no more than its target?"""
    inner = {u: [v for v in outs if v in succ] for u, outs in succ.items()}
    if not any(inner.values()):
        return False
    root = ("root",)
    edges = [(root, u, None) for u in inner]
    for u, outs in inner.items():
        for v in outs:
            edges.append((u, v, u[0]))
    nodes = (root, *inner)
    for j in sorted(coalition):
        w = game.weights[j - 1]
        g = WeightedGraph(nodes, root, tuple(edges))
        try:
            val = min_mean_cycle(g, lambda s, w=w: 0 if s is None else w[s])
        except ValueError:
            return False
        if val <= target[j - 1]:
            return True
    return False


def find_mp_deviation(game: Game, coalition, target):
    """First memoryless joint strategy of ``coalition`` under which every
    member's payoff strictly exceeds ``target`` against all counter-play."""
    coalition = frozenset(coalition)
    search = JointSearch(game, coalition, 1, key="coarse")

    def prune(succ):
        return _has_cycle_at_most(game, succ, coalition, target)

    for strategies, succ in search.search(prune):
        if _guarantees(game, _succ_graph(game, search.root, succ), coalition, target):
            return Deviation(coalition, strategies)
    return None


def _nonempty_subsets(agents):
    agents = sorted(agents)
    for r in range(1, len(agents) + 1):
        for c in itertools.combinations(agents, r):
            yield frozenset(c)


def mp_core_membership(game: Game, profile: StrategyProfile, _cache=None):
    """No coalition has a memoryless beneficial deviation from ``profile``."""
    return mp_core_membership_for_payoff(game, payoff(game, profile), _cache)


def mp_core_membership_for_payoff(game: Game, pay, _cache=None):
    if _cache is not None and pay in _cache:
        return _cache[pay]
    verdict = holds()
    for c in _nonempty_subsets(game.agents):
        dev = find_mp_deviation(game, c, pay)
        if dev is not None:
            verdict = fails(dev)
            break
    if _cache is not None:
        _cache[pay] = verdict
    return verdict


def mp_e_core(game: Game):
    """First memoryless profile in the core with its payoff, or None."""
    cache = {}
    for p in profiles(game, 1):
        pay = payoff(game, p)
        if mp_core_membership_for_payoff(game, pay, cache).holds:
            return p, pay
    return None


def lower_bound_characterisation(game: Game, lasso: Lasso) -> bool:
    """No coalition can guarantee every member strictly more than on ``lasso``."""
    pay = mp_of_lasso(game, lasso)
    for c in _nonempty_subsets(game.agents):
        if is_lower_bound(game, c, [pay[i - 1] for i in sorted(c)], strict=True):
            return False
    return True
