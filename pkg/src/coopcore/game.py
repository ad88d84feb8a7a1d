"""Concurrent game structures, games, and strategy-restricted arenas."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Mapping

from . import ltl


class GameError(ValueError):
    """A violated well-formedness condition."""


@dataclass(frozen=True, eq=True)
class ConcurrentGameStructure:
    """Agents ``1..n`` act simultaneously; the joint action picks the next state.

    ``available[(i, s)]`` is the tuple of actions agent ``i`` may play in ``s``
    and ``transition[(s, profile)]`` the successor, where ``profile`` is a
    tuple with one action per agent in agent order.
    """

    agents: tuple
    states: tuple
    initial: str
    available: Mapping
    transition: Mapping
    _succ: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "_succ", {})

    def __hash__(self):
        return hash((self.agents, self.states, self.initial, len(self.transition)))

    @property
    def n(self) -> int:
        return len(self.agents)

    def actions(self, agent, state) -> tuple:
        return self.available[(agent, state)]

    def profiles(self, state):
        """All available action profiles at ``state`` in lexicographic order."""
        return itertools.product(*(self.available[(i, state)] for i in self.agents))

    def successor(self, state, profile):
        return successor(self, state, profile)

    def successors(self, state) -> tuple:
        """Distinct successor states, in state declaration order."""
        hit = self._succ.get(state)
        if hit is None:
            found = {self.transition[(state, p)] for p in self.profiles(state)}
            hit = tuple(s for s in self.states if s in found)
            self._succ[state] = hit
        return hit

    def game_state(self, node):
        return node

    def is_absorbing(self, state) -> bool:
        return self.successors(state) == (state,)

    def reachable(self, start=None) -> list:
        start = self.initial if start is None else start
        seen = {start}
        order = [start]
        queue = deque([start])
        while queue:
            s = queue.popleft()
            for t in self.successors(s):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order


def successor(structure: ConcurrentGameStructure, state, profile):
    """The state reached from ``state`` when the agents play ``profile``."""
    profile = tuple(profile)
    if len(profile) != structure.n:
        raise GameError(f"profile {profile} has {len(profile)} actions, expected {structure.n}")
    for i, a in zip(structure.agents, profile):
        if a not in structure.available[(i, state)]:
            raise GameError(f"action {a!r} is not available to agent {i} in state {state}")
    return structure.transition[(state, profile)]


@dataclass(frozen=True)
class Game:
    """A structure plus preferences: LTL goals over a labelling, or state weights.

    ``goals`` and ``weights`` are indexed by agent position (agent ``i`` is
    entry ``i - 1``).  Exactly one of the two is set.
    """

    structure: ConcurrentGameStructure
    labelling: Mapping | None = None
    goals: tuple | None = None
    weights: tuple | None = None
    props: tuple = ()

    def __hash__(self):
        return hash((self.structure, self.goals))

    @property
    def flavour(self) -> str:
        return "ltl" if self.goals is not None else "mp"

    @property
    def agents(self):
        return self.structure.agents

    @property
    def states(self):
        return self.structure.states

    @property
    def initial(self):
        return self.structure.initial

    def successors(self, state):
        return self.structure.successors(state)

    def game_state(self, node):
        return node

    def goal(self, agent) -> ltl.Formula:
        return self.goals[agent - 1]

    def weight(self, agent, state) -> int:
        return self.weights[agent - 1][state]

    def label(self, state) -> frozenset:
        return self.labelling[state] if self.labelling is not None else frozenset()


def validate_game(game: Game) -> None:
    """Raise :class:`GameError` describing the first violated invariant."""
    m = game.structure
    if not m.agents:
        raise GameError("game has no agents")
    if list(m.agents) != list(range(1, len(m.agents) + 1)):
        raise GameError(f"agents must be 1..n, got {list(m.agents)}")
    if len(set(m.states)) != len(m.states):
        raise GameError("duplicate state names")
    if m.initial not in m.states:
        raise GameError(f"initial state {m.initial} is not a declared state")
    for s in m.states:
        for i in m.agents:
            acts = m.available.get((i, s))
            if not acts:
                raise GameError(f"agent {i} has no available action in state {s}")
    legal = set()
    for s in m.states:
        for p in m.profiles(s):
            legal.add((s, p))
            if (s, p) not in m.transition:
                raise GameError(f"missing transition for state {s} profile ({','.join(map(str, p))})")
            t = m.transition[(s, p)]
            if t not in m.states:
                raise GameError(f"transition from {s} on ({','.join(map(str, p))}) leads to unknown state {t}")
    for key in m.transition:
        if key not in legal:
            s, p = key
            raise GameError(f"transition defined for unavailable profile ({','.join(map(str, p))}) in state {s}")
    match game.flavour:
        case "ltl":
            if game.weights is not None:
                raise GameError("game has both goals and weights")
            if len(game.goals) != m.n:
                raise GameError(f"{len(game.goals)} goals for {m.n} agents")
            if game.labelling is None:
                raise GameError("goal game without a labelling")
            alphabet = set(game.props)
            for s in m.states:
                if s not in game.labelling:
                    raise GameError(f"state {s} has no labelling")
                if alphabet:
                    extra = set(game.labelling[s]) - alphabet
                    if extra:
                        raise GameError(f"state {s} is labelled with undeclared proposition {sorted(extra)[0]}")
            if not alphabet:
                alphabet = set().union(*(game.labelling[s] for s in m.states))
            for i, g in zip(m.agents, game.goals):
                unknown = sorted(ltl.atoms(g) - alphabet)
                if unknown:
                    raise GameError(f"goal of agent {i} mentions undeclared proposition {unknown[0]}")
        case "mp":
            if game.weights is None:
                raise GameError("game has neither goals nor weights")
            if len(game.weights) != m.n:
                raise GameError(f"{len(game.weights)} weight functions for {m.n} agents")
            for i, w in zip(m.agents, game.weights):
                for s in m.states:
                    if s not in w:
                        raise GameError(f"agent {i} has no weight for state {s}")
                    if not isinstance(w[s], int):
                        raise GameError(f"weight of agent {i} at state {s} is not an integer")


# -- restricted arenas -------------------------------------------------------------------


class StrategyError(ValueError):
    pass


class OnePlayerArena:
    """The game seen by ``Ag \\ C`` once coalition ``C`` is fixed to machines.

    Nodes are pairs ``(state, machine_states)`` with one machine state per
    coalition member in ascending agent order.  Only nodes reachable from
    the initial node are built.  ``moves[node]`` lists ``(free_profile,
    next_node)`` where ``free_profile`` gives the actions of the free agents
    in agent order.
    """

    def __init__(self, game: Game, coalition, fixed: Mapping):
        m = game.structure
        self.game = game
        self.coalition = tuple(sorted(coalition))
        missing = [i for i in self.coalition if i not in fixed]
        if missing:
            raise StrategyError(f"no strategy given for agent {missing[0]}")
        self.strategies = {i: fixed[i] for i in self.coalition}
        self.free = tuple(i for i in m.agents if i not in self.coalition)
        self.labelling = game.labelling
        pos = {i: k for k, i in enumerate(self.coalition)}
        free_choices = {}

        self.initial = (m.initial, tuple(self.strategies[i].initial for i in self.coalition))
        self.moves = {}
        order = [self.initial]
        queue = deque(order)
        seen = {self.initial}
        while queue:
            node = queue.popleft()
            s, qs = node
            fixed_act = {}
            for i in self.coalition:
                a = self.strategies[i].output(qs[pos[i]], s)
                if a not in m.available[(i, s)]:
                    raise StrategyError(
                        f"strategy of agent {i} plays unavailable action {a!r} at reachable node {node}"
                    )
                fixed_act[i] = a
            qn = tuple(self.strategies[i].step(qs[pos[i]], s) for i in self.coalition)
            if s not in free_choices:
                free_choices[s] = list(itertools.product(*(m.available[(j, s)] for j in self.free)))
            outs = []
            for fp in free_choices[s]:
                act = dict(zip(self.free, fp))
                act.update(fixed_act)
                t = m.transition[(s, tuple(act[i] for i in m.agents))]
                nxt = (t, qn)
                outs.append((fp, nxt))
                if nxt not in seen:
                    seen.add(nxt)
                    order.append(nxt)
                    queue.append(nxt)
            self.moves[node] = tuple(outs)
        self.nodes = tuple(order)
        self._succ = {}

    def successors(self, node) -> tuple:
        hit = self._succ.get(node)
        if hit is None:
            seen = []
            for _, nxt in self.moves[node]:
                if nxt not in seen:
                    seen.append(nxt)
            hit = tuple(seen)
            self._succ[node] = hit
        return hit

    @staticmethod
    def game_state(node):
        return node[0]

    def label(self, node):
        return self.game.labelling[node[0]]

    def weight(self, agent, node):
        return self.game.weights[agent - 1][node[0]]

    def edges(self):
        for n in self.nodes:
            for t in self.successors(n):
                yield n, t


def restrict(game: Game, coalition, fixed: Mapping) -> OnePlayerArena:
    """Fix the members of ``coalition`` to the given strategies."""
    return OnePlayerArena(game, coalition, fixed)


# -- weighted graphs -------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightedGraph:
    """Directed graph with integer weight vectors on edges."""

    nodes: tuple
    root: object
    edges: tuple  # (u, v, weight tuple)

    def successors(self, u):
        return tuple(v for (a, v, _) in self.edges if a == u)


def weights_to_edges(game: Game) -> WeightedGraph:
    """One edge per realisable state pair, carrying the source state's weights."""
    if game.flavour != "mp":
        raise GameError("weights_to_edges needs a mean-payoff game")
    m = game.structure
    edges = []
    for s in m.states:
        w = tuple(game.weights[i - 1][s] for i in m.agents)
        for t in m.successors(s):
            edges.append((s, t, w))
    return WeightedGraph(m.states, m.initial, tuple(edges))
