"""Machine and memoryless strategies, induced runs, winners, and enumeration.

A machine strategy reads the current game state: in machine state ``q`` at
game state ``s`` it plays ``output(q, s)`` and moves to ``step(q, s)``.  A
one-state machine is therefore exactly a memoryless strategy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping

from . import ltl
from .game import Game, StrategyError


@dataclass(frozen=True)
class MemorylessStrategy:
    choice: Mapping  # state -> action

    initial = 0
    n_states = 1

    def output(self, q, s):
        try:
            return self.choice[s]
        except KeyError:
            raise StrategyError(f"memoryless strategy has no action for state {s}") from None

    def step(self, q, s):
        return 0

    def __hash__(self):
        return hash(tuple(sorted(self.choice.items())))

    def as_machine(self, states) -> "MachineStrategy":
        return MachineStrategy(
            states=(0,),
            initial=0,
            delta={(0, s): 0 for s in states},
            out={(0, s): self.choice[s] for s in states if s in self.choice},
        )

    def to_json(self):
        return {"type": "memoryless", "map": dict(self.choice)}

    def describe(self):
        return ",".join(f"{s}:{a}" for s, a in self.choice.items())


@dataclass(frozen=True)
class MachineStrategy:
    """Finite transducer with states ``states`` and tables keyed by ``(q, s)``."""

    states: tuple
    initial: object
    delta: Mapping
    out: Mapping

    @property
    def n_states(self):
        return len(self.states)

    def output(self, q, s):
        try:
            return self.out[(q, s)]
        except KeyError:
            raise StrategyError(f"machine has no output for memory state {q} at {s}") from None

    def step(self, q, s):
        try:
            return self.delta[(q, s)]
        except KeyError:
            raise StrategyError(f"machine has no transition for memory state {q} at {s}") from None

    def __hash__(self):
        return hash((self.states, self.initial, tuple(sorted(map(repr, self.out.items())))))

    @classmethod
    def moore(cls, states, initial, delta, out_by_state, game_states):
        """Machine whose output depends on the memory state only."""
        return cls(
            tuple(states),
            initial,
            dict(delta),
            {(q, s): a for q, a in out_by_state.items() for s in game_states},
        )

    def to_json(self):
        return {
            "type": "machine",
            "states": [str(q) for q in self.states],
            "init": str(self.initial),
            "out": {f"{q} {s}": a for (q, s), a in self.out.items()},
            "next": {f"{q} {s}": str(t) for (q, s), t in self.delta.items()},
        }

    def describe(self):
        return f"machine[{len(self.states)}]"


Strategy = MemorylessStrategy | MachineStrategy


@dataclass(frozen=True)
class StrategyProfile:
    """One strategy per agent; ``strategies[i - 1]`` belongs to agent ``i``."""

    strategies: tuple

    def __getitem__(self, agent) -> Strategy:
        return self.strategies[agent - 1]

    def __len__(self):
        return len(self.strategies)

    def replace(self, deviation: Mapping) -> "StrategyProfile":
        return StrategyProfile(tuple(deviation.get(i + 1, s) for i, s in enumerate(self.strategies)))

    def restricted(self, coalition) -> dict:
        return {i: self[i] for i in coalition}

    def is_memoryless(self) -> bool:
        return all(isinstance(s, MemorylessStrategy) for s in self.strategies)


def memoryless_profile(*choices: Mapping) -> StrategyProfile:
    return StrategyProfile(tuple(MemorylessStrategy(dict(c)) for c in choices))


def constant_profile(game: Game, actions) -> StrategyProfile:
    """Each agent plays the given action wherever it is available, else its first."""
    strategies = []
    for i, a in zip(game.agents, actions):
        strategies.append(
            MemorylessStrategy(
                {s: a if a in game.structure.actions(i, s) else game.structure.actions(i, s)[0] for s in game.states}
            )
        )
    return StrategyProfile(tuple(strategies))


# -- runs --------------------------------------------------------------------------------


def run_of(game: Game, profile: StrategyProfile) -> ltl.Lasso:
    """The run induced by ``profile``, cut at the first repeated configuration."""
    m = game.structure
    s = m.initial
    qs = tuple(profile[i].initial for i in m.agents)
    seen = {}
    states = []
    while (s, qs) not in seen:
        seen[(s, qs)] = len(states)
        states.append(s)
        acts = []
        for i, q in zip(m.agents, qs):
            a = profile[i].output(q, s)
            if a not in m.available[(i, s)]:
                raise StrategyError(f"agent {i} plays unavailable action {a!r} in state {s}")
            acts.append(a)
        qs = tuple(profile[i].step(q, s) for i, q in zip(m.agents, qs))
        s = m.transition[(s, tuple(acts))]
    j = seen[(s, qs)]
    return ltl.Lasso(states[:j], states[j:])


def winners(game: Game, lasso: ltl.Lasso) -> frozenset:
    return frozenset(i for i in game.agents if ltl.eval_on_lasso(game.goal(i), lasso, game.labelling))


def losers(game: Game, lasso: ltl.Lasso) -> frozenset:
    return frozenset(game.agents) - winners(game, lasso)


# -- enumeration ---------------------------------------------------------------------------


def _memoryless_for(game, agent):
    m = game.structure
    rows = [m.actions(agent, s) for s in m.states]
    for combo in itertools.product(*rows):
        yield MemorylessStrategy(dict(zip(m.states, combo)))


def enumerate_memoryless(game: Game, coalition):
    """Every joint memoryless strategy of ``coalition`` exactly once.

    Yields dicts agent -> strategy.  Order is lexicographic: the first member
    varies slowest, and within a member earlier states vary slowest.
    """
    members = sorted(coalition)
    per = [list(_memoryless_for(game, i)) for i in members]
    for combo in itertools.product(*per):
        yield dict(zip(members, combo))


def _canonical_deltas(m, states):
    """Transition tables over memory states ``0..m-1`` in first-use order."""
    cells = [(q, s) for q in range(m) for s in states]
    for values in itertools.product(range(m), repeat=len(cells)):
        table = dict(zip(cells, values))
        # memory states must be numbered in order of first discovery
        nxt = 1
        ok = True
        for q in range(m):
            if q >= nxt:
                ok = False
                break
            for s in states:
                t = table[(q, s)]
                if t > nxt:
                    ok = False
                    break
                if t == nxt:
                    nxt += 1
            if not ok:
                break
        if ok and nxt == m:
            yield table


def is_minimal(states, n_states, delta, out) -> bool:
    """No two memory states produce the same output behaviour."""
    block = {}
    sig = {q: tuple(out[(q, s)] for s in states) for q in range(n_states)}
    ids = {}
    for q in range(n_states):
        block[q] = ids.setdefault(sig[q], len(ids))
    while True:
        ids = {}
        new = {q: ids.setdefault((block[q],) + tuple(block[delta[(q, s)]] for s in states), len(ids)) for q in range(n_states)}
        if len(ids) == len(set(block.values())):
            return len(ids) == n_states
        block = new


def machines_for(game: Game, agent, k: int):
    """Canonical minimal machines with at most ``k`` states for one agent."""
    m = game.structure
    states = m.states
    for size in range(1, k + 1):
        cells = [(q, s) for q in range(size) for s in states]
        for delta in _canonical_deltas(size, states):
            for acts in itertools.product(*(m.actions(agent, s) for (_, s) in cells)):
                out = dict(zip(cells, acts))
                if size > 1 and not is_minimal(states, size, delta, out):
                    continue
                yield MachineStrategy(tuple(range(size)), 0, delta, out)


def enumerate_machines(game: Game, coalition, k: int):
    """Joint machine strategies of ``coalition`` with at most ``k`` states each.

    One representative per behaviour class: memory states are numbered in
    discovery order, all are reachable, and no two are equivalent.
    """
    if k < 1:
        raise ValueError("memory bound must be at least 1")
    members = sorted(coalition)
    if not members:
        yield {}
        return
    per = [list(machines_for(game, i, k)) for i in members]
    for combo in itertools.product(*per):
        yield dict(zip(members, combo))
