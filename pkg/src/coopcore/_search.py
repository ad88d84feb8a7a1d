"""Lazy search over joint strategies of a coalition.

Strategies are built entry by entry, only where the play can actually go:
an entry ``(agent, q, s)`` fixes the action and next memory state of one
member in memory state ``q`` at game state ``s``.  The search repeatedly
takes the first node (in breadth-first order from the root) that still
lacks entries and branches on them.  Memory states are introduced in order
of first use, which removes relabelling duplicates.

Action choices at a node can be merged by a quotient key when two choices
are interchangeable for the caller's question:

* ``"coarse"``: same set of successor states (enough for questions about
  the set of possible plays);
* ``"response"``: same successor for every action of the other agents
  (enough when the opponents' actual strategies matter too);
* ``"raw"``: no merging except at states where the successor does not
  depend on the actions at all.

Merging is only sound when each node owns its entries, which is the case
for memoryless strategies or single-member coalitions; otherwise the key
falls back to ``"raw"``.
"""

from __future__ import annotations

import itertools
from collections import deque

from .game import Game
from .strategies import MachineStrategy, MemorylessStrategy, StrategyProfile


class JointSearch:
    def __init__(self, game: Game, coalition, k: int = 1, key: str = "coarse"):
        if k < 1:
            raise ValueError("memory bound must be at least 1")
        self.game = game
        self.m = game.structure
        self.coalition = tuple(sorted(coalition))
        self.free = tuple(i for i in self.m.agents if i not in self.coalition)
        self.k = k
        if k > 1 and len(self.coalition) > 1:
            key = "raw"
        self.key = key
        self._resp = {}
        self._free_profiles = {}
        self.root = (self.m.initial, (0,) * len(self.coalition))

    # successor states of (s, a_C), one per free profile
    def response(self, s, a_c):
        hit = self._resp.get((s, a_c))
        if hit is None:
            fps = self._free_profiles.get(s)
            if fps is None:
                fps = list(itertools.product(*(self.m.actions(j, s) for j in self.free)))
                self._free_profiles[s] = fps
            out = []
            for fp in fps:
                act = dict(zip(self.free, fp))
                act.update(zip(self.coalition, a_c))
                out.append(self.m.transition[(s, tuple(act[i] for i in self.m.agents))])
            hit = tuple(out)
            self._resp[(s, a_c)] = hit
        return hit

    def _key(self, s, a_c):
        if len(self.m.successors(s)) == 1:
            return None
        match self.key:
            case "coarse":
                return frozenset(self.response(s, a_c))
            case "response":
                return self.response(s, a_c)
            case _:
                return a_c

    def explore(self, entries):
        """Breadth-first walk; returns (assigned successor map, first open node)."""
        succ = {}
        seen = {self.root}
        queue = deque([self.root])
        while queue:
            node = queue.popleft()
            s, qs = node
            rows = [entries.get((i, q, s)) for i, q in zip(self.coalition, qs)]
            if any(r is None for r in rows):
                return succ, node
            a_c = tuple(r[0] for r in rows)
            qn = tuple(r[1] for r in rows)
            outs = []
            for t in self.response(s, a_c):
                nxt = (t, qn)
                if nxt not in outs:
                    outs.append(nxt)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
            succ[node] = outs
        return succ, None

    def _options(self, node, entries, used):
        s, qs = node
        missing = [(idx, i, q) for idx, (i, q) in enumerate(zip(self.coalition, qs)) if (i, q, s) not in entries]
        fixed = {idx: entries[(i, q, s)][0] for idx, (i, q) in enumerate(zip(self.coalition, qs)) if (i, q, s) in entries}
        groups = {}
        for combo in itertools.product(*(self.m.actions(i, s) for _, i, _ in missing)):
            a = dict(fixed)
            a.update((idx, c) for (idx, _, _), c in zip(missing, combo))
            a_c = tuple(a[idx] for idx in range(len(self.coalition)))
            groups.setdefault(self._key(s, a_c), combo)
        nexts = [range(min(used[idx] + 1, self.k)) for idx, _, _ in missing]
        for combo in groups.values():
            for qn in itertools.product(*nexts):
                new = dict(entries)
                used2 = list(used)
                for (idx, i, q), a, t in zip(missing, combo, qn):
                    new[(i, q, s)] = (a, t)
                    if t == used2[idx]:
                        used2[idx] += 1
                yield new, tuple(used2)

    def search(self, prune=None):
        """Yield ``(strategies, arena_successors)`` for every candidate.

        ``prune(succ)`` may reject a partial candidate given the successor
        map of the part of the arena already fixed.
        """
        start = ({}, (1,) * len(self.coalition))
        stack = [start]
        while stack:
            entries, used = stack.pop()
            succ, open_node = self.explore(entries)
            if prune is not None and prune(succ):
                continue
            if open_node is None:
                yield self.strategies(entries, used), succ
                continue
            children = list(self._options(open_node, entries, used))
            stack.extend(reversed(children))

    def graph(self, succ):
        return SuccessorGraph(self.root, succ)

    def strategies(self, entries, used):
        """Complete strategies from partial entries; unused cells get defaults."""
        out = {}
        for idx, i in enumerate(self.coalition):
            if self.k == 1:
                choice = {}
                for s in self.m.states:
                    e = entries.get((i, 0, s))
                    choice[s] = e[0] if e else self.m.actions(i, s)[0]
                out[i] = MemorylessStrategy(choice)
                continue
            n = used[idx]
            delta, act = {}, {}
            for q in range(n):
                for s in self.m.states:
                    e = entries.get((i, q, s))
                    act[(q, s)] = e[0] if e else self.m.actions(i, s)[0]
                    delta[(q, s)] = e[1] if e else q
            out[i] = MachineStrategy(tuple(range(n)), 0, delta, act)
        return out


class SuccessorGraph:
    """Arena nodes ``(state, memory states)`` given by an explicit successor map."""

    def __init__(self, root, succ):
        self.initial = root
        self.succ = succ

    def successors(self, node):
        return self.succ[node]

    @staticmethod
    def game_state(node):
        return node[0]


def profiles(game: Game, k: int = 1):
    """Strategy profiles with at most ``k`` memory states, one per distinct
    behaviour on the reachable part (choices at states whose successor does
    not depend on the actions are fixed to the first action)."""
    search = JointSearch(game, game.agents, k, key="raw")
    for strategies, _ in search.search():
        yield StrategyProfile(tuple(strategies[i] for i in game.agents))
