"""Bisimulation between labelled concurrent game structures.

Transitions are matched per concrete action profile, so two related states
must offer the same actions to every agent.
"""

from __future__ import annotations

import random

from .game import ConcurrentGameStructure, Game


class BisimError(ValueError):
    pass


def _check_compatible(m1, m2, props1, props2):
    if tuple(m1.agents) != tuple(m2.agents):
        raise BisimError(f"agent sets differ: {list(m1.agents)} vs {list(m2.agents)}")
    if props1 is not None and props2 is not None and set(props1) != set(props2):
        raise BisimError(f"proposition alphabets differ: {sorted(props1)} vs {sorted(props2)}")


def bisimilar(m1: ConcurrentGameStructure, lab1, m2: ConcurrentGameStructure, lab2, props1=None, props2=None):
    """Coarsest bisimulation relating the initial states, or None.

    Returns the set of pairs ``(s, t)`` with ``s`` in ``m1`` and ``t`` in
    ``m2`` that end up in the same block of the refined partition.
    """
    _check_compatible(m1, m2, props1, props2)
    sides = ((0, m1, lab1), (1, m2, lab2))
    nodes = [(k, s) for k, m, _ in sides for s in m.states]
    struct = {0: m1, 1: m2}

    def avail(node):
        k, s = node
        return tuple(struct[k].actions(i, s) for i in struct[k].agents)

    key = {}
    for k, m, lab in sides:
        for s in m.states:
            key[(k, s)] = (frozenset(lab[s]), avail((k, s)))
    block = _number(nodes, key)
    while True:
        sig = {}
        for node in nodes:
            k, s = node
            m = struct[k]
            moves = tuple((p, block[(k, m.transition[(s, p)])]) for p in m.profiles(s))
            sig[node] = (block[node], moves)
        new = _number(nodes, sig)
        if len(set(new.values())) == len(set(block.values())):
            break
        block = new
    if block[(0, m1.initial)] != block[(1, m2.initial)]:
        return None
    return {(s, t) for s in m1.states for t in m2.states if block[(0, s)] == block[(1, t)]}


def _number(nodes, key):
    ids = {}
    return {n: ids.setdefault(key[n], len(ids)) for n in nodes}


def games_bisimilar(g1: Game, g2: Game):
    return bisimilar(g1.structure, g1.labelling, g2.structure, g2.labelling, g1.props or None, g2.props or None)


def check_bisimulation(rel, m1, lab1, m2, lab2) -> list:
    """Independent pair-by-pair check; returns the list of violations."""
    problems = []
    rel = set(rel)
    if (m1.initial, m2.initial) not in rel:
        problems.append("initial states are not related")
    for s, t in sorted(rel):
        if frozenset(lab1[s]) != frozenset(lab2[t]):
            problems.append(f"labels differ on ({s}, {t})")
        p1 = set(m1.profiles(s))
        p2 = set(m2.profiles(t))
        for p in sorted(p1):
            if p not in p2:
                problems.append(f"profile {p} available at {s} but not at {t}")
            elif (m1.transition[(s, p)], m2.transition[(t, p)]) not in rel:
                problems.append(f"forward step {p} from ({s}, {t}) leaves the relation")
        for p in sorted(p2):
            if p not in p1:
                problems.append(f"profile {p} available at {t} but not at {s}")
            elif (m1.transition[(s, p)], m2.transition[(t, p)]) not in rel:
                problems.append(f"backward step {p} from ({s}, {t}) leaves the relation")
    return problems


def duplicate_state(game: Game, state, seed=0) -> Game:
    """Copy of ``game`` where ``state`` gets a twin with the same label and
    moves.  Some transitions into ``state`` are redirected to the twin, and
    the twin loops on itself wherever the original does."""
    rng = random.Random(seed)
    m = game.structure
    twin = f"{state}_dup"
    while twin in m.states:
        twin += "_"
    states = m.states + (twin,)
    avail = dict(m.available)
    for i in m.agents:
        avail[(i, twin)] = m.available[(i, state)]
    trans = {}
    for (s, p), t in m.transition.items():
        if t == state and s != state and rng.random() < 0.5:
            t = twin
        trans[(s, p)] = t
    for p in m.profiles(state):
        t = m.transition[(state, p)]
        trans[(twin, p)] = twin if t == state else t
    structure = ConcurrentGameStructure(m.agents, states, m.initial, avail, trans)
    labelling = weights = None
    if game.labelling is not None:
        labelling = dict(game.labelling)
        labelling[twin] = game.labelling[state]
    if game.weights is not None:
        weights = tuple({**w, twin: w[state]} for w in game.weights)
    return Game(structure, labelling, game.goals, weights, game.props)
