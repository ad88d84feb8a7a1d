"""Builders for the worked example games, reductions, and random families."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction

from . import ltl
from .coop_mp import MultiMpGame
from .game import ConcurrentGameStructure, Game
from .strategies import MemorylessStrategy, StrategyProfile

EXAMPLES = ("coordination", "heads-tails", "non-credible", "empty-strong-core-4p", "mp-empty-core-3p")


def _uniform(agents, states, acts):
    return {(i, s): tuple(acts[i]) for i in agents for s in states}


def _const_profile(agents, states, avail, choice):
    """Memoryless profile; ``choice[i]`` is played where available."""
    out = []
    for i in agents:
        out.append(
            MemorylessStrategy({s: choice[i] if choice[i] in avail[(i, s)] else avail[(i, s)][0] for s in states})
        )
    return StrategyProfile(tuple(out))


def coordination():
    """Two agents each set one variable every round; both want both true forever."""
    agents = (1, 2)
    val = {"s11": {"p", "q"}, "s10": {"p"}, "s01": {"q"}, "s00": set()}
    states = ("s11", "s10", "s01", "s00")
    acts = {1: ("pt", "pf"), 2: ("qt", "qf")}
    avail = _uniform(agents, states, acts)
    trans = {}
    for s in states:
        for a1, a2 in itertools.product(acts[1], acts[2]):
            trans[(s, (a1, a2))] = f"s{int(a1 == 'pt')}{int(a2 == 'qt')}"
    m = ConcurrentGameStructure(agents, states, "s11", avail, trans)
    goal = ltl.parse_ltl("G (p & q)")
    game = Game(m, {s: frozenset(v) for s, v in val.items()}, (goal, goal), props=("p", "q"))
    refs = {
        "all-true": _const_profile(agents, states, avail, {1: "pt", 2: "qt"}),
        "all-false": _const_profile(agents, states, avail, {1: "pf", 2: "qf"}),
    }
    return game, refs


def heads_tails():
    """Agent 1 sends the play to one of two sinks; agents 2 and 3 have no say."""
    agents = (1, 2, 3)
    states = ("start", "up", "down")
    acts = {1: ("HEADS", "TAILS"), 2: ("idle",), 3: ("idle",)}
    avail = _uniform(agents, states, acts)
    trans = {}
    for a in acts[1]:
        trans[("start", (a, "idle", "idle"))] = "up" if a == "HEADS" else "down"
        trans[("up", (a, "idle", "idle"))] = "up"
        trans[("down", (a, "idle", "idle"))] = "down"
    m = ConcurrentGameStructure(agents, states, "start", avail, trans)
    labels = {"start": frozenset(), "up": frozenset({"p"}), "down": frozenset({"q"})}
    goals = (ltl.TRUE, ltl.parse_ltl("X G p"), ltl.parse_ltl("X G q"))
    game = Game(m, labels, goals, props=("p", "q"))
    refs = {
        "heads": _const_profile(agents, states, avail, {1: "HEADS", 2: "idle", 3: "idle"}),
        "tails": _const_profile(agents, states, avail, {1: "TAILS", 2: "idle", 3: "idle"}),
    }
    return game, refs


def non_credible():
    """One-shot game where agent 2's deviation is only deterred by a punishment
    that also hurts agent 1."""
    agents = (1, 2)
    states = ("s0", "s1", "s2", "s3")
    acts = {1: ("a", "b"), 2: ("a", "b")}
    avail = _uniform(agents, states, acts)
    table = {("a", "a"): "s1", ("a", "b"): "s2", ("b", "a"): "s3", ("b", "b"): "s3"}
    trans = {}
    for p in itertools.product("ab", "ab"):
        trans[("s0", p)] = table[p]
        for s in states[1:]:
            trans[(s, p)] = s
    m = ConcurrentGameStructure(agents, states, "s0", avail, trans)
    labels = {s: frozenset({s}) if s != "s0" else frozenset() for s in states}
    goals = (ltl.parse_ltl("X s1"), ltl.parse_ltl("X s2"))
    game = Game(m, labels, goals, props=("s1", "s2", "s3"))
    refs = {
        f"{x}{y}": _const_profile(agents, states, avail, {1: x, 2: y}) for x, y in itertools.product("ab", "ab")
    }
    return game, refs


# one-shot transition table of the four-agent game, profile -> sink
STRONG_CORE_TABLE = {
    "0000": "s1", "0001": "s1", "0010": "s2", "0011": "s2",
    "0100": "s1", "0101": "s3", "0110": "s2", "0111": "s5",
    "1000": "s6", "1001": "s4", "1010": "s4", "1011": "s4",
    "1100": "s1", "1101": "s3", "1110": "s4", "1111": "s3",
}

# profile -> (winners, one strong deviation as {agent: action})
STRONG_CORE_ROWS = {
    "0000": ({1, 2}, {3: "1"}),
    "0001": ({1, 2}, {3: "1"}),
    "0010": ({1, 3}, {2: "1", 4: "1"}),
    "0011": ({1, 3}, {2: "1", 4: "1"}),
    "0100": ({1, 2}, {3: "1"}),
    "0101": ({1, 4}, {2: "0"}),
    "0110": ({1, 3}, {2: "1", 4: "1"}),
    "0111": ({2, 4}, {1: "1"}),
    "1000": ({3, 4}, {1: "0"}),
    "1001": ({2, 3}, {1: "0"}),
    "1010": ({2, 3}, {1: "0"}),
    "1011": ({2, 3}, {1: "0"}),
    "1100": ({1, 2}, {3: "1"}),
    "1101": ({1, 4}, {2: "0"}),
    "1110": ({2, 3}, {1: "0"}),
    "1111": ({1, 4}, {2: "0"}),
}


def empty_strong_core_4p():
    """Four agents, one binary choice each, six absorbing outcomes."""
    agents = (1, 2, 3, 4)
    sinks = ("s1", "s2", "s3", "s4", "s5", "s6")
    states = ("s0",) + sinks
    avail = {}
    for i in agents:
        avail[(i, "s0")] = ("0", "1")
        for s in sinks:
            avail[(i, s)] = ("0",)
    trans = {("s0", tuple(k)): v for k, v in STRONG_CORE_TABLE.items()}
    for s in sinks:
        trans[(s, ("0",) * 4)] = s
    m = ConcurrentGameStructure(agents, states, "s0", avail, trans)
    labels = {s: frozenset({s}) for s in sinks}
    labels["s0"] = frozenset()
    goals = tuple(
        ltl.parse_ltl(f) for f in ("X (s1 | s2 | s3)", "X (s1 | s4 | s5)", "X (s2 | s4 | s6)", "X (s3 | s5 | s6)")
    )
    game = Game(m, labels, goals, props=sinks)
    refs = {key: profile_from_bits(game, key) for key in STRONG_CORE_TABLE}
    return game, refs


def profile_from_bits(game, bits):
    """Memoryless profile for the four-agent game from its first-round actions."""
    out = []
    for i, b in zip(game.agents, bits):
        out.append(MemorylessStrategy({s: b if b in game.structure.actions(i, s) else "0" for s in game.states}))
    return StrategyProfile(tuple(out))


def deviation_from_row(game, actions):
    return {
        i: MemorylessStrategy({s: a if a in game.structure.actions(i, s) else "0" for s in game.states})
        for i, a in actions.items()
    }


MP_EMPTY_TABLE = {
    ("HEADS", "HEADS", "HEADS"): "R",
    ("HEADS", "HEADS", "TAILS"): "R",
    ("HEADS", "TAILS", "HEADS"): "B",
    ("HEADS", "TAILS", "TAILS"): "P",
    ("TAILS", "HEADS", "HEADS"): "P",
    ("TAILS", "HEADS", "TAILS"): "Y",
    ("TAILS", "TAILS", "HEADS"): "B",
    ("TAILS", "TAILS", "TAILS"): "Y",
}

MP_EMPTY_WEIGHTS = {"P": (-1, -1, -1), "R": (2, 1, 0), "B": (0, 2, 1), "Y": (1, 0, 2)}


def mp_empty_core_3p():
    """Three agents choose once among three absorbing outcomes, each outcome
    loved by one pair, or stay in a costly start state."""
    agents = (1, 2, 3)
    states = ("P", "R", "B", "Y")
    acts = ("HEADS", "TAILS")
    avail = {(i, s): acts for i in agents for s in states}
    trans = {}
    for p in itertools.product(acts, repeat=3):
        trans[("P", p)] = MP_EMPTY_TABLE[p]
        for s in "RBY":
            trans[(s, p)] = s
    m = ConcurrentGameStructure(agents, states, "P", avail, trans)
    weights = tuple({s: MP_EMPTY_WEIGHTS[s][i] for s in states} for i in range(3))
    game = Game(m, weights=weights)

    def prof(p):
        return StrategyProfile(tuple(MemorylessStrategy({s: a for s in states}) for a in p))

    refs = {
        "stay-R": prof(("HEADS", "HEADS", "HEADS")),
        "stay-B": prof(("HEADS", "TAILS", "HEADS")),
        "stay-Y": prof(("TAILS", "TAILS", "TAILS")),
        "stay-P": prof(("HEADS", "TAILS", "TAILS")),
    }
    return game, refs


def build_example(name: str):
    """``(game, reference profiles)`` for one of :data:`EXAMPLES`."""
    match name:
        case "coordination":
            return coordination()
        case "heads-tails":
            return heads_tails()
        case "non-credible":
            return non_credible()
        case "empty-strong-core-4p":
            return empty_strong_core_4p()
        case "mp-empty-core-3p":
            return mp_empty_core_3p()
    raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")


# -- reductions -------------------------------------------------------------------------------


def cnf_to_mp_game(clauses, n_vars: int | None = None):
    """Mean-payoff game with one agent per clause, plus the profile that sends
    the play straight to a zero sink.  The grand coalition can improve on it
    exactly when the clauses are satisfiable.

    ``clauses`` uses signed variable indices starting at 1.
    """
    clauses = [tuple(c) for c in clauses]
    if not clauses:
        raise ValueError("need at least one clause")
    if any(not c for c in clauses):
        raise ValueError("empty clause")
    n = n_vars or max(abs(l) for c in clauses for l in c)
    agents = tuple(range(1, len(clauses) + 1))
    pos = [f"x{v}" for v in range(1, n + 1)]
    neg = [f"nx{v}" for v in range(1, n + 1)]
    states = ("init", "bad", "y0", "yn", *pos, *neg)
    acts = ("t", "f")
    avail = {(i, s): acts for i in agents for s in states}
    everyone_t = ("t",) * len(agents)
    trans = {}
    for p in itertools.product(acts, repeat=len(agents)):
        unanimous = p == everyone_t
        trans[("init", p)] = "y0" if unanimous else "bad"
        trans[("bad", p)] = "bad"
        trans[("y0", p)] = pos[0] if unanimous else neg[0]
        for v in range(n):
            for s in (pos[v], neg[v]):
                if v + 1 < n:
                    trans[(s, p)] = pos[v + 1] if unanimous else neg[v + 1]
                else:
                    trans[(s, p)] = "yn"
        trans[("yn", p)] = "y0"
    m = ConcurrentGameStructure(agents, states, "init", avail, trans)
    weights = []
    for c in clauses:
        w = {s: 0 for s in states}
        for lit in c:
            w[pos[lit - 1] if lit > 0 else neg[-lit - 1]] = 1
        weights.append(w)
    game = Game(m, weights=tuple(weights))
    profile = StrategyProfile(tuple(MemorylessStrategy({s: "f" for s in states}) for _ in agents))
    return game, profile


def assignment_deviation(game, assignment):
    """Grand-coalition strategies walking the literal states of ``assignment``."""
    choice = {s: "t" for s in game.states}
    choice["y0"] = "t" if assignment[0] else "f"
    for v in range(1, len(assignment)):
        choice[f"x{v}"] = choice[f"nx{v}"] = "t" if assignment[v] else "f"
    return {i: MemorylessStrategy(dict(choice)) for i in game.agents}


def threshold_to_mp_game(g: MultiMpGame):
    """Concurrent mean-payoff game with ``k + 1`` agents for a threshold game
    with ``k`` coordinates.  Agent 1 moves for player 1, agent ``k + 1`` for
    player 2; agents ``2..k`` only carry weights.  Every edge becomes a state
    of its own, so each original step takes two steps here: the node state
    weighs 0 and the edge state twice the edge weight.

    Returns ``(game, coalition, threshold)``.
    """
    k = len(g.threshold)
    agents = tuple(range(1, k + 2))
    node_name = {v: f"v{j}" for j, v in enumerate(g.nodes)}
    out = g.out_edges()
    edge_name = {}
    for j, e in enumerate(g.edges):
        edge_name[e] = f"e{j}"
    states = tuple(node_name[v] for v in g.nodes) + tuple(edge_name[e] for e in g.edges)
    avail, trans = {}, {}
    v1 = set(g.v1)
    for v in g.nodes:
        s = node_name[v]
        choices = tuple(edge_name[e] for e in out[v])
        mover = 1 if v in v1 else k + 1
        for i in agents:
            avail[(i, s)] = choices if i == mover else ("0",)
        for e in out[v]:
            p = tuple(edge_name[e] if i == mover else "0" for i in agents)
            trans[(s, p)] = edge_name[e]
    for e in g.edges:
        s = edge_name[e]
        for i in agents:
            avail[(i, s)] = ("0",)
        trans[(s, ("0",) * len(agents))] = node_name[e[1]]
    m = ConcurrentGameStructure(agents, states, node_name[g.initial], avail, trans)
    weights = []
    for c in range(k):
        w = {node_name[v]: 0 for v in g.nodes}
        for e in g.edges:
            w[edge_name[e]] = 2 * e[2][c]
        weights.append(w)
    weights.append({s: 0 for s in states})
    game = Game(m, weights=tuple(weights))
    return game, frozenset(range(1, k + 1)), tuple(g.threshold)


# -- random families -----------------------------------------------------------------------------


def random_cnf(seed, n_vars=4, n_clauses=4, width=3):
    rng = random.Random(seed)
    n = rng.randint(1, n_vars)
    m = rng.randint(1, n_clauses)
    clauses = []
    for _ in range(m):
        size = rng.randint(1, min(width, n))
        vars_ = rng.sample(range(1, n + 1), size)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vars_))
    return clauses, n


def random_multi_mp(seed, nodes=5, k=2, wmax=3, owner2=0.5):
    rng = random.Random(seed)
    n = rng.randint(1, nodes)
    dims = rng.randint(1, k)
    names = [f"n{j}" for j in range(n)]
    v2 = [v for v in names if rng.random() < owner2]
    v1 = [v for v in names if v not in v2]
    edges = []
    for u in names:
        outs = rng.sample(names, rng.randint(1, min(3, n)))
        for v in outs:
            edges.append((u, v, tuple(rng.randint(-wmax, wmax) for _ in range(dims))))
    z = tuple(Fraction(rng.randint(-2 * wmax, 2 * wmax), rng.randint(1, 3)) for _ in range(dims))
    return MultiMpGame(tuple(v1), tuple(v2), names[0], tuple(edges), z)


def _random_sink_goal(rng, sinks):
    chosen = rng.sample(sinks, rng.randint(1, len(sinks)))
    body = ltl.disj(ltl.Atom(s) for s in chosen)
    if rng.random() < 0.2:
        body = ltl.Not(body)
    return ltl.Next(body)


def _random_formula(rng, props, depth):
    if depth == 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.1:
            return ltl.Const(rng.random() < 0.5)
        return ltl.Atom(rng.choice(props))
    op = rng.choice(["not", "and", "or", "X", "U", "F", "G"])
    match op:
        case "not":
            return ltl.Not(_random_formula(rng, props, depth - 1))
        case "and":
            return ltl.And(_random_formula(rng, props, depth - 1), _random_formula(rng, props, depth - 1))
        case "or":
            return ltl.Or(_random_formula(rng, props, depth - 1), _random_formula(rng, props, depth - 1))
        case "X":
            return ltl.Next(_random_formula(rng, props, depth - 1))
        case "U":
            return ltl.Until(_random_formula(rng, props, depth - 1), _random_formula(rng, props, depth - 1))
        case "F":
            return ltl.eventually(_random_formula(rng, props, depth - 1))
        case _:
            return ltl.always(_random_formula(rng, props, depth - 1))


def random_formula(seed_or_rng, props=("p", "q"), depth=3):
    rng = seed_or_rng if isinstance(seed_or_rng, random.Random) else random.Random(seed_or_rng)
    return _random_formula(rng, list(props), depth)


def random_game(family: str, params: dict | None = None, seed: int = 0) -> Game:
    """Seed-deterministic random game.

    Families: ``sink-ltl`` (one round into absorbing outcomes, goals about the
    outcome), ``general-ltl`` (random transitions, labels and goals), and
    ``mp`` (random transitions and integer weights).
    """
    params = dict(params or {})
    rng = random.Random(seed)
    n_agents = params.get("agents", rng.randint(2, 3))
    n_actions = params.get("actions", 2)
    agents = tuple(range(1, n_agents + 1))
    acts = tuple("abc"[:n_actions])
    match family:
        case "sink-ltl":
            n_sinks = params.get("sinks", rng.randint(2, 4))
            sinks = tuple(f"t{j}" for j in range(1, n_sinks + 1))
            states = ("s0",) + sinks
            avail = {(i, s): acts for i in agents for s in states}
            trans = {}
            for p in itertools.product(acts, repeat=n_agents):
                trans[("s0", p)] = rng.choice(sinks)
                for s in sinks:
                    trans[(s, p)] = s
            m = ConcurrentGameStructure(agents, states, "s0", avail, trans)
            labels = {s: frozenset({s}) for s in sinks}
            labels["s0"] = frozenset()
            goals = tuple(_random_sink_goal(rng, list(sinks)) for _ in agents)
            return Game(m, labels, goals, props=sinks)
        case "general-ltl":
            n_states = params.get("states", rng.randint(2, 4))
            states = tuple(f"s{j}" for j in range(n_states))
            avail = {(i, s): acts for i in agents for s in states}
            trans = {(s, p): rng.choice(states) for s in states for p in itertools.product(acts, repeat=n_agents)}
            m = ConcurrentGameStructure(agents, states, states[0], avail, trans)
            props = ("p", "q")
            labels = {s: frozenset(x for x in props if rng.random() < 0.5) for s in states}
            goals = tuple(_random_formula(rng, list(props), 2) for _ in agents)
            return Game(m, labels, goals, props=props)
        case "mp":
            n_states = params.get("states", rng.randint(2, 4))
            wmax = params.get("wmax", 3)
            states = tuple(f"s{j}" for j in range(n_states))
            avail = {(i, s): acts for i in agents for s in states}
            trans = {(s, p): rng.choice(states) for s in states for p in itertools.product(acts, repeat=n_agents)}
            m = ConcurrentGameStructure(agents, states, states[0], avail, trans)
            weights = tuple({s: rng.randint(-wmax, wmax) for s in states} for _ in agents)
            return Game(m, weights=weights)
    raise KeyError(f"unknown family {family!r}")


def random_memoryless_profile(game: Game, seed) -> StrategyProfile:
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    return StrategyProfile(
        tuple(MemorylessStrategy({s: rng.choice(game.structure.actions(i, s)) for s in game.states}) for i in game.agents)
    )
