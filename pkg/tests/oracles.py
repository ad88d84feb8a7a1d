"""Slow, obviously-correct reference implementations used by the tests.

Nothing here imports solver code from coopcore; only the plain data types
(formula nodes, lassos, games) are shared.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from coopcore import ltl


# -- temporal logic -------------------------------------------------------------------------


def unroll_holds(phi, lasso, labelling, t=0):
    """Direct semantics on the unrolled word.

    Every suffix of a lasso is determined by its position modulo the loop,
    so an Until only needs to look ``len(stem) + len(loop)`` steps ahead.
    """
    horizon = len(lasso.stem) + len(lasso.loop)
    memo = {}

    def norm(i):
        if i < len(lasso.stem):
            return i
        return len(lasso.stem) + (i - len(lasso.stem)) % len(lasso.loop)

    def sat(f, i):
        i = norm(i)
        key = (f, i)
        if key in memo:
            return memo[key]
        match f:
            case ltl.Const(value=v):
                r = v
            case ltl.Atom(name=p):
                r = p in labelling[lasso.at(i)]
            case ltl.Not(arg=g):
                r = not sat(g, i)
            case ltl.And(left=a, right=b):
                r = sat(a, i) and sat(b, i)
            case ltl.Or(left=a, right=b):
                r = sat(a, i) or sat(b, i)
            case ltl.Next(arg=g):
                r = sat(g, i + 1)
            case ltl.Until(left=a, right=b):
                r = False
                for j in range(i, i + horizon + 1):
                    if sat(b, j):
                        r = True
                        break
                    if not sat(a, j):
                        break
            case _:
                raise TypeError(f)
        memo[key] = r
        return r

    return sat(phi, t)


def all_lassos(successors, init, max_len):
    """Every lasso from ``init`` whose stem plus loop has at most ``max_len``
    positions."""
    out = []

    def go(path):
        last = path[-1]
        for t in successors(last):
            for j, s in enumerate(path):
                if s == t:
                    out.append(ltl.Lasso(tuple(path[:j]), tuple(path[j:])))
            if len(path) < max_len:
                go(path + [t])

    go([init])
    return out


# -- graphs and linear programs --------------------------------------------------------------


def brute_cycles(nodes, edges):
    """Every simple cycle as a list of edges, by depth-first search from
    each start node using only larger-indexed nodes."""
    index = {v: k for k, v in enumerate(nodes)}
    out_e = {v: [e for e in edges if e[0] == v] for v in nodes}
    cycles = []
    for start in nodes:
        def go(u, path, seen):
            for e in out_e[u]:
                v = e[1]
                if v == start:
                    cycles.append(path + [e])
                elif v not in seen and index[v] > index[start]:
                    go(v, path + [e], seen | {v})
        go(start, [], {start})
    return cycles


def reachable(nodes, edges, root):
    seen = {root}
    todo = [root]
    while todo:
        u = todo.pop()
        for e in edges:
            if e[0] == u and e[1] not in seen:
                seen.add(e[1])
                todo.append(e[1])
    return seen


def brute_min_mean(nodes, edges, root, f):
    live = reachable(nodes, edges, root)
    sub = [e for e in edges if e[0] in live]
    means = [Fraction(sum(f(e[2]) for e in c), len(c)) for c in brute_cycles([v for v in nodes if v in live], sub)]
    return min(means) if means else None


def vertex_lp_2d(c, rows, rhs):
    """Maximise ``c . x`` over ``rows x <= rhs`` in two variables by checking
    every intersection of two constraint lines.  Returns None when
    infeasible; the region is assumed bounded."""
    best = None
    for (a, b), (d, e) in itertools.combinations(zip(rows, rhs), 2):
        det = a[0] * d[1] - a[1] * d[0]
        if det == 0:
            continue
        x = Fraction(b * d[1] - a[1] * e, det)
        y = Fraction(a[0] * e - b * d[0], det)
        if all(r[0] * x + r[1] * y <= h for r, h in zip(rows, rhs)):
            val = c[0] * x + c[1] * y
            best = val if best is None else max(best, val)
    return best


# -- satisfiability -----------------------------------------------------------------------------


def sat_truth_table(clauses, n):
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in c) for c in clauses):
            return bits
    return None


# -- machines -------------------------------------------------------------------------------------


def raw_machines(states, actions, k):
    """Every machine with exactly ``k`` memory states, no canonisation."""
    cells = [(q, s) for q in range(k) for s in states]
    for delta in itertools.product(range(k), repeat=len(cells)):
        for out in itertools.product(actions, repeat=len(cells)):
            yield dict(zip(cells, delta)), dict(zip(cells, out))


def behaviour(delta, out, states, length):
    """Output word for every input word up to ``length``, as a tuple."""
    sig = []
    for n in range(1, length + 1):
        for word in itertools.product(states, repeat=n):
            q = 0
            outs = []
            for s in word:
                outs.append(out[(q, s)])
                q = delta[(q, s)]
            sig.append(tuple(outs))
    return tuple(sig)


# -- threshold games -------------------------------------------------------------------------------


def double_memoryless_threshold(g, strict=False):
    """Player 1 wins with some memoryless choice against every memoryless
    choice of player 2; each pair of choices fixes a single lasso."""
    out = {v: [e for e in g.edges if e[0] == v] for v in g.nodes}
    z = [Fraction(x) for x in g.threshold]
    v1 = list(g.v1)
    v2 = list(g.v2)
    for c1 in itertools.product(*(out[v] for v in v1)):
        pick = dict(zip(v1, c1))
        ok = True
        for c2 in itertools.product(*(out[v] for v in v2)):
            pick.update(zip(v2, c2))
            seen = {}
            path = []
            u = g.initial
            while u not in seen:
                seen[u] = len(path)
                path.append(pick[u])
                u = pick[u][1]
            loop = path[seen[u]:]
            for d, zd in enumerate(z):
                mean = Fraction(sum(e[2][d] for e in loop), len(loop))
                if mean < zd or (strict and mean == zd):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


# -- one-round (sink) games ----------------------------------------------------------------------


def sink_outcomes(game):
    """Absorbing outcome state for every first-round action profile."""
    m = game.structure
    return {p: m.transition[(m.initial, p)] for p in m.profiles(m.initial)}


def sink_winners(game, outcome):
    lasso = ltl.Lasso((game.initial,), (outcome,))
    return frozenset(i for i in game.agents if unroll_holds(game.goal(i), lasso, game.labelling))


def sink_core(game):
    """Action profiles with no beneficial deviation, by brute force."""
    outcomes = sink_outcomes(game)
    agents = tuple(game.agents)
    m = game.structure
    core = []

    def fulfilled(c):
        others = [i for i in agents if i not in c]
        for a_c in itertools.product(*(m.actions(i, game.initial) for i in sorted(c))):
            good = True
            for a_o in itertools.product(*(m.actions(j, game.initial) for j in others)):
                act = dict(zip(sorted(c), a_c)) | dict(zip(others, a_o))
                if not c <= sink_winners(game, outcomes[tuple(act[i] for i in agents)]):
                    good = False
                    break
            if good:
                return True
        return False

    coalitions = [frozenset(c) for r in range(1, len(agents) + 1) for c in itertools.combinations(agents, r)]
    ful = {c: fulfilled(c) for c in coalitions}
    for p, t in outcomes.items():
        lost = frozenset(agents) - sink_winners(game, t)
        if not any(ful[c] for c in coalitions if c <= lost):
            core.append(p)
    return core, ful


def sink_strong_core(game):
    """Action profiles with no strong beneficial deviation, by brute force."""
    outcomes = sink_outcomes(game)
    agents = tuple(game.agents)
    m = game.structure
    acts = {i: m.actions(i, game.initial) for i in agents}
    core = []
    for p, t in outcomes.items():
        won = sink_winners(game, t)
        lost = [i for i in agents if i not in won]
        blocked = False
        for r in range(1, len(lost) + 1):
            for c in itertools.combinations(lost, r):
                others = [j for j in agents if j not in c]
                for a_c in itertools.product(*(acts[i] for i in c)):
                    dev = dict(zip(agents, p)) | dict(zip(c, a_c))
                    if not set(c) <= sink_winners(game, outcomes[tuple(dev[i] for i in agents)]):
                        continue
                    punished = False
                    for a_o in itertools.product(*(acts[j] for j in others)):
                        act = dict(zip(c, a_c)) | dict(zip(others, a_o))
                        w = sink_winners(game, outcomes[tuple(act[i] for i in agents)])
                        if won <= w and not set(c) <= w:
                            punished = True
                            break
                    if not punished:
                        blocked = True
                        break
                if blocked:
                    break
            if blocked:
                break
        if not blocked:
            core.append(p)
    return core
