"""Text formats for games and strategies.

Game files are line oriented, ``#`` starts a comment::

    game ltl|mp
    agents <n>
    states s0 s1 ...
    init s0
    props p q                        # optional alphabet
    actions <agent>|* @ <state>|* : a b ...
    label <state> : p q ...
    weight <agent> <state> : <int>
    trans <state> (a1,...,an) -> <state>   # '*' matches any action
    goal <agent> : <formula>

Strategy files hold one or more blocks::

    strategy <agent>
    memoryless
    map <state>|* : <action>

    strategy <agent>
    machine
    mstates q0 q1
    minit q0
    out <q> [<state>] : <action>
    next <q> <state>|* -> <q'>
"""

from __future__ import annotations

import itertools
import re

from . import ltl
from .game import ConcurrentGameStructure, Game
from .strategies import MachineStrategy, MemorylessStrategy, StrategyProfile


class FormatError(ValueError):
    def __init__(self, msg, line=None):
        super().__init__(f"line {line}: {msg}" if line else msg)
        self.line = line


_NAME = r"[A-Za-z0-9_'.\-]+"
_TRANS = re.compile(rf"^trans\s+({_NAME})\s*\(([^)]*)\)\s*->\s*({_NAME})$")


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _split_colon(line, no):
    if ":" not in line:
        raise FormatError("expected ':'", no)
    head, tail = line.split(":", 1)
    return head.split(), tail.strip()


def parse_game(text: str) -> Game:
    flavour = None
    n = None
    states = None
    init = None
    props = None
    actions = []  # (agent or '*', state or '*', tuple)
    labels = {}
    weights = {}
    trans_rules = []
    goals = {}
    for no, line in _lines(text):
        word = line.split()[0]
        match word:
            case "game":
                parts = line.split()
                if len(parts) != 2 or parts[1] not in ("ltl", "mp"):
                    raise FormatError("expected 'game ltl' or 'game mp'", no)
                flavour = parts[1]
            case "agents":
                try:
                    n = int(line.split()[1])
                except (IndexError, ValueError):
                    raise FormatError("expected 'agents <n>'", no) from None
                if n < 1:
                    raise FormatError("need at least one agent", no)
            case "states":
                states = tuple(line.split()[1:])
                if not states:
                    raise FormatError("no states declared", no)
            case "init":
                parts = line.split()
                if len(parts) != 2:
                    raise FormatError("expected 'init <state>'", no)
                init = parts[1]
            case "props":
                props = tuple(line.split()[1:])
            case "actions":
                head, tail = _split_colon(line, no)
                if len(head) != 4 or head[2] != "@":
                    raise FormatError("expected 'actions <agent> @ <state> : ...'", no)
                who = head[1] if head[1] == "*" else _int(head[1], no)
                acts = tuple(tail.split())
                if not acts:
                    raise FormatError("empty action list", no)
                actions.append((who, head[3], acts, no))
            case "label":
                head, tail = _split_colon(line, no)
                if len(head) != 2:
                    raise FormatError("expected 'label <state> : ...'", no)
                labels[head[1]] = frozenset(tail.split())
            case "weight":
                head, tail = _split_colon(line, no)
                if len(head) != 3:
                    raise FormatError("expected 'weight <agent> <state> : <int>'", no)
                weights[(_int(head[1], no), head[2])] = _int(tail, no)
            case "trans":
                m = _TRANS.match(line)
                if not m:
                    raise FormatError("expected 'trans <state> (a1,...,an) -> <state>'", no)
                prof = tuple(x.strip() for x in m.group(2).split(","))
                trans_rules.append((m.group(1), prof, m.group(3), no))
            case "goal":
                head, tail = _split_colon(line, no)
                if len(head) != 2:
                    raise FormatError("expected 'goal <agent> : <formula>'", no)
                try:
                    goals[_int(head[1], no)] = ltl.parse_ltl(tail)
                except ltl.LtlSyntaxError as e:
                    raise FormatError(str(e), no) from None
            case _:
                raise FormatError(f"unknown directive {word!r}", no)
    for what, val in (("game", flavour), ("agents", n), ("states", states)):
        if val is None:
            raise FormatError(f"missing '{what}' line")
    init = init or states[0]
    agents = tuple(range(1, n + 1))

    avail = {}
    for who, where, acts, no in actions:
        who_list = agents if who == "*" else (who,)
        where_list = states if where == "*" else (where,)
        for i in who_list:
            if i not in agents:
                raise FormatError(f"unknown agent {i}", no)
            for s in where_list:
                if s not in states:
                    raise FormatError(f"unknown state {s}", no)
                # specific entries override '*' entries regardless of order
                if where == "*" and (i, s) in avail and avail[(i, s)][1]:
                    continue
                avail[(i, s)] = (acts, where != "*")
    avail = {k: v[0] for k, v in avail.items()}

    trans = {}
    for s, prof, t, no in trans_rules:
        if s not in states and s != "*":
            raise FormatError(f"unknown state {s}", no)
        if len(prof) != n:
            raise FormatError(f"profile has {len(prof)} actions, expected {n}", no)
        for src in states if s == "*" else (s,):
            choices = []
            for i, a in zip(agents, prof):
                if a == "*":
                    choices.append(avail.get((i, src), ()))
                else:
                    choices.append((a,))
            for p in itertools.product(*choices):
                trans[(src, p)] = t
    structure = ConcurrentGameStructure(agents, states, init, avail, trans)

    if flavour == "ltl":
        labelling = {s: labels.get(s, frozenset()) for s in states}
        for s in labels:
            if s not in states:
                raise FormatError(f"label for unknown state {s}")
        missing = [i for i in agents if i not in goals]
        if missing:
            raise FormatError(f"no goal for agent {missing[0]}")
        return Game(structure, labelling, tuple(goals[i] for i in agents), props=props or ())
    w = []
    for i in agents:
        row = {}
        for s in states:
            if (i, s) not in weights:
                raise FormatError(f"no weight for agent {i} at state {s}")
            row[s] = weights[(i, s)]
        w.append(row)
    return Game(structure, weights=tuple(w))


def _int(text, no):
    try:
        return int(text)
    except ValueError:
        raise FormatError(f"expected an integer, got {text!r}", no) from None


def format_game(game: Game) -> str:
    """Canonical text; ``parse_game(format_game(g)) == g``."""
    m = game.structure
    out = [f"game {game.flavour}", f"agents {m.n}", "states " + " ".join(m.states), f"init {m.initial}"]
    if game.props:
        out.append("props " + " ".join(game.props))
    for i in m.agents:
        rows = {m.actions(i, s) for s in m.states}
        if len(rows) == 1:
            out.append(f"actions {i} @ * : " + " ".join(m.actions(i, m.states[0])))
        else:
            for s in m.states:
                out.append(f"actions {i} @ {s} : " + " ".join(m.actions(i, s)))
    if game.flavour == "ltl":
        for s in m.states:
            out.append(f"label {s} : {' '.join(sorted(game.labelling[s]))}".rstrip())
    else:
        for i in m.agents:
            for s in m.states:
                out.append(f"weight {i} {s} : {game.weights[i - 1][s]}")
    for s in m.states:
        targets = {m.transition[(s, p)] for p in m.profiles(s)}
        if len(targets) == 1:
            out.append(f"trans {s} ({','.join(['*'] * m.n)}) -> {targets.pop()}")
            continue
        for p in m.profiles(s):
            out.append(f"trans {s} ({','.join(p)}) -> {m.transition[(s, p)]}")
    if game.flavour == "ltl":
        for i in m.agents:
            out.append(f"goal {i} : {ltl.to_text(game.goal(i))}")
    return "\n".join(out) + "\n"


# -- strategies -----------------------------------------------------------------------------------


def parse_strategies(text: str, game: Game) -> dict:
    """Strategies by agent from a strategy file."""
    blocks = []
    for no, line in _lines(text):
        parts = line.split()
        if parts[0] == "strategy":
            if len(parts) != 2:
                raise FormatError("expected 'strategy <agent>'", no)
            blocks.append((_int(parts[1], no), no, []))
        elif not blocks:
            raise FormatError("expected 'strategy <agent>' first", no)
        else:
            blocks[-1][2].append((no, line))
    out = {}
    for agent, no, body in blocks:
        if agent not in game.agents:
            raise FormatError(f"unknown agent {agent}", no)
        if agent in out:
            raise FormatError(f"second strategy for agent {agent}", no)
        if not body:
            raise FormatError("empty strategy", no)
        kind = body[0][1]
        match kind:
            case "memoryless":
                out[agent] = _memoryless(body[1:], game)
            case "machine":
                out[agent] = _machine(body[1:], game)
            case _:
                raise FormatError("expected 'memoryless' or 'machine'", body[0][0])
    return out


def _memoryless(body, game):
    choice = {}
    for no, line in body:
        head, tail = _split_colon(line, no)
        if len(head) != 2 or head[0] != "map":
            raise FormatError("expected 'map <state> : <action>'", no)
        for s in game.states if head[1] == "*" else (head[1],):
            if s not in game.states:
                raise FormatError(f"unknown state {s}", no)
            choice[s] = tail
    return MemorylessStrategy({s: choice[s] for s in game.states if s in choice})


def _machine(body, game):
    mstates, minit = None, None
    out, delta = {}, {}
    for no, line in body:
        parts = line.split()
        match parts[0]:
            case "mstates":
                mstates = tuple(parts[1:])
            case "minit":
                minit = parts[1]
            case "out":
                head, tail = _split_colon(line, no)
                if len(head) == 2:
                    for s in game.states:
                        out[(head[1], s)] = tail
                elif len(head) == 3:
                    out[(head[1], head[2])] = tail
                else:
                    raise FormatError("expected 'out <q> [<state>] : <action>'", no)
            case "next":
                m = re.match(rf"^next\s+({_NAME})\s+({_NAME}|\*)\s*->\s*({_NAME})$", line)
                if not m:
                    raise FormatError("expected 'next <q> <state> -> <q>'", no)
                for s in game.states if m.group(2) == "*" else (m.group(2),):
                    delta[(m.group(1), s)] = m.group(3)
            case _:
                raise FormatError(f"unknown machine directive {parts[0]!r}", no)
    if not mstates:
        raise FormatError("machine without 'mstates'")
    minit = minit or mstates[0]
    for q in mstates:
        for s in game.states:
            delta.setdefault((q, s), q)
    return MachineStrategy(mstates, minit, delta, out)


def format_strategy(agent, strategy, game: Game) -> str:
    lines = [f"strategy {agent}"]
    match strategy:
        case MemorylessStrategy(choice=choice):
            lines.append("memoryless")
            lines += [f"map {s} : {choice[s]}" for s in game.states if s in choice]
        case MachineStrategy():
            lines.append("machine")
            lines.append("mstates " + " ".join(map(str, strategy.states)))
            lines.append(f"minit {strategy.initial}")
            for q in strategy.states:
                for s in game.states:
                    if (q, s) in strategy.out:
                        lines.append(f"out {q} {s} : {strategy.out[(q, s)]}")
            for q in strategy.states:
                for s in game.states:
                    lines.append(f"next {q} {s} -> {strategy.delta[(q, s)]}")
    return "\n".join(lines) + "\n"


def format_profile(profile, game: Game) -> str:
    items = profile.items() if isinstance(profile, dict) else ((i, profile[i]) for i in game.agents)
    return "".join(format_strategy(i, s, game) for i, s in items)


def to_profile(strategies: dict, game: Game) -> StrategyProfile:
    missing = [i for i in game.agents if i not in strategies]
    if missing:
        raise FormatError(f"profile has no strategy for agent {missing[0]}")
    return StrategyProfile(tuple(strategies[i] for i in game.agents))
