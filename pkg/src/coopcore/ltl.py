"""LTL formulas: syntax, parsing, evaluation on lassos, Büchi translation and
existential path checking over finite arenas."""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping

import numpy as np

from . import _kernels


# -- syntax ---------------------------------------------------------------------


class Formula:
    """Base class for formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True, slots=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Next(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class Until(Formula):
    left: Formula
    right: Formula


TRUE = Const(True)
FALSE = Const(False)


def eventually(f: Formula) -> Formula:
    return Until(TRUE, f)


def always(f: Formula) -> Formula:
    return Not(Until(TRUE, Not(f)))


def implies(a: Formula, b: Formula) -> Formula:
    return Or(Not(a), b)


def iff(a: Formula, b: Formula) -> Formula:
    return Or(And(a, b), And(Not(a), Not(b)))


def conj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def disj(parts: Iterable[Formula]) -> Formula:
    parts = list(parts)
    if not parts:
        return FALSE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def atoms(f: Formula) -> frozenset[str]:
    match f:
        case Atom(name):
            return frozenset([name])
        case Const():
            return frozenset()
        case Not(a) | Next(a):
            return atoms(a)
        case And(a, b) | Or(a, b) | Until(a, b):
            return atoms(a) | atoms(b)
    raise TypeError(f"not a formula: {f!r}")


def size(f: Formula) -> int:
    match f:
        case Atom() | Const():
            return 1
        case Not(a) | Next(a):
            return 1 + size(a)
        case And(a, b) | Or(a, b) | Until(a, b):
            return 1 + size(a) + size(b)
    raise TypeError(f"not a formula: {f!r}")


# -- parsing ----------------------------------------------------------------------


class LtlSyntaxError(ValueError):
    def __init__(self, msg, pos, text):
        super().__init__(f"{msg} at position {pos}: {text!r}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:(?P<op><->|->|[!~&|()])|(?P<kw>true|false|X|U|F|G)(?![A-Za-z0-9_])"
    r"|(?P<atom>[a-z][a-z0-9_]*))"
)
_UNICODE = {"¬": "!", "∧": "&", "∨": "|", "→": "->", "↔": "<->"}


def _tokenize(text):
    for u, a in _UNICODE.items():
        text = text.replace(u, a)
    pos, toks = 0, []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise LtlSyntaxError("unexpected character", start, text)
        kind = m.lastgroup
        tok = m.group(kind)
        if tok == "~":
            tok = "!"
        toks.append((kind, tok, m.start(kind)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks, text


class _Parser:
    def __init__(self, text):
        self.toks, self.text = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][1] if self.toks[self.i][0] != "end" else None

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg):
        raise LtlSyntaxError(msg, self.toks[self.i][2], self.text)

    def parse(self):
        f = self.iff()
        if self.toks[self.i][0] != "end":
            self.fail(f"unexpected token {self.toks[self.i][1]!r}")
        return f

    def iff(self):
        f = self.imp()
        while self.peek() == "<->":
            self.take()
            f = iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.peek() == "->":
            self.take()
            return implies(f, self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self):
        f = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(f, self.until())
        return f

    def unary(self):
        kind, tok, _ = self.toks[self.i]
        match kind, tok:
            case "op", "!":
                self.take()
                return Not(self.unary())
            case "kw", "X":
                self.take()
                return Next(self.unary())
            case "kw", "F":
                self.take()
                return eventually(self.unary())
            case "kw", "G":
                self.take()
                return always(self.unary())
            case "kw", "true":
                self.take()
                return TRUE
            case "kw", "false":
                self.take()
                return FALSE
            case "atom", name:
                self.take()
                return Atom(name)
            case "op", "(":
                self.take()
                f = self.iff()
                if self.peek() != ")":
                    self.fail("expected ')'")
                self.take()
                return f
            case "end", _:
                self.fail("unexpected end of formula")
        self.fail(f"unexpected token {tok!r}")


def parse_ltl(text: str) -> Formula:
    """Parse concrete LTL syntax.  F, G, -> and <-> are expanded on the fly."""
    return _Parser(text).parse()


def to_text(f: Formula) -> str:
    """Print a formula so that ``parse_ltl(to_text(f)) == f``."""
    match f:
        case Const(True):
            return "true"
        case Const(False):
            return "false"
        case Atom(name):
            return name
        case Not(Until(Const(True), Not(a))):
            return f"G {_wrap(a)}"
        case Until(Const(True), a):
            return f"F {_wrap(a)}"
        case Not(a):
            return f"!{_wrap(a)}"
        case Next(a):
            return f"X {_wrap(a)}"
        case And(a, b):
            return f"({to_text(a)} & {to_text(b)})"
        case Or(a, b):
            return f"({to_text(a)} | {to_text(b)})"
        case Until(a, b):
            return f"({_wrap(a)} U {to_text(b)})"
    raise TypeError(f"not a formula: {f!r}")


def _wrap(f):
    s = to_text(f)
    if isinstance(f, (Atom, Const)) or s.startswith("("):
        return s
    return f"({s})"


# -- lassos -------------------------------------------------------------------------


@dataclass(frozen=True)
class Lasso:
    """The infinite sequence ``stem · loop^ω``."""

    stem: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "stem", tuple(self.stem))
        object.__setattr__(self, "loop", tuple(self.loop))
        if not self.loop:
            raise ValueError("lasso loop must be non-empty")

    def __len__(self):
        return len(self.stem) + len(self.loop)

    def positions(self):
        return self.stem + self.loop

    def at(self, t: int):
        """State at time ``t`` of the infinite run."""
        if t < len(self.stem):
            return self.stem[t]
        return self.loop[(t - len(self.stem)) % len(self.loop)]

    def prefix(self, n: int) -> list:
        return [self.at(t) for t in range(n)]

    def normalised(self) -> "Lasso":
        """Shortest stem and loop denoting the same state sequence."""
        loop = self.loop
        n = len(loop)
        for d in range(1, n + 1):
            if n % d == 0 and loop == loop[:d] * (n // d):
                loop = loop[:d]
                break
        stem = self.stem
        while stem and stem[-1] == loop[-1]:
            loop = (loop[-1],) + loop[:-1]
            stem = stem[:-1]
        return Lasso(stem, loop)

    def to_json(self):
        return {"stem": [str(s) for s in self.stem], "loop": [str(s) for s in self.loop]}


def check_lasso(lasso: Lasso, successors: Callable[[Hashable], Iterable]) -> None:
    seq = lasso.positions()
    nxt = list(seq[1:]) + [lasso.loop[0]]
    for t, (a, b) in enumerate(zip(seq, nxt)):
        if b not in set(successors(a)):
            raise ValueError(f"lasso is not a run: no move from {a} to {b} at position {t}")


def _label_fn(labelling):
    if callable(labelling):
        return labelling
    return lambda s: labelling[s]


def eval_on_lasso(phi: Formula, lasso: Lasso, labelling, structure=None) -> bool:
    """Truth of ``phi`` on the lasso word, at position 0.

    ``labelling`` maps states to sets of propositions (mapping or callable).
    When ``structure`` is given the lasso is first checked to be a run of it.
    """
    if structure is not None:
        check_lasso(lasso, structure.successors)
    return bool(eval_positions(phi, lasso, labelling)[0])


def eval_positions(phi: Formula, lasso: Lasso, labelling) -> np.ndarray:
    """Truth value of ``phi`` at every position of the lasso."""
    label = _label_fn(labelling)
    seq = lasso.positions()
    n = len(seq)
    k = len(lasso.stem)
    labels = [label(s) for s in seq]
    shift = np.empty(n, dtype=np.int64)
    shift[:-1] = np.arange(1, n)
    shift[-1] = k
    memo: dict[Formula, np.ndarray] = {}

    def go(f):
        hit = memo.get(f)
        if hit is not None:
            return hit
        match f:
            case Const(v):
                out = np.full(n, v, dtype=np.bool_)
            case Atom(name):
                out = np.fromiter((name in lab for lab in labels), dtype=np.bool_, count=n)
            case Not(a):
                out = ~go(a)
            case And(a, b):
                out = go(a) & go(b)
            case Or(a, b):
                out = go(a) | go(b)
            case Next(a):
                out = go(a)[shift]
            case Until(a, b):
                out = np.asarray(_kernels.until_on_lasso(go(a), go(b), k), dtype=np.bool_)
            case _:
                raise TypeError(f"not a formula: {f!r}")
        memo[f] = out
        return out

    return go(phi)


# -- Büchi translation ----------------------------------------------------------------
#
# Formulas are first put in negation normal form as plain tuples:
#   ('t',) ('f',) ('ap', p) ('nap', p) ('and', a, b) ('or', a, b)
#   ('X', a) ('U', a, b) ('R', a, b)


def _nnf(f: Formula, neg=False):
    match f:
        case Const(v):
            return ("t",) if v != neg else ("f",)
        case Atom(p):
            return ("nap", p) if neg else ("ap", p)
        case Not(a):
            return _nnf(a, not neg)
        case And(a, b):
            return ("or" if neg else "and", _nnf(a, neg), _nnf(b, neg))
        case Or(a, b):
            return ("and" if neg else "or", _nnf(a, neg), _nnf(b, neg))
        case Next(a):
            return ("X", _nnf(a, neg))
        case Until(a, b):
            return ("R" if neg else "U", _nnf(a, neg), _nnf(b, neg))
    raise TypeError(f"not a formula: {f!r}")


def _negate_literal(lit):
    match lit:
        case ("ap", p):
            return ("nap", p)
        case ("nap", p):
            return ("ap", p)
        case ("t",):
            return ("f",)
        case ("f",):
            return ("t",)


def _subformulas(g, acc):
    if g in acc:
        return
    acc.append(g)
    for child in g[1:]:
        if isinstance(child, tuple):
            _subformulas(child, acc)


@dataclass(frozen=True)
class BuchiAutomaton:
    """State-labelled Büchi automaton.

    A run reads letter ``L_t`` in state ``q_t``; the state must accept the
    letter (``pos ⊆ L`` and ``neg ∩ L = ∅``).  Initial states read the first
    letter.  Accepting runs visit ``accepting`` infinitely often.
    """

    states: tuple
    initial: frozenset
    succ: Mapping
    pos: Mapping
    neg: Mapping
    accepting: frozenset

    def reads(self, q, letter) -> bool:
        return self.pos[q] <= letter and not (self.neg[q] & letter)

    def accepts(self, lasso: Lasso, labelling) -> bool:
        """Lasso membership by emptiness of the single-path product."""
        word = _LassoGraph(lasso)
        return find_accepting_lasso(word, self, _compose(labelling, word.state)) is not None


class _LassoGraph:
    def __init__(self, lasso):
        self.seq = lasso.positions()
        self.k = len(lasso.stem)
        self.initial = 0

    def successors(self, i):
        return (i + 1,) if i + 1 < len(self.seq) else (self.k,)

    def state(self, i):
        return self.seq[i]


def _compose(labelling, proj):
    label = _label_fn(labelling)
    return lambda node: label(proj(node))


def _gpvw(root):
    """Tableau expansion; returns (nodes, acceptance sets)."""
    nodes = []  # [incoming set, old frozenset, next frozenset]
    index = {}  # (old, next) -> node id

    todo = [({"init"}, [root], frozenset(), frozenset())]
    while todo:
        incoming, new, old, nxt = todo.pop()
        if not new:
            key = (old, nxt)
            if key in index:
                nodes[index[key]][0].update(incoming)
                continue
            nid = len(nodes)
            index[key] = nid
            nodes.append([set(incoming), old, nxt])
            todo.append(({nid}, sorted(nxt, key=repr), frozenset(), frozenset()))
            continue
        eta = new[-1]
        rest = new[:-1]
        tag = eta[0]
        if tag in ("t", "f", "ap", "nap"):
            if tag == "f" or _negate_literal(eta) in old:
                continue
            todo.append((incoming, rest, old | {eta}, nxt))
        elif tag == "and":
            add = [g for g in eta[1:] if g not in old]
            todo.append((incoming, rest + add, old | {eta}, nxt))
        elif tag == "X":
            todo.append((incoming, rest, old | {eta}, nxt | {eta[1]}))
        else:
            a, b = eta[1], eta[2]
            match tag:
                case "or":
                    first, first_next, second = [a], frozenset(), [b]
                case "U":
                    first, first_next, second = [a], frozenset([eta]), [b]
                case "R":
                    first, first_next, second = [b], frozenset([eta]), [a, b]
            new_old = old | {eta}
            # pushed in reverse so the left branch is expanded first
            todo.append((set(incoming), rest + [g for g in second if g not in old], new_old, nxt))
            todo.append((set(incoming), rest + [g for g in first if g not in old], new_old, nxt | first_next))
    subs = []
    _subformulas(root, subs)
    untils = [g for g in subs if g[0] == "U"]
    acc = []
    for u in untils:
        acc.append(frozenset(i for i, (_, old, _) in enumerate(nodes) if u not in old or u[2] in old))
    return nodes, acc


@lru_cache(maxsize=512)
def to_buchi(phi: Formula) -> BuchiAutomaton:
    """Büchi automaton accepting exactly the models of ``phi``."""
    nodes, acc = _gpvw(_nnf(phi))
    succ0 = {i: [] for i in range(len(nodes))}
    for j, (incoming, _, _) in enumerate(nodes):
        for i in incoming:
            if i != "init":
                succ0[i].append(j)
    init0 = [j for j, (incoming, _, _) in enumerate(nodes) if "init" in incoming]
    pos0 = {i: frozenset(g[1] for g in old if g[0] == "ap") for i, (_, old, _) in enumerate(nodes)}
    neg0 = {i: frozenset(g[1] for g in old if g[0] == "nap") for i, (_, old, _) in enumerate(nodes)}
    if not acc:
        acc = [frozenset(range(len(nodes)))]
    m = len(acc)

    # counter degeneralisation, built from the initial states outward
    def bump(q, i):
        return (i + 1) % m if q in acc[i] else i

    initial = [(q, 0) for q in sorted(init0)]
    seen = set(initial)
    order = list(initial)
    succ = {}
    queue = deque(initial)
    while queue:
        q, i = queue.popleft()
        j = bump(q, i)
        outs = tuple((r, j) for r in sorted(succ0[q]))
        succ[(q, i)] = outs
        for t in outs:
            if t not in seen:
                seen.add(t)
                order.append(t)
                queue.append(t)
    accepting = frozenset((q, i) for (q, i) in order if i == m - 1 and q in acc[m - 1])
    return BuchiAutomaton(
        states=tuple(order),
        initial=frozenset(initial),
        succ=succ,
        pos={s: pos0[s[0]] for s in order},
        neg={s: neg0[s[0]] for s in order},
        accepting=accepting,
    )


# -- emptiness over arena × automaton ------------------------------------------------------


def find_accepting_lasso(arena, aut: BuchiAutomaton, node_label):
    """Accepting lasso of arena nodes in the product with ``aut``, or None.

    ``arena`` exposes ``initial`` and ``successors(node)``; ``node_label``
    maps an arena node to its letter.  Product states are explored breadth
    first; among accepting product states lying on a cycle the one closest
    to the root is picked and closed with a shortest cycle, so the stem and
    then the loop are as short as this search order allows.
    """
    letter_cache = {}

    def letter(n):
        lab = letter_cache.get(n)
        if lab is None:
            lab = frozenset(node_label(n))
            letter_cache[n] = lab
        return lab

    def prod_succ(p):
        n, q = p
        outs = []
        for n2 in arena.successors(n):
            lab = letter(n2)
            for q2 in aut.succ[q]:
                if aut.reads(q2, lab):
                    outs.append((n2, q2))
        return outs

    root = arena.initial
    starts = [(root, q) for q in sorted(aut.initial) if aut.reads(q, letter(root))]
    if not starts:
        return None
    parent = {}
    order = []
    adj = {}
    queue = deque()
    for s in starts:
        if s not in parent:
            parent[s] = None
            order.append(s)
            queue.append(s)
    while queue:
        p = queue.popleft()
        outs = prod_succ(p)
        adj[p] = outs
        for p2 in outs:
            if p2 not in parent:
                parent[p2] = p
                order.append(p2)
                queue.append(p2)

    candidates = [p for p in order if p[1] in aut.accepting]
    if not candidates:
        return None
    comp = _scc_ids(order, adj)
    for acc_node in candidates:
        c = comp[acc_node]
        loop = _shortest_cycle(acc_node, adj, lambda p: comp[p] == c)
        if loop is None:
            continue
        stem = []
        p = parent[acc_node]
        while p is not None:
            stem.append(p)
            p = parent[p]
        stem.reverse()
        return [p[0] for p in stem], [p[0] for p in loop]
    return None


def _shortest_cycle(start, adj, inside):
    prev = {start: None}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for p2 in adj[p]:
            if p2 == start:
                path = [p]
                while prev[path[-1]] is not None:
                    path.append(prev[path[-1]])
                path.reverse()
                return path
            if p2 not in prev and inside(p2):
                prev[p2] = p
                queue.append(p2)
    return None


def _scc_ids(nodes, adj):
    """Tarjan's algorithm, iterative.  Returns node -> component id."""
    index, low, comp = {}, {}, {}
    stack, on_stack = [], set()
    counter = 0
    ncomp = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(adj[w])))
                    pushed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
    return comp


def exists_path(arena, phi: Formula, labelling=None) -> Lasso | None:
    """A lasso from the arena's initial node satisfying ``phi``, or None.

    ``arena`` is a game structure, a game, or a restricted arena.  The
    returned lasso is over game states.  ``labelling`` defaults to the
    arena's own labelling.
    """
    if labelling is None:
        labelling = arena.labelling
    graph = getattr(arena, "structure", arena) if not hasattr(arena, "successors") else arena
    proj = getattr(graph, "game_state", lambda n: n)
    found = find_accepting_lasso(graph, to_buchi(phi), _compose(labelling, proj))
    if found is None:
        return None
    stem, loop = found
    return Lasso([proj(n) for n in stem], [proj(n) for n in loop])
