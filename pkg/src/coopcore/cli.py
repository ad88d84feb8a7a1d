"""Command-line interface.

Exit codes: 0 HOLDS/true, 1 FAILS/false, 2 BOUND_LIMITED, 3 usage or format error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import bisim, coop_ltl, coop_mp, gen, io, ltl
from ._search import profiles
from .game import GameError, StrategyError, validate_game
from .strategies import MemorylessStrategy, run_of, winners
from .verdict import Deviation, Status, Verdict

EXIT = {Status.HOLDS: 0, Status.FAILS: 1, Status.BOUND_LIMITED: 2}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- helpers -----------------------------------------------------------------------------


def _load_game(path, flavour=None):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    game = io.parse_game(text)
    if flavour and game.flavour != flavour:
        raise UsageError(f"{path} is a {game.flavour} game, this command needs a {flavour} game")
    validate_game(game)
    return game


def _load_strategies(path, game):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    return io.parse_strategies(text, game)


def _load_profile(path, game):
    return io.to_profile(_load_strategies(path, game), game)


def _coalition(text, game):
    try:
        members = frozenset(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise UsageError(f"bad coalition {text!r}; expected e.g. 1,3") from None
    bad = sorted(members - set(game.agents))
    if bad:
        raise UsageError(f"unknown agent {bad[0]}")
    if not members:
        raise UsageError("coalition must be non-empty")
    return members


def _decision_states(game):
    m = game.structure
    return [s for s in m.reachable() if len(m.successors(s)) > 1]


def describe_strategy(strategy, game):
    match strategy:
        case MemorylessStrategy(choice=choice):
            states = _decision_states(game) or list(game.states[:1])
            return ",".join(f"{s}:{choice.get(s)}" for s in states) if len(states) > 1 else str(choice.get(states[0]))
    return strategy.describe()


def describe_profile(profile, game):
    """Joint actions at the decision states along the run, e.g. ``0110``."""
    if not profile.is_memoryless():
        return "-"
    m = game.structure
    parts = []
    for s in dict.fromkeys(run_of(game, profile).positions()):
        if len(m.successors(s)) > 1:
            acts = [profile[i].choice[s] for i in game.agents]
            parts.append(("" if all(len(a) == 1 for a in acts) else ",").join(acts))
    return " ".join(parts) or "-"


def _fmt_lasso(lasso):
    return f"stem [{' '.join(map(str, lasso.stem))}] loop [{' '.join(map(str, lasso.loop))}]"


def _fmt_frac(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _emit_verdict(v: Verdict, args, game, extra=None):
    if args.json:
        out = v.to_json()
        if extra:
            out.update(extra)
        print(json.dumps(out))
    else:
        print(str(v))
        match v.witness:
            case ltl.Lasso() as w:
                print(f"lasso: {_fmt_lasso(w)}")
            case Deviation() as d:
                print("coalition: {" + ",".join(map(str, sorted(d.coalition))) + "}")
                for i in sorted(d.coalition):
                    print(f"  {i} -> {describe_strategy(d.strategies[i], game)}")
        if v.note:
            print(f"note: {v.note}")
        for key, val in (extra or {}).items():
            print(f"{key}: ({', '.join(map(str, val))})" if isinstance(val, list) else f"{key}: {val}")
    return EXIT[v.status]


def _emit_bool(flag, args, payload=None):
    if args.json:
        print(json.dumps({"result": bool(flag), **(payload or {})}))
    else:
        print("true" if flag else "false")
        for key, val in (payload or {}).items():
            print(f"{key}: {val}")
    return 0 if flag else 1


# -- commands -------------------------------------------------------------------------------


def cmd_validate(args):
    game = io.parse_game(Path(args.game).read_text())
    try:
        validate_game(game)
    except GameError as e:
        print(f"invalid: {e}")
        return 1
    print("ok")
    return 0


def cmd_run(args):
    game = _load_game(args.game)
    profile = _load_profile(args.profile, game)
    run = run_of(game, profile)
    payload = {"lasso": run.to_json()}
    if game.flavour == "ltl":
        payload["winners"] = sorted(winners(game, run))
    else:
        payload["payoffs"] = [_fmt_frac(x) for x in coop_mp.mp_of_lasso(game, run)]
    if args.json:
        print(json.dumps(payload))
    else:
        print(f"lasso: {_fmt_lasso(run)}")
        if "winners" in payload:
            print("winners: {" + ",".join(map(str, payload["winners"])) + "}")
        else:
            print("payoffs: (" + ", ".join(payload["payoffs"]) + ")")
    return 0


def cmd_deviation(args, strong=False):
    game = _load_game(args.game, "ltl")
    profile = _load_profile(args.profile, game)
    coalition = _coalition(args.coalition, game)
    dev = _load_strategies(args.deviation, game)
    missing = sorted(coalition - set(dev))
    if missing:
        raise UsageError(f"deviation file has no strategy for agent {missing[0]}")
    dev = {i: dev[i] for i in coalition}
    check = coop_ltl.is_strong_beneficial_deviation if strong else coop_ltl.is_beneficial_deviation
    return _emit_verdict(check(game, profile, coalition, dev), args, game)


def cmd_fulfilled(args):
    game = _load_game(args.game, "ltl")
    return _emit_verdict(coop_ltl.is_fulfilled(game, _coalition(args.coalition, game), args.bound), args, game)


def cmd_core_member(args, strong=False):
    game = _load_game(args.game, "ltl")
    profile = _load_profile(args.profile, game)
    check = coop_ltl.strong_core_membership if strong else coop_ltl.core_membership
    return _emit_verdict(check(game, profile, args.bound), args, game)


def cmd_e_core(args, universal=False):
    game = _load_game(args.game, "ltl")
    try:
        phi = ltl.parse_ltl(args.phi)
    except ltl.LtlSyntaxError as e:
        raise UsageError(str(e)) from None
    check = coop_ltl.a_core if universal else coop_ltl.e_core
    return _emit_verdict(check(game, phi, args.bound), args, game)


def _strong_rows(game_text, k, start, stop):
    game = io.parse_game(game_text)
    plist = list(profiles(game, k))[start:stop]
    rows = []
    for p in plist:
        won = winners(game, run_of(game, p))
        rows.append((describe_profile(p, game), sorted(won), coop_ltl.strong_core_membership(game, p, k)))
    return rows


def _chunks(n, jobs):
    size = max(1, -(-n // jobs))
    return [(a, min(n, a + size)) for a in range(0, n, size)]


def cmd_strong_core_search(args):
    game = _load_game(args.game, "ltl")
    text = io.format_game(game)
    n = sum(1 for _ in profiles(game, args.bound))
    if args.jobs > 1 and n > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            parts = pool.map(_strong_rows, *zip(*[(text, args.bound, a, b) for a, b in _chunks(n, args.jobs)]))
            rows = [r for part in parts for r in part]
    else:
        rows = _strong_rows(text, args.bound, 0, n)
    empty = all(v.fails for _, _, v in rows)
    if args.json:
        print(
            json.dumps(
                {
                    "empty-at-bound": empty,
                    "bound": args.bound,
                    "rows": [
                        {"profile": key, "winners": won, **v.to_json()} for key, won, v in rows
                    ],
                }
            )
        )
    else:
        print(f"empty-at-bound: {'true' if empty else 'false'}")
        print(f"bound: {args.bound}")
        print(f"rows: {len(rows)}")
        for key, won, v in rows:
            line = f"{key}  winners={{{','.join(map(str, won))}}}  {v}"
            if isinstance(v.witness, Deviation):
                d = v.witness
                dev = ", ".join(f"{i}->{describe_strategy(d.strategies[i], game)}" for i in sorted(d.coalition))
                line += f"  deviation={{{dev}}}"
            print(line)
    return 0 if empty else 1


def cmd_mp_deviation(args):
    game = _load_game(args.game, "mp")
    profile = _load_profile(args.profile, game)
    coalition = _coalition(args.coalition, game)
    dev = _load_strategies(args.deviation, game)
    dev = {i: dev[i] for i in coalition}
    v = coop_mp.mp_is_beneficial_deviation(game, profile, coalition, dev)
    return _emit_verdict(v, args, game)


def cmd_mp_core_member(args):
    game = _load_game(args.game, "mp")
    profile = _load_profile(args.profile, game)
    pay = coop_mp.payoff(game, profile)
    v = coop_mp.mp_core_membership(game, profile)
    return _emit_verdict(v, args, game, {"payoffs": [_fmt_frac(x) for x in pay]})


def _mp_core_scan(game_text, start, stop):
    game = io.parse_game(game_text)
    cache = {}
    for idx, p in enumerate(list(profiles(game, 1))[start:stop], start=start):
        pay = coop_mp.payoff(game, p)
        if coop_mp.mp_core_membership_for_payoff(game, pay, cache).holds:
            return idx
    return None


def cmd_mp_e_core(args):
    game = _load_game(args.game, "mp")
    if args.jobs > 1:
        text = io.format_game(game)
        plist = list(profiles(game, 1))
        with ProcessPoolExecutor(args.jobs) as pool:
            chunks = _chunks(len(plist), args.jobs)
            hits = list(pool.map(_mp_core_scan, [text] * len(chunks), *zip(*chunks)))
        found = next((h for h in hits if h is not None), None)
        result = None if found is None else (plist[found], coop_mp.payoff(game, plist[found]))
    else:
        result = coop_mp.mp_e_core(game)
    if result is None:
        return _emit_bool(False, args)
    profile, pay = result
    if args.json:
        print(json.dumps({"result": True, "payoffs": [_fmt_frac(x) for x in pay], "profile": io.format_profile(profile, game)}))
    else:
        print("true")
        print("payoffs: (" + ", ".join(_fmt_frac(x) for x in pay) + ")")
        print(io.format_profile(profile, game), end="")
    return 0


def cmd_lower_bound(args):
    game = _load_game(args.game, "mp")
    coalition = _coalition(args.coalition, game)
    try:
        z = [Fraction(x) for x in args.z.split(",")]
    except ValueError:
        raise UsageError(f"bad threshold {args.z!r}") from None
    if len(z) != len(coalition):
        raise UsageError(f"threshold has {len(z)} entries for {len(coalition)} coalition members")
    return _emit_bool(coop_mp.is_lower_bound(game, coalition, z, strict=args.strict), args)


def cmd_bisim(args):
    g1 = _load_game(args.game)
    g2 = _load_game(args.other)
    try:
        rel = bisim.games_bisimilar(g1, g2)
    except bisim.BisimError as e:
        raise UsageError(str(e)) from None
    pairs = sorted(rel) if rel is not None else []
    return _emit_bool(rel is not None, args, {"relation": [list(p) for p in pairs]} if rel is not None else None)


def _write(text, path):
    if path:
        Path(path).write_text(text)
    else:
        print(text, end="")


def cmd_gen(args):
    match args.what:
        case "example":
            if not args.name:
                raise UsageError("gen example needs a name: " + ", ".join(gen.EXAMPLES))
            try:
                game, refs = gen.build_example(args.name)
            except KeyError as e:
                raise UsageError(str(e.args[0])) from None
            _write(io.format_game(game), args.output)
            if args.profiles:
                out = Path(args.profiles)
                out.mkdir(parents=True, exist_ok=True)
                for name, p in refs.items():
                    (out / f"{name}.strat").write_text(io.format_profile(p, game))
        case "cnf":
            if args.name:
                clauses = [tuple(int(x) for x in c.split()) for c in args.name.split(";") if c.strip()]
                n = None
            else:
                clauses, n = gen.random_cnf(args.seed)
            game, profile = gen.cnf_to_mp_game(clauses, n)
            _write(io.format_game(game), args.output)
            if args.profiles:
                Path(args.profiles).write_text(io.format_profile(profile, game))
        case "random":
            family = args.name or "sink-ltl"
            params = {}
            for key in ("agents", "states", "actions", "sinks"):
                val = getattr(args, key)
                if val is not None:
                    params[key] = val
            try:
                game = gen.random_game(family, params, args.seed)
            except KeyError as e:
                raise UsageError(str(e.args[0])) from None
            _write(io.format_game(game), args.output)
    return 0


def build_parser():
    p = _Parser(prog="coopcore", description="Core and strong-core checks for concurrent games.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for enumeration")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, *flags, help=None):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("game")
        for f in flags:
            match f:
                case "profile":
                    sp.add_argument("--profile", required=True)
                case "coalition":
                    sp.add_argument("--coalition", required=True)
                case "deviation":
                    sp.add_argument("--deviation", required=True)
                case "bound":
                    sp.add_argument("--bound", "-k", type=int, default=1)
                case "phi":
                    sp.add_argument("--phi", required=True)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
        sp.set_defaults(fn=fn)
        return sp

    add("validate", cmd_validate, help="check a game file")
    add("run", cmd_run, "profile", help="induced run with winners or payoffs")
    add("deviation", cmd_deviation, "profile", "coalition", "deviation")
    add("strong-deviation", lambda a: cmd_deviation(a, True), "profile", "coalition", "deviation")
    add("fulfilled", cmd_fulfilled, "coalition", "bound")
    add("core-member", cmd_core_member, "profile", "bound")
    add("strong-core-member", lambda a: cmd_core_member(a, True), "profile", "bound")
    add("e-core", cmd_e_core, "phi", "bound")
    add("a-core", lambda a: cmd_e_core(a, True), "phi", "bound")
    add("strong-core-search", cmd_strong_core_search, "bound")
    add("mp-deviation", cmd_mp_deviation, "profile", "coalition", "deviation")
    add("mp-core-member", cmd_mp_core_member, "profile")
    add("mp-e-core", cmd_mp_e_core)
    lb = add("lower-bound", cmd_lower_bound, "coalition")
    lb.add_argument("--z", required=True, help="comma-separated thresholds, one per member")
    lb.add_argument("--strict", action="store_true")
    bs = add("bisim", cmd_bisim)
    bs.add_argument("other")

    g = sub.add_parser("gen", help="write example, reduction or random games")
    g.add_argument("what", choices=["example", "cnf", "random"])
    g.add_argument("name", nargs="?", help="example name, clauses like '1 -2; 2 3', or random family")
    g.add_argument("-o", "--output")
    g.add_argument("--profiles", help="where to write reference profiles")
    g.add_argument("--seed", type=int, default=0)
    for key in ("agents", "states", "actions", "sinks"):
        g.add_argument(f"--{key}", type=int)
    g.set_defaults(fn=cmd_gen)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except (io.FormatError, ltl.LtlSyntaxError, GameError, StrategyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
