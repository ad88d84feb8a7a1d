import json
import subprocess
import sys
from pathlib import Path

import pytest

from coopcore import gen, io
from coopcore.bisim import duplicate_state
from coopcore.cli import main

ROOT = Path(__file__).resolve().parent.parent
GAMES = ROOT / "games"
PROFILES = ROOT / "profiles"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_e_core_example(capsys):
    code, out, _ = run(capsys, "e-core", GAMES / "coordination.game", "--phi", "G (p & q)", "--bound", "1")
    assert code == 0
    assert out.startswith("HOLDS")


def test_strong_core_search_example(capsys):
    code, out, _ = run(capsys, "strong-core-search", GAMES / "empty-strong-core-4p.game")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "empty-at-bound: true"
    rows = [l for l in lines if l[:4].isdigit()]
    assert len(rows) == 16


def test_mp_core_member_example(capsys):
    code, out, _ = run(capsys, "mp-core-member", GAMES / "mp-empty-core-3p.game", "--profile", PROFILES / "stay-R.strat")
    assert code == 1
    assert "payoffs: (2, 1, 0)" in out


def test_json_verdict_schema(capsys):
    code, out, _ = run(
        capsys, "--json", "core-member", GAMES / "coordination.game", "--profile", PROFILES / "all-false.strat"
    )
    assert code == 1
    data = json.loads(out)
    assert set(data) == {"status", "witness", "bound"}
    assert data["status"] == "FAILS"
    assert set(data["witness"]) == {"coalition", "deviation"}


def test_json_lasso_witness(capsys):
    code, out, _ = run(capsys, "e-core", GAMES / "coordination.game", "--phi", "F p", "--json")
    data = json.loads(out)
    assert code == 0 and set(data["witness"]["lasso"]) == {"stem", "loop"}


def test_bound_limited_exit(capsys):
    code, out, _ = run(capsys, "fulfilled", GAMES / "heads-tails.game", "--coalition", "2,3")
    assert code == 2
    assert out.startswith("BOUND_LIMITED(1)")


def test_deviation_commands(capsys, tmp_path):
    dev = tmp_path / "dev.strat"
    dev.write_text("strategy 2\nmemoryless\nmap * : b\n")
    args = (GAMES / "non-credible.game", "--profile", PROFILES / "aa.strat", "--coalition", "2", "--deviation", dev)
    assert run(capsys, "deviation", *args)[0] == 1
    assert run(capsys, "strong-deviation", *args)[0] == 0


def test_run_and_validate(capsys):
    code, out, _ = run(capsys, "run", GAMES / "heads-tails.game", "--profile", PROFILES / "heads.strat")
    assert code == 0 and "stem [start] loop [up]" in out
    assert run(capsys, "validate", GAMES / "heads-tails.game")[0] == 0


def test_lower_bound_and_mp_e_core(capsys):
    game = GAMES / "mp-empty-core-3p.game"
    assert run(capsys, "lower-bound", game, "--coalition", "2,3", "--z", "1,0")[0] == 0
    assert run(capsys, "lower-bound", game, "--coalition", "2,3", "--z", "1,0", "--strict")[0] == 0
    assert run(capsys, "lower-bound", game, "--coalition", "1", "--z", "1")[0] == 1
    assert run(capsys, "mp-e-core", game)[0] == 1


def test_jobs_give_same_report(capsys):
    game = GAMES / "empty-strong-core-4p.game"
    _, one, _ = run(capsys, "strong-core-search", game)
    _, many, _ = run(capsys, "--jobs", "3", "strong-core-search", game)
    assert one == many


def test_bisim_command(capsys, tmp_path):
    game, _ = gen.heads_tails()
    other = tmp_path / "dup.game"
    other.write_text(io.format_game(duplicate_state(game, "up", 0)))
    assert run(capsys, "bisim", GAMES / "heads-tails.game", other)[0] == 0


def test_gen_commands(capsys, tmp_path):
    out = tmp_path / "c.game"
    assert run(capsys, "gen", "example", "coordination", "-o", out)[0] == 0
    assert out.read_text() == (GAMES / "coordination.game").read_text()
    code, text, _ = run(capsys, "gen", "cnf", "1 -2; 2")
    assert code == 0 and text.startswith("game mp")
    code, text, _ = run(capsys, "gen", "random", "mp", "--seed", "4")
    assert code == 0 and io.parse_game(text) == gen.random_game("mp", {}, 4)


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["e-core", "games/coordination.game"],
        ["e-core", "games/coordination.game", "--phi", "G (p &"],
        ["core-member", "missing.game", "--profile", "x"],
        ["fulfilled", "games/heads-tails.game", "--coalition", "7"],
        ["gen", "example", "nope"],
        ["e-core", "games/coordination.game", "--phi", "p", "--frobnicate"],
    ],
)
def test_usage_errors_exit_3(capsys, argv, monkeypatch):
    monkeypatch.chdir(ROOT)
    code, _, err = run(capsys, *argv)
    assert code == 3
    assert "error" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "coopcore", "validate", str(GAMES / "coordination.game")],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "ok"


def test_shipped_files_match_generators():
    for name in gen.EXAMPLES:
        game, refs = gen.build_example(name)
        assert (GAMES / f"{name}.game").read_text() == io.format_game(game)
        for ref, p in refs.items():
            assert (PROFILES / f"{ref}.strat").read_text() == io.format_profile(p, game)
