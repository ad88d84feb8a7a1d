"""Rational verification for cooperative concurrent games."""

from .game import ConcurrentGameStructure, Game, GameError, OnePlayerArena, restrict, successor, validate_game
from .ltl import Lasso, eval_on_lasso, exists_path, parse_ltl, to_buchi
from .strategies import MachineStrategy, MemorylessStrategy, StrategyProfile, run_of, winners
from .verdict import Status, Verdict

__version__ = "0.1.0"
