"""Three-valued answers with witnesses."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .ltl import Lasso


class Status(enum.Enum):
    HOLDS = "HOLDS"
    FAILS = "FAILS"
    BOUND_LIMITED = "BOUND_LIMITED"


@dataclass(frozen=True)
class Deviation:
    """Strategies for a coalition, keyed by agent."""

    coalition: frozenset
    strategies: Mapping = field(hash=False, compare=False)

    def to_json(self):
        return {
            "coalition": sorted(self.coalition),
            "deviation": {str(i): self.strategies[i].to_json() for i in sorted(self.coalition)},
        }


@dataclass(frozen=True)
class Verdict:
    status: Status
    witness: Lasso | Deviation | None = None
    bound: int | None = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    @property
    def limited(self) -> bool:
        return self.status is Status.BOUND_LIMITED

    def __str__(self):
        if self.status is Status.BOUND_LIMITED:
            return f"BOUND_LIMITED({self.bound})"
        return self.status.value

    def to_json(self):
        match self.witness:
            case Lasso() as w:
                witness = {"lasso": w.to_json()}
            case Deviation() as d:
                witness = d.to_json()
            case _:
                witness = None
        return {"status": self.status.value, "witness": witness, "bound": self.bound}


def holds(witness=None, bound=None, note=""):
    return Verdict(Status.HOLDS, witness, bound, note)


def fails(witness=None, bound=None, note=""):
    return Verdict(Status.FAILS, witness, bound, note)


def limited(bound, witness=None, note=""):
    return Verdict(Status.BOUND_LIMITED, witness, bound, note)
