"""Shared solver plumbing: search limits and the functional grid view."""
from __future__ import annotations

import time
from dataclasses import dataclass

from ..errors import SearchLimitExceeded
from ..games import GameDef, SOLID
from ..level import Level


@dataclass(frozen=True)
class SearchLimits:
    """Budget for one solvability search.

    Hitting a limit raises SearchLimitExceeded, which callers must treat as
    "unknown", never as "unsolvable". The state limit is the deterministic
    one; the wall-clock limit is a safety net.
    """
    max_states: int = 1_000_000
    max_seconds: float = 10.0


DEFAULT_LIMITS = SearchLimits()


class LimitTracker:
    __slots__ = ("max_states", "max_seconds", "expanded", "_t0")

    def __init__(self, limits: SearchLimits | None):
        limits = limits or DEFAULT_LIMITS
        self.max_states = limits.max_states
        self.max_seconds = limits.max_seconds
        self.expanded = 0
        self._t0 = time.monotonic()

    def tick(self) -> None:
        self.expanded += 1
        if self.expanded > self.max_states:
            raise SearchLimitExceeded(self.expanded, time.monotonic() - self._t0)
        if self.expanded % 1024 == 0:
            elapsed = time.monotonic() - self._t0
            if elapsed > self.max_seconds:
                raise SearchLimitExceeded(self.expanded, elapsed)


def functional_rows(level: Level, game: GameDef) -> list[str]:
    """Rows with decorative variants collapsed to their functional symbol.

    Solvers operate on this view, which makes solvability invariant under
    decor substitution by construction.
    """
    func = game.functional
    return [
        "".join(func(level.at(r, c)) for c in range(level.cols))
        for r in range(level.rows)
    ]


def solid_mask(rows: list[str], game: GameDef) -> list[list[bool]]:
    role = game.roles
    return [[role.get(s) == SOLID for s in row] for row in rows]
