"""Level representation, text parsing/serialization, distances, radius-1 edits.

A level is an immutable rectangular grid of single-character tile symbols.
The text form is one row per line. Files are UTF-8 with LF-terminated rows.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import LevelFormatError, MarkerCountError, UnknownSymbolError
from .games import GameDef


@dataclass(frozen=True)
class Level:
    rows: int
    cols: int
    cells: tuple[str, ...]  # row-major
    game_id: str

    def __post_init__(self):
        if self.rows <= 0 or self.cols <= 0:
            raise LevelFormatError("level dimensions must be positive")
        if len(self.cells) != self.rows * self.cols:
            raise LevelFormatError(
                f"cell count {len(self.cells)} != {self.rows}x{self.cols}")

    def at(self, r: int, c: int) -> str:
        return self.cells[r * self.cols + c]

    def with_cell(self, r: int, c: int, symbol: str) -> "Level":
        i = r * self.cols + c
        cells = self.cells[:i] + (symbol,) + self.cells[i + 1:]
        return Level(self.rows, self.cols, cells, self.game_id)

    def row(self, r: int) -> str:
        return "".join(self.cells[r * self.cols:(r + 1) * self.cols])

    def find(self, symbol: str) -> list[tuple[int, int]]:
        return [(i // self.cols, i % self.cols)
                for i, s in enumerate(self.cells) if s == symbol]

    def count(self, symbol: str) -> int:
        return self.cells.count(symbol)

    def in_bounds(self, r: int, c: int) -> bool:
        return 0 <= r < self.rows and 0 <= c < self.cols


def parse_level(text: str, game: GameDef, *, validate_counts: bool = True) -> Level:
    """Parse newline-separated rows into a Level.

    Rejects ragged rows and symbols outside the game alphabet (reporting the
    position). With validate_counts, also enforces the structural marker
    contract: exactly one player marker, and exactly one goal tile for games
    that have a goal tile in their alphabet.
    """
    lines = text.split("\n")
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise LevelFormatError("empty level text")
    cols = len(lines[0])
    alphabet = set(game.alphabet)
    cells: list[str] = []
    for r, line in enumerate(lines):
        if len(line) != cols:
            raise LevelFormatError(
                f"ragged row {r}: expected {cols} symbols, got {len(line)}")
        for c, sym in enumerate(line):
            if sym not in alphabet:
                raise UnknownSymbolError(sym, r, c)
            cells.append(sym)
    level = Level(len(lines), cols, tuple(cells), game.game_id)
    if validate_counts:
        validate_marker_counts(level, game)
    return level


def validate_marker_counts(level: Level, game: GameDef) -> None:
    players = sum(level.count(s) for s in game.player_symbols)
    if players != 1:
        raise MarkerCountError(f"expected exactly 1 player marker, found {players}")
    if game.has_goal_tile:
        goals = sum(level.count(s) for s in game.goal_symbols)
        if goals != 1:
            raise MarkerCountError(f"expected exactly 1 goal tile, found {goals}")


def serialize_level(level: Level) -> str:
    return "\n".join(level.row(r) for r in range(level.rows))


def write_level_text(level: Level) -> str:
    """File form: LF-terminated rows, so the file ends with a newline."""
    return serialize_level(level) + "\n"


def hamming_distance(a: Level, b: Level) -> int:
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError("levels must share dimensions")
    return sum(1 for x, y in zip(a.cells, b.cells) if x != y)


@dataclass(frozen=True)
class Perturbation:
    """A single-tile substitution; swaps are not perturbations."""
    position: tuple[int, int]
    old_symbol: str
    new_symbol: str

    def apply(self, level: Level) -> Level:
        r, c = self.position
        if level.at(r, c) != self.old_symbol:
            raise ValueError(f"cell {self.position} holds {level.at(r, c)!r}, "
                             f"not {self.old_symbol!r}")
        return level.with_cell(r, c, self.new_symbol)

    def revert(self, level: Level) -> Level:
        r, c = self.position
        return level.with_cell(r, c, self.old_symbol)


def enumerate_radius1(level: Level, game: GameDef) -> Iterator[Perturbation]:
    """All radius-1 substitutions, row-major then alphabet order.

    Yields exactly rows*cols*(len(alphabet)-1) perturbations.
    """
    for r in range(level.rows):
        for c in range(level.cols):
            old = level.at(r, c)
            for sym in game.alphabet:
                if sym != old:
                    yield Perturbation((r, c), old, sym)


def sample_radius1(level: Level, game: GameDef,
                   rng: np.random.Generator) -> list[Perturbation]:
    """One uniformly random substitution per cell, in row-major cell order."""
    out = []
    for r in range(level.rows):
        for c in range(level.cols):
            old = level.at(r, c)
            alts = [s for s in game.alphabet if s != old]
            out.append(Perturbation((r, c), old, alts[int(rng.integers(len(alts)))]))
    return out


def levels_same_game(levels: Sequence[Level]) -> str:
    ids = {lv.game_id for lv in levels}
    if len(ids) != 1:
        from .errors import MixedGameError
        raise MixedGameError(f"levels span multiple games: {sorted(ids)}")
    return next(iter(ids))
