"""Local-pattern acceptability model.

A level is acceptable when every k x k window (including windows that hang
over the border, padded with a synthetic border symbol) appears in the
pattern set extracted from example levels, and every symbol's overall
fraction stays inside the observed range widened by a slack factor.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import PatternSetError
from .games import GameDef
from .level import Level, levels_same_game

BORDER_SYMBOL = "#"
DEFAULT_COUNT_SLACK = 0.20

Window = tuple[str, ...]  # k row-strings of length k

_EPS = 1e-12


@dataclass(frozen=True)
class Violation:
    kind: str                      # "pattern" | "count"
    position: tuple[int, int] | None = None   # window origin for pattern misses
    symbol: str | None = None
    detail: str = ""


@dataclass(frozen=True)
class PatternSet:
    game_id: str
    k: int
    border_symbol: str
    patterns: frozenset[Window]
    count_ranges: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        for w in self.patterns:
            if len(w) != self.k or any(len(row) != self.k for row in w):
                raise PatternSetError(f"window {w!r} is not {self.k}x{self.k}")

    def is_subset_of(self, other: "PatternSet") -> bool:
        return (self.k == other.k
                and self.patterns <= other.patterns
                and all(other.count_ranges.get(s, (0.0, 0.0))[0] <= lo
                        and hi <= other.count_ranges.get(s, (0.0, 0.0))[1]
                        for s, (lo, hi) in self.count_ranges.items()))


def window_origins(rows: int, cols: int, k: int) -> Iterator[tuple[int, int]]:
    for r in range(-(k - 1), rows):
        for c in range(-(k - 1), cols):
            yield r, c


def window_at(level: Level, r0: int, c0: int, k: int, border: str) -> Window:
    rows = []
    for i in range(k):
        r = r0 + i
        chars = []
        for j in range(k):
            c = c0 + j
            chars.append(level.at(r, c) if level.in_bounds(r, c) else border)
        rows.append("".join(chars))
    return tuple(rows)


def iter_windows(level: Level, k: int,
                 border: str = BORDER_SYMBOL) -> Iterator[tuple[tuple[int, int], Window]]:
    for r0, c0 in window_origins(level.rows, level.cols, k):
        yield (r0, c0), window_at(level, r0, c0, k, border)


def origins_overlapping(position: tuple[int, int], k: int) -> list[tuple[int, int]]:
    """Window origins whose k x k window covers the given cell (at most k^2)."""
    r, c = position
    return [(r0, c0)
            for r0 in range(r - k + 1, r + 1)
            for c0 in range(c - k + 1, c + 1)]


def extract_patterns(examples: Sequence[Level], k: int | None = None, *,
                     game: GameDef, slack: float = DEFAULT_COUNT_SLACK) -> PatternSet:
    """Collect every k x k window from the examples plus widened count ranges.

    The examples are acceptable under their own extraction by construction.
    """
    if not examples:
        raise PatternSetError("need at least one example level")
    levels_same_game(examples)
    if examples[0].game_id != game.game_id:
        raise PatternSetError("examples do not belong to the given game")
    if k is None:
        k = game.pattern_k
    windows: set[Window] = set()
    per_symbol: dict[str, list[float]] = {s: [] for s in game.alphabet}
    for lv in examples:
        for _, w in iter_windows(lv, k):
            windows.add(w)
        area = lv.rows * lv.cols
        for s in game.alphabet:
            per_symbol[s].append(lv.count(s) / area)
    ranges = {}
    for s, fracs in per_symbol.items():
        lo, hi = min(fracs), max(fracs)
        ranges[s] = (lo * (1.0 - slack), hi * (1.0 + slack))
    return PatternSet(game.game_id, k, BORDER_SYMBOL, frozenset(windows), ranges)


def check_acceptable(level: Level, ps: PatternSet) -> tuple[bool, list[Violation]]:
    """Hard acceptability check; violations localize the offending windows."""
    if level.game_id != ps.game_id:
        raise PatternSetError(
            f"level game {level.game_id!r} does not match pattern set {ps.game_id!r}")
    violations: list[Violation] = []
    for origin, w in iter_windows(level, ps.k, ps.border_symbol):
        if w not in ps.patterns:
            violations.append(Violation("pattern", position=origin,
                                        detail="/".join(w)))
    violations.extend(count_violations(level, ps))
    return (not violations), violations


def count_violations(level: Level, ps: PatternSet) -> list[Violation]:
    area = level.rows * level.cols
    out = []
    counts: dict[str, int] = {}
    for s in level.cells:
        counts[s] = counts.get(s, 0) + 1
    for s, (lo, hi) in ps.count_ranges.items():
        frac = counts.get(s, 0) / area
        if frac < lo - _EPS or frac > hi + _EPS:
            out.append(Violation("count", symbol=s,
                                 detail=f"fraction {frac:.4f} outside [{lo:.4f}, {hi:.4f}]"))
    for s in counts:
        if s not in ps.count_ranges:
            out.append(Violation("count", symbol=s, detail="symbol unseen in examples"))
    return out


# --- serialization (structured text) ---

def dump_patterns(ps: PatternSet) -> str:
    lines = ["# tilecorpus pattern set",
             f"game {ps.game_id}",
             f"k {ps.k}",
             f"border {ps.border_symbol}"]
    for s in sorted(ps.count_ranges):
        lo, hi = ps.count_ranges[s]
        lines.append(f"count {s} {lo!r} {hi!r}")
    for w in sorted(ps.patterns):
        lines.append("pattern")
        lines.extend(w)
    return "\n".join(lines) + "\n"


def load_patterns(text: str) -> PatternSet:
    game_id = None
    k = None
    border = BORDER_SYMBOL
    ranges: dict[str, tuple[float, float]] = {}
    windows: set[Window] = set()
    lines = [ln for ln in text.split("\n")]
    i = 0
    while i < len(lines):
        line = lines[i]
        i += 1
        if not line or line.startswith("#"):
            continue
        if line.startswith("game "):
            game_id = line[5:].strip()
        elif line.startswith("k "):
            k = int(line[2:])
        elif line.startswith("border "):
            border = line[7:].strip()
        elif line.startswith("count "):
            parts = line.split()
            if len(parts) != 4:
                raise PatternSetError(f"bad count line: {line!r}")
            ranges[parts[1]] = (float(parts[2]), float(parts[3]))
        elif line == "pattern":
            if k is None:
                raise PatternSetError("pattern before k")
            if i + k > len(lines):
                raise PatternSetError("truncated pattern block")
            windows.add(tuple(lines[i:i + k]))
            i += k
        else:
            raise PatternSetError(f"unrecognized line: {line!r}")
    if game_id is None or k is None:
        raise PatternSetError("missing game or k header")
    return PatternSet(game_id, k, border, frozenset(windows), ranges)


def save_patterns(ps: PatternSet, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_patterns(ps))


def load_patterns_file(path) -> PatternSet:
    with open(path, "r", encoding="utf-8") as fh:
        return load_patterns(fh.read())


def patterns_for(game: GameDef, variant: str, *, k: int | None = None,
                 slack: float = DEFAULT_COUNT_SLACK) -> PatternSet:
    """Extract the pattern set from the shipped example levels of a variant."""
    from .games import example_level_texts
    from .level import parse_level
    texts = example_level_texts(game.game_id, variant)
    examples = [parse_level(t, game) for _, t in texts]
    return extract_patterns(examples, k, game=game, slack=slack)
