"""Non-robustness metrics.

Discrete form: radius-1 substitutions in Hamming space over levels, measuring
how often solvability and acceptability labels flip. Continuous form: labeled
points in R^d, measuring the expected proportion of neighbors within
Euclidean radius r that carry a different label (0 when the neighborhood is
empty, which matches an all-zero smallest-radius column).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import PointsFormatError, SearchLimitExceeded
from .games import CRATE, CRATE_ON_SLOT, GOAL, PORTAL, SLOT, GameDef
from .level import (Level, enumerate_radius1, levels_same_game, sample_radius1)
from .mechanics import SearchLimits, check_solvable, label_solvable
from .mechanics.witness import EdgePath, Playthrough
from .patterns import (PatternSet, check_acceptable, origins_overlapping,
                       window_at)

DEFAULT_RADII = (1e-5, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2, 1e-1)

SOLVABLE_LABEL = "solvable"
UNSOLVABLE_LABEL = "unsolvable"


# --- discrete (Hamming radius 1 over levels) ---

@dataclass(frozen=True)
class LevelBreakdown:
    index: int
    base_solvable: bool
    base_acceptable: bool
    perturbations: int
    solvability_decided: int
    solvability_flips: int
    acceptability_flips: int
    skipped: int  # solvability checks that hit the search limit


@dataclass(frozen=True)
class DiscreteReport:
    game_id: str
    mode: str
    levels_analyzed: int
    perturbations_total: int
    solvability_flip_fraction: float
    acceptability_flip_fraction: float
    skipped: int
    per_level: tuple[LevelBreakdown, ...]

    def to_dict(self) -> dict:
        return {
            "game": self.game_id,
            "mode": self.mode,
            "levels_analyzed": self.levels_analyzed,
            "perturbations_total": self.perturbations_total,
            "solvability_flip_fraction": self.solvability_flip_fraction,
            "acceptability_flip_fraction": self.acceptability_flip_fraction,
            "skipped": self.skipped,
            "per_level": [vars(b) for b in self.per_level],
        }


class _AcceptabilityDelta:
    """Acceptability of single-tile edits, checking only affected windows.

    Valid whenever the base level is itself acceptable; single-tile changes
    can only break windows overlapping the changed cell plus the two symbol
    counts involved.
    """

    def __init__(self, level: Level, ps: PatternSet):
        self.level = level
        self.ps = ps
        self.area = level.rows * level.cols
        self.counts: dict[str, int] = {}
        for s in level.cells:
            self.counts[s] = self.counts.get(s, 0) + 1

    def acceptable_after(self, perturbed: Level, position: tuple[int, int],
                         old: str, new: str) -> bool:
        ps = self.ps
        lo_new, hi_new = ps.count_ranges.get(new, (0.0, 0.0))
        frac_new = (self.counts.get(new, 0) + 1) / self.area
        if frac_new < lo_new - 1e-12 or frac_new > hi_new + 1e-12:
            return False
        lo_old, hi_old = ps.count_ranges.get(old, (0.0, 0.0))
        frac_old = (self.counts.get(old, 0) - 1) / self.area
        if frac_old < lo_old - 1e-12 or frac_old > hi_old + 1e-12:
            return False
        for origin in origins_overlapping(position, ps.k):
            w = window_at(perturbed, origin[0], origin[1], ps.k, ps.border_symbol)
            if w not in ps.patterns:
                return False
        return True


class _SolvabilityDelta:
    """Solvability of single-tile edits with a sound witness shortcut.

    When the base level is solvable, a perturbation at a cell its witness
    never touches cannot invalidate that witness, so the perturbed level is
    still solvable without any search. The exceptions are handled explicitly:
    adding an off-slot crate changes the goal condition (decided by the
    pigeonhole count or a real search), and touching portal symbols can
    re-pair portals out from under an edge path. Everything else falls back
    to replaying the witness moves and then to a full search.
    """

    def __init__(self, level: Level, game: GameDef,
                 limits: SearchLimits | None):
        self.level = level
        self.game = game
        self.limits = limits
        self.base_solvable: bool | None = None  # None: limit hit, unknown
        self.witness = None
        self.footprint: set[tuple[int, int]] = set()
        self.moves: list[tuple[int, int]] | None = None
        try:
            ok, witness = check_solvable(level, game, limits)
            self.base_solvable = ok
            self.witness = witness
        except SearchLimitExceeded:
            return
        except Exception:
            # structurally invalid bases get no shortcut, only full searches
            try:
                self.base_solvable = label_solvable(level, game, limits)
            except SearchLimitExceeded:
                self.base_solvable = None
            return
        if not ok:
            return
        if isinstance(witness, EdgePath):
            self.footprint = set(witness.nodes())
        elif isinstance(witness, Playthrough):
            for state in witness.states:
                for i, (a, b) in enumerate(zip(level.cells, state.cells)):
                    if a != b:
                        self.footprint.add((i // level.cols, i % level.cols))
            first = witness.states[0]
            for sym in ("c", "C", "{", "+"):
                self.footprint.update(first.find(sym))
            self.moves = []
            for prev, nxt in zip(witness.states, witness.states[1:]):
                p0 = _pusher_player(prev)
                p1 = _pusher_player(nxt)
                self.moves.append((p1[0] - p0[0], p1[1] - p0[1]))

    def _crate_slot_counts(self, level: Level) -> tuple[int, int]:
        crates = level.count("c") + level.count("C")
        slots = level.count("s") + level.count("C") + level.count("+")
        return crates, slots

    def _replay_moves(self, perturbed: Level) -> bool:
        """Does the base move sequence still solve the perturbed level?"""
        if self.moves is None:
            return False
        walls = set()
        slots = set()
        crates = set()
        for r in range(perturbed.rows):
            for c in range(perturbed.cols):
                sym = perturbed.at(r, c)
                if sym == "X":
                    walls.add((r, c))
                elif sym == "s":
                    slots.add((r, c))
                elif sym == "c":
                    crates.add((r, c))
                elif sym == "C":
                    crates.add((r, c))
                    slots.add((r, c))
                elif sym == "+":
                    slots.add((r, c))
        player = _pusher_player(self.level)
        if perturbed.at(*player) not in ("{", "+"):
            return False
        rows, cols = perturbed.rows, perturbed.cols
        for dr, dc in self.moves:
            nxt = (player[0] + dr, player[1] + dc)
            if not (0 <= nxt[0] < rows and 0 <= nxt[1] < cols) or nxt in walls:
                return False
            if nxt in crates:
                beyond = (nxt[0] + dr, nxt[1] + dc)
                if not (0 <= beyond[0] < rows and 0 <= beyond[1] < cols):
                    return False
                if beyond in walls or beyond in crates:
                    return False
                crates.discard(nxt)
                crates.add(beyond)
            player = nxt
        return crates <= slots

    def label_after(self, perturbed: Level, position: tuple[int, int],
                    old: str, new: str) -> bool:
        game = self.game
        if game.mechanics == "pusher":
            crates, slots = self._crate_slot_counts(perturbed)
            if crates > slots:
                return False
        if self.base_solvable and position not in self.footprint:
            roles = (game.roles.get(old), game.roles.get(new))
            if game.mechanics == "pusher":
                if CRATE not in roles:
                    # crate-on-slot births are self-satisfied; plain crate
                    # additions change the goal and need a real decision
                    return True
            elif game.mechanics == "grid-walk":
                if PORTAL not in roles:
                    return True
            # platformer/climber arcs probe cells the edge path does not
            # record, so no footprint shortcut there
        if self.base_solvable and game.mechanics == "pusher" \
                and self._replay_moves(perturbed):
            return True
        return label_solvable(perturbed, game, self.limits)


def _pusher_player(level: Level) -> tuple[int, int]:
    spots = level.find("{") + level.find("+")
    return spots[0]


def discrete_nonrobustness(levels: list[Level], game: GameDef, ps: PatternSet,
                           *, mode: str = "exhaustive", seed: int = 0,
                           limits: SearchLimits | None = None) -> DiscreteReport:
    """Flip fractions over radius-1 perturbations, averaged per level.

    Exhaustive mode tries every substitution; sampled mode tries one random
    substitution per cell (seeded). Perturbations whose solvability check
    exceeds the search limits are excluded from the solvability denominator.
    """
    if not levels:
        raise ValueError("need at least one level")
    if mode not in ("exhaustive", "sampled"):
        raise ValueError(f"unknown mode {mode!r}")
    levels_same_game(levels)
    if levels[0].game_id != game.game_id:
        raise ValueError("levels do not belong to the given game")
    breakdowns = []
    for index, level in enumerate(levels):
        solv_delta = _SolvabilityDelta(level, game, limits)
        base_solvable = solv_delta.base_solvable
        base_known = base_solvable is not None
        base_acceptable, _ = check_acceptable(level, ps)
        delta = _AcceptabilityDelta(level, ps) if base_acceptable else None
        if mode == "exhaustive":
            perturbations = list(enumerate_radius1(level, game))
        else:
            rng = np.random.Generator(np.random.Philox(
                np.random.SeedSequence(seed, spawn_key=(index,))))
            perturbations = sample_radius1(level, game, rng)
        solv_decided = 0
        solv_flips = 0
        acc_flips = 0
        skipped = 0
        for pert in perturbations:
            perturbed = pert.apply(level)
            if base_known:
                try:
                    solvable = solv_delta.label_after(perturbed, pert.position,
                                                      pert.old_symbol,
                                                      pert.new_symbol)
                    solv_decided += 1
                    if solvable != base_solvable:
                        solv_flips += 1
                except SearchLimitExceeded:
                    skipped += 1
            else:
                skipped += 1
            if delta is not None:
                acceptable = delta.acceptable_after(perturbed, pert.position,
                                                    pert.old_symbol,
                                                    pert.new_symbol)
            else:
                acceptable, _ = check_acceptable(perturbed, ps)
            if acceptable != base_acceptable:
                acc_flips += 1
        breakdowns.append(LevelBreakdown(
            index, bool(base_solvable), base_acceptable, len(perturbations),
            solv_decided, solv_flips, acc_flips, skipped))
    solv_fracs = [b.solvability_flips / b.solvability_decided
                  for b in breakdowns if b.solvability_decided]
    if not solv_fracs:
        raise SearchLimitExceeded(0, 0.0)
    acc_fracs = [b.acceptability_flips / b.perturbations for b in breakdowns]
    return DiscreteReport(
        game_id=game.game_id,
        mode=mode,
        levels_analyzed=len(levels),
        perturbations_total=sum(b.perturbations for b in breakdowns),
        solvability_flip_fraction=float(np.mean(solv_fracs)),
        acceptability_flip_fraction=float(np.mean(acc_fracs)),
        skipped=sum(b.skipped for b in breakdowns),
        per_level=tuple(breakdowns),
    )


# --- continuous (Euclidean radius over labeled points) ---

@dataclass(frozen=True)
class LabeledPointSet:
    points: np.ndarray  # (n, d) float64
    labels: tuple[str, ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2:
            raise ValueError("points must be a 2-D array")
        if len(self.labels) != pts.shape[0]:
            raise ValueError("one label per point required")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def label_tally(self) -> dict[str, int]:
        tally: dict[str, int] = {}
        for lb in self.labels:
            tally[lb] = tally.get(lb, 0) + 1
        return tally


def normalize_points(ps: LabeledPointSet) -> LabeledPointSet:
    """Min-max scale each dimension into [0, 1]; constant dimensions go to 0."""
    if ps.n == 0:
        raise ValueError("empty point set")
    lo = ps.points.min(axis=0)
    hi = ps.points.max(axis=0)
    span = hi - lo
    out = np.zeros_like(ps.points)
    nz = span > 0
    out[:, nz] = (ps.points[:, nz] - lo[nz]) / span[nz]
    return LabeledPointSet(out, ps.labels)


@dataclass(frozen=True)
class RadiusSweep:
    radii: tuple[float, ...]
    values: tuple[float, ...]  # ND_r as proportions in [0, 1]
    average: float

    def __post_init__(self):
        if list(self.radii) != sorted(set(self.radii)):
            raise ValueError("radii must be strictly increasing")

    def as_percent(self) -> list[float]:
        return [round(v * 100.0, 1) for v in self.values]

    def average_percent(self) -> float:
        return round(self.average * 100.0, 1)

    def to_dict(self) -> dict:
        return {"radii": list(self.radii),
                "values": list(self.values),
                "percent": self.as_percent(),
                "average": self.average,
                "average_percent": self.average_percent()}


def continuous_nonrobustness(ps: LabeledPointSet,
                             radii=DEFAULT_RADII) -> RadiusSweep:
    """ND_r per radius: mean over points of the dissimilar-neighbor proportion.

    A point's neighborhood excludes itself; exact duplicates with the same
    label are excluded outright, while different-label duplicates count as
    disagreement at every radius. Exact O(n^2) pairwise computation.
    """
    if ps.n < 2:
        raise ValueError("need at least 2 points")
    radii = tuple(float(r) for r in radii)
    pts = ps.points
    labels = np.asarray(ps.labels)
    n = ps.n
    sums = np.zeros(len(radii))
    chunk = max(1, min(n, 8_000_000 // max(n, 1)))
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        diff = pts[start:stop, None, :] - pts[None, :, :]
        dist = np.sqrt((diff * diff).sum(axis=2))
        differs = labels[start:stop, None] != labels[None, :]
        self_mask = np.zeros((stop - start, n), dtype=bool)
        for i in range(start, stop):
            self_mask[i - start, i] = True
        same_dup = (dist == 0.0) & ~differs
        excluded = self_mask | same_dup
        for k, r in enumerate(radii):
            inside = (dist <= r) & ~excluded
            denom = inside.sum(axis=1)
            num = (inside & differs).sum(axis=1)
            with np.errstate(invalid="ignore"):
                frac = np.where(denom > 0, num / np.maximum(denom, 1), 0.0)
            sums[k] += frac.sum()
    values = tuple(float(v / n) for v in sums)
    return RadiusSweep(radii, values, float(np.mean(values)))


# --- points file format ---

def dump_points(ps: LabeledPointSet, comments: list[str] | None = None) -> str:
    lines = [f"# dim={ps.dim}"]
    for comment in comments or []:
        lines.append(f"# {comment}")
    for row, label in zip(ps.points, ps.labels):
        cols = ",".join(repr(float(v)) for v in row)
        lines.append(f"{cols},{label}")
    return "\n".join(lines) + "\n"


def load_points(text: str) -> LabeledPointSet:
    dim = None
    rows = []
    labels = []
    for ln, line in enumerate(text.split("\n")):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("dim=") and dim is None:
                try:
                    dim = int(body[4:].split()[0])
                except ValueError:
                    raise PointsFormatError(f"bad dim header: {line!r}") from None
            continue
        parts = line.split(",")
        if dim is None:
            raise PointsFormatError("missing '# dim=<d>' header before data")
        if len(parts) != dim + 1:
            raise PointsFormatError(
                f"line {ln}: expected {dim} coordinates plus a label")
        try:
            rows.append([float(v) for v in parts[:dim]])
        except ValueError:
            raise PointsFormatError(f"line {ln}: bad coordinate") from None
        labels.append(parts[dim])
    if dim is None:
        raise PointsFormatError("missing '# dim=<d>' header")
    if not rows:
        raise PointsFormatError("no data rows")
    return LabeledPointSet(np.asarray(rows, dtype=np.float64), tuple(labels))


def save_points(ps: LabeledPointSet, path, comments=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_points(ps, comments))


def load_points_file(path) -> LabeledPointSet:
    with open(path, "r", encoding="utf-8") as fh:
        return load_points(fh.read())


# --- report rendering ---

def render_discrete_table(reports: list[DiscreteReport]) -> str:
    names = [r.game_id for r in reports]
    width = max(22, *(len(n) + 2 for n in names)) if reports else 22
    header = " " * 24 + "".join(n.rjust(width) for n in names)
    solv = "Changed Solvability     " + "".join(
        f"{r.solvability_flip_fraction * 100:.1f}%".rjust(width) for r in reports)
    acc = "Changed Acceptability   " + "".join(
        f"{r.acceptability_flip_fraction * 100:.1f}%".rjust(width) for r in reports)
    return "\n".join([header, solv, acc]) + "\n"


def render_sweep_table(rows: list[tuple[str, RadiusSweep]]) -> str:
    if not rows:
        return ""
    radii = rows[0][1].radii
    name_w = max(10, *(len(n) + 2 for n, _ in rows))
    header = "Dataset".ljust(name_w) + "".join(
        f"{r:g}".rjust(9) for r in radii) + "avg".rjust(9)
    lines = [header]
    for name, sweep in rows:
        if sweep.radii != radii:
            raise ValueError("sweeps use different radii")
        lines.append(name.ljust(name_w)
                     + "".join(f"{v:.1f}".rjust(9) for v in sweep.as_percent())
                     + f"{sweep.average_percent():.1f}".rjust(9))
    return "\n".join(lines) + "\n"
