"""Constraint-based level generation with verification and retry.

Candidate levels are built by propagation search over the window constraint:
every k x k window of the padded grid must belong to the pattern set, and
per-symbol counts may not exceed their allowed fractions. Special tiles
(start, goal, keys, doors, portals, crates, slots) are placed first, chosen
uniformly among cells whose domain still allows them; terrain then fills in
min-entropy order with seeded tie-breaking. Solvability is decided by the
mechanics module afterwards, rejecting candidates until the target label is
met, so every emitted level is verified rather than constructed-correct.

All randomness flows from one counter-based PRNG (Philox) seeded per level,
which makes shards byte-identical across machines for a fixed base seed.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import GenerationBudgetError, SearchLimitExceeded
from .games import GameDef
from .level import Level
from .mechanics import SearchLimits, SolutionWitness, check_solvable
from .patterns import PatternSet, check_acceptable
from .corpus import dump_json, level_name, write_entry, write_manifest

SOLVABLE = "solvable"
UNSOLVABLE = "unsolvable"

DEFAULT_RETRY_BUDGET = 400


@dataclass(frozen=True)
class GenSpec:
    game: GameDef
    variant: str
    patterns: PatternSet
    target_label: str
    seed: int
    dims: tuple[int, int] | None = None
    retry_budget: int = DEFAULT_RETRY_BUDGET
    required_specials: Mapping[str, int] | None = None
    limits: SearchLimits = field(default_factory=SearchLimits)

    def resolved_dims(self) -> tuple[int, int]:
        return self.dims or self.game.default_dims

    def resolved_specials(self) -> Mapping[str, int]:
        if self.required_specials is not None:
            return self.required_specials
        return self.game.variant(self.variant).required_specials

    def __post_init__(self):
        if self.target_label not in (SOLVABLE, UNSOLVABLE):
            raise ValueError(f"bad target label {self.target_label!r}")
        if self.retry_budget < 1:
            raise ValueError("retry budget must be at least 1")


class _Wave:
    """Compiled propagation tables for one (pattern set, dims) pair."""

    def __init__(self, ps: PatternSet, game: GameDef, dims: tuple[int, int]):
        self.rows, self.cols = dims
        self.k = ps.k
        self.game = game
        self.alphabet = game.alphabet
        self.n_sym = len(self.alphabet)
        self.sym_index = {s: i for i, s in enumerate(self.alphabet)}
        border_index = self.n_sym  # synthetic out-of-bounds symbol
        self.patterns = sorted(ps.patterns)
        n_pat = len(self.patterns)
        self.full_pattern_mask = (1 << n_pat) - 1
        k = self.k
        n_off = k * k
        # pmask[offset][symbol] = bitmask of patterns with that symbol there
        pmask = [[0] * (self.n_sym + 1) for _ in range(n_off)]
        for p_i, win in enumerate(self.patterns):
            for i in range(k):
                for j in range(k):
                    sym = win[i][j]
                    s_i = border_index if sym == ps.border_symbol \
                        else self.sym_index.get(sym)
                    if s_i is None:
                        continue  # window mentions a symbol outside this alphabet
                    pmask[i * k + j][s_i] |= 1 << p_i
        self.pmask = pmask
        # union_pmask[offset][domain_mask] = OR of pmask over the domain
        full_dom = (1 << self.n_sym) - 1
        self.union_pmask = []
        for off in range(n_off):
            table = [0] * (full_dom + 1)
            for m in range(1, full_dom + 1):
                low = m & (-m)
                table[m] = table[m ^ low] | pmask[off][low.bit_length() - 1]
            self.union_pmask.append(table)
        # windows: origins over the padded grid
        self.windows: list[list[tuple[int, int]]] = []  # [(cell, offset)...]
        self.viable0: list[int] = []
        self.cell_windows: list[list[tuple[int, int]]] = [
            [] for _ in range(self.rows * self.cols)]
        for r0 in range(-(k - 1), self.rows):
            for c0 in range(-(k - 1), self.cols):
                w_i = len(self.windows)
                entries = []
                viable = self.full_pattern_mask
                for i in range(k):
                    for j in range(k):
                        r, c = r0 + i, c0 + j
                        off = i * k + j
                        if 0 <= r < self.rows and 0 <= c < self.cols:
                            cell = r * self.cols + c
                            entries.append((cell, off))
                            self.cell_windows[cell].append((w_i, off))
                        else:
                            viable &= pmask[off][border_index]
                self.windows.append(entries)
                self.viable0.append(viable)
        # counts cap per symbol from the allowed fractions
        area = self.rows * self.cols
        self.max_count = []
        self.weights = []
        for s in self.alphabet:
            lo, hi = ps.count_ranges.get(s, (0.0, 0.0))
            self.max_count.append(int(hi * area + 1e-9))
            self.weights.append(max((lo + hi) / 2.0, 1e-6))
        # baseline fixpoint shared by every candidate
        dom = [full_dom] * (self.rows * self.cols)
        viable = list(self.viable0)
        if not self._propagate(dom, viable, range(len(self.windows))):
            raise GenerationBudgetError(
                "pattern set cannot tile the requested dimensions at all")
        self.dom0 = dom
        self.viable0_fix = viable

    def _propagate(self, dom: list[int], viable: list[int], dirty) -> bool:
        """Arc-consistency fixpoint over the window constraint. False on wipeout."""
        queue = list(dirty)
        queued = set(queue)
        union_pmask = self.union_pmask
        pmask = self.pmask
        windows = self.windows
        cell_windows = self.cell_windows
        while queue:
            w_i = queue.pop()
            queued.discard(w_i)
            entries = windows[w_i]
            v = viable[w_i]
            for cell, off in entries:
                v &= union_pmask[off][dom[cell]]
                if v == 0:
                    return False
            if v == viable[w_i]:
                continue
            viable[w_i] = v
            for cell, off in entries:
                d = dom[cell]
                nd = 0
                masks = pmask[off]
                m = d
                while m:
                    low = m & (-m)
                    if masks[low.bit_length() - 1] & v:
                        nd |= low
                    m ^= low
                if nd == d:
                    continue
                if nd == 0:
                    return False
                dom[cell] = nd
                for w2, _ in cell_windows[cell]:
                    if w2 != w_i and w2 not in queued:
                        queued.add(w2)
                        queue.append(w2)
        return True

    def _collapse(self, dom, viable, cell: int, sym_i: int) -> bool:
        dom[cell] = 1 << sym_i
        return self._propagate(dom, viable,
                               [w for w, _ in self.cell_windows[cell]])

    def _prune_symbol(self, dom, viable, sym_i: int) -> bool:
        """Remove a symbol from every non-singleton domain (count cap hit)."""
        bit = 1 << sym_i
        dirty = set()
        for cell, d in enumerate(dom):
            if d & bit and d != bit:
                nd = d & ~bit
                if nd == 0:
                    return False
                dom[cell] = nd
                for w, _ in self.cell_windows[cell]:
                    dirty.add(w)
        return self._propagate(dom, viable, dirty)

    def _min_entropy_cell(self, dom, rng) -> int | None:
        best_size = self.n_sym + 1
        ties: list[int] = []
        for cell, d in enumerate(dom):
            size = bin(d).count("1")
            if 1 < size < best_size:
                best_size = size
                ties = [cell]
            elif size == best_size:
                ties.append(cell)
        if not ties:
            return None
        return ties[int(rng.integers(len(ties)))]

    def _ordered_domain(self, d: int, rng) -> list[int]:
        """Domain symbols in weighted random order (Gumbel-perturbed)."""
        syms = []
        m = d
        while m:
            low = m & (-m)
            syms.append(low.bit_length() - 1)
            m ^= low
        if len(syms) == 1:
            return syms
        logw = np.log([self.weights[s] for s in syms])
        keys = logw + rng.gumbel(size=len(syms))
        return [syms[i] for i in np.argsort(-keys)]

    def fill(self, rng: np.random.Generator, required: Mapping[str, int],
             max_backtracks: int = 500) -> list[str] | None:
        """One candidate grid, or None when the backtrack budget runs out.

        Decisions form a chronological backtracking stack: special tiles are
        placed first (uniformly among cells whose domain allows them), then
        terrain collapses in min-entropy order with weighted symbol choice.
        A wipeout undoes the latest decision and tries its next option.
        """
        n_cells = self.rows * self.cols
        special_syms: list[int] = []
        for sym, count in required.items():
            special_syms.extend([self.sym_index[sym]] * count)
        n_special = len(special_syms)
        last_placement = {s: i for i, s in enumerate(special_syms)}
        dom = list(self.dom0)
        viable = list(self.viable0_fix)
        # stack entries: [dom_before, viable_before, options, next_option]
        stack: list = []
        backtracks = 0

        def special_options(depth: int) -> list[tuple[int, int]]:
            s_i = special_syms[depth]
            bit = 1 << s_i
            used = {stack[i][2][stack[i][3] - 1][0] for i in range(depth)}
            forced = [cell for cell in range(n_cells)
                      if dom[cell] == bit and cell not in used]
            remaining = sum(1 for s in special_syms[depth:] if s == s_i)
            if len(forced) > remaining:
                return []  # propagation already over-commits this symbol
            if forced:
                return [(forced[0], s_i)]
            cells = [cell for cell in range(n_cells)
                     if dom[cell] & bit and dom[cell] != bit and cell not in used]
            return [(cells[int(i)], s_i) for i in rng.permutation(len(cells))]

        def enforce_caps() -> bool:
            """Cap per-symbol counts so fills stay inside the allowed fractions."""
            counts = [0] * self.n_sym
            for d in dom:
                if d & (d - 1) == 0:
                    counts[d.bit_length() - 1] += 1
            for s_i, count in enumerate(counts):
                cap = self.max_count[s_i]
                if count > cap:
                    return False
                if count == cap and any(
                        d & (1 << s_i) and d != (1 << s_i) for d in dom):
                    if not self._prune_symbol(dom, viable, s_i):
                        return False
            return True

        while True:
            depth = len(stack)
            if depth < n_special:
                opts = special_options(depth)
            else:
                cell = self._min_entropy_cell(dom, rng)
                if cell is None:
                    return [self.alphabet[d.bit_length() - 1] for d in dom]
                opts = [(cell, s) for s in self._ordered_domain(dom[cell], rng)]
            stack.append([dom, viable, opts, 0])
            placed = False
            while not placed:
                snap_dom, snap_viable, opts, idx = stack[-1]
                if idx >= len(opts):
                    stack.pop()
                    backtracks += 1
                    if not stack or backtracks > max_backtracks:
                        return None
                    continue
                stack[-1][3] = idx + 1
                dom = snap_dom.copy()
                viable = snap_viable.copy()
                cell, s_i = opts[idx]
                ok = self._collapse(dom, viable, cell, s_i)
                decision = len(stack) - 1
                if ok and decision < n_special \
                        and last_placement[s_i] == decision:
                    ok = self._prune_symbol(dom, viable, s_i)
                if ok:
                    ok = enforce_caps()
                if ok:
                    placed = True
                else:
                    backtracks += 1
                    if backtracks > max_backtracks:
                        return None


_WAVE_CACHE: dict = {}


def _wave_for(ps: PatternSet, game: GameDef, dims: tuple[int, int]) -> _Wave:
    key = (game.game_id, dims, ps.k, ps.patterns,
           tuple(sorted(ps.count_ranges.items())))
    wave = _WAVE_CACHE.get(key)
    if wave is None:
        wave = _Wave(ps, game, dims)
        _WAVE_CACHE[key] = wave
    return wave


def _rng_from(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(
        np.random.SeedSequence(seed, spawn_key=key)))


def child_seed(base_seed: int, index: int) -> int:
    return int(np.random.SeedSequence(base_seed,
                                      spawn_key=(index,)).generate_state(1)[0])


def generate_level(spec: GenSpec) -> tuple[Level, SolutionWitness | None, int]:
    """Generate one level matching the target label; deterministic in seed."""
    game = spec.game
    dims = spec.resolved_dims()
    wave = _wave_for(spec.patterns, game, dims)
    rng = _rng_from(spec.seed)
    want_solvable = spec.target_label == SOLVABLE
    if game.mechanics == "pusher" and not want_solvable:
        return _generate_unsolvable_crates(spec, wave, rng)
    for attempt in range(1, spec.retry_budget + 1):
        cells = wave.fill(rng, spec.resolved_specials())
        if cells is None:
            continue
        level = Level(dims[0], dims[1], tuple(cells), game.game_id)
        ok, _ = check_acceptable(level, spec.patterns)
        if not ok:
            continue
        try:
            solvable, witness = check_solvable(level, game, spec.limits)
        except SearchLimitExceeded:
            continue
        if solvable == want_solvable:
            return level, witness if want_solvable else None, attempt
    raise GenerationBudgetError(
        f"no {spec.target_label} {game.game_id}/{spec.variant} level "
        f"after {spec.retry_budget} candidates (seed {spec.seed})")


def _generate_unsolvable_crates(spec: GenSpec, wave: _Wave,
                                rng: np.random.Generator):
    """Unsolvable crates levels come from breaking a solvable one."""
    solvable_spec = GenSpec(spec.game, spec.variant, spec.patterns, SOLVABLE,
                            spec.seed, spec.dims, spec.retry_budget,
                            spec.required_specials, spec.limits)
    level, _, attempts = generate_level(solvable_spec)
    mutated, extra = mutate_crates_unsolvable(
        level, spec.game, spec.patterns, rng=rng,
        budget=spec.retry_budget, limits=spec.limits)
    return mutated, None, attempts + extra


def corner_cells(level: Level, game: GameDef) -> list[tuple[int, int]]:
    """Open cells boxed in by walls on one vertical and one horizontal side."""
    from .mechanics.pusher import Board, corner_deadlock
    board = Board(level, game)
    out = []
    for r in range(level.rows):
        for c in range(level.cols):
            pos = (r, c)
            if board.open_cell(pos) and pos not in board.slots \
                    and corner_deadlock(board, pos):
                out.append(pos)
    return out


def mutate_crates_unsolvable(level: Level, game: GameDef, ps: PatternSet,
                             *, rng: np.random.Generator | None = None,
                             seed: int | None = None, budget: int = 100,
                             limits: SearchLimits | None = None
                             ) -> tuple[Level, int]:
    """Break a solvable crates level and verify the damage.

    Mutations tried, in seeded random order: relocate a crate to an off-slot
    corner, delete a slot, add a crate with no matching slot. Each candidate
    must stay acceptable; unsolvability is then verified by a search with all
    deadlock pruning disabled. Returns (level, candidates tried).
    """
    if rng is None:
        rng = _rng_from(seed if seed is not None else 0)
    crates_cells = level.find("c")
    slot_cells = level.find("s")
    floor_cells = level.find("-")
    corners = [p for p in corner_cells(level, game) if level.at(*p) == "-"]
    candidates: list[tuple[str, tuple]] = []
    for crate in crates_cells:
        for corner in corners:
            candidates.append(("corner", (crate, corner)))
    for slot in slot_cells:
        candidates.append(("drop-slot", (slot,)))
    for cell in floor_cells:
        candidates.append(("add-crate", (cell,)))
    order = rng.permutation(len(candidates))
    tried = 0
    for idx in order[:budget]:
        kind, args = candidates[int(idx)]
        tried += 1
        if kind == "corner":
            (cr, cc), (tr, tc) = args
            mutated = level.with_cell(cr, cc, "-").with_cell(tr, tc, "c")
        elif kind == "drop-slot":
            (sr, sc), = args
            mutated = level.with_cell(sr, sc, "-")
        else:
            (fr, fc), = args
            mutated = level.with_cell(fr, fc, "c")
        ok, _ = check_acceptable(mutated, ps)
        if not ok:
            continue
        try:
            solvable, _ = check_solvable(mutated, game, limits,
                                         prune_deadlocks=False,
                                         want_witness=False)
        except SearchLimitExceeded:
            continue
        if not solvable:
            return mutated, tried
    raise GenerationBudgetError(
        f"no acceptable unsolvable mutation found in {tried} candidates")


def batch_generate(spec: GenSpec, n: int, out_dir=None) -> dict:
    """Generate n levels; write a shard when out_dir is given.

    Returns the manifest. Exact-text duplicates are detected and reported,
    never dropped. On budget exhaustion a partial manifest is attached to
    the raised error.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    game = spec.game
    entries = []
    texts: dict[tuple, list[int]] = {}
    from .level import serialize_level
    for i in range(n):
        seed_i = child_seed(spec.seed, i)
        level_spec = GenSpec(game, spec.variant, spec.patterns,
                             spec.target_label, seed_i, spec.dims,
                             spec.retry_budget, spec.required_specials,
                             spec.limits)
        try:
            level, witness, attempts = generate_level(level_spec)
        except GenerationBudgetError as err:
            manifest = _manifest(spec, n, entries, texts, partial=True)
            if out_dir is not None:
                write_manifest(_shard(out_dir, spec), manifest)
            raise GenerationBudgetError(
                f"level {i}: {err}", partial_manifest=manifest) from err
        texts.setdefault(level.cells, []).append(i)
        meta = {
            "game": game.game_id,
            "variant": spec.variant,
            "rows": level.rows,
            "cols": level.cols,
            "label": spec.target_label,
            "seed": seed_i,
            "attempts": attempts,
        }
        entries.append((i, level, meta, witness))
        if out_dir is not None:
            write_entry(_shard(out_dir, spec), i, level, meta, witness)
    manifest = _manifest(spec, n, entries, texts, partial=False)
    if out_dir is not None:
        write_manifest(_shard(out_dir, spec), manifest)
    return manifest


def _shard(out_dir, spec: GenSpec):
    from .corpus import shard_dir
    return shard_dir(out_dir, spec.game.game_id, spec.variant)


def _manifest(spec: GenSpec, n: int, entries, texts, *, partial: bool) -> dict:
    dup_groups = sorted(v for v in texts.values() if len(v) > 1)
    manifest = {
        "format_version": 1,
        "generator": {"name": "tilecorpus", "version": 1},
        "game": spec.game.game_id,
        "variant": spec.variant,
        "label": spec.target_label,
        "n_requested": n,
        "n_generated": len(entries),
        "partial": partial,
        "base_seed": spec.seed,
        "retry_budget": spec.retry_budget,
        "dims": list(spec.resolved_dims()),
        "levels": [{"index": i, "seed": meta["seed"], "attempts": meta["attempts"]}
                   for i, _, meta, _ in entries],
        "duplicates": {
            "count": sum(len(g) - 1 for g in dup_groups),
            "groups": dup_groups,
        },
        "tallies": {spec.target_label: len(entries)},
    }
    return manifest
