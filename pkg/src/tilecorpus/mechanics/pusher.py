"""Crate pusher: push-optimal search with sound deadlock pruning.

The solver searches over push macro-states (player region + crate set) with
A*; the heuristic (sum of each off-slot crate's Manhattan distance to its
nearest slot) is admissible and consistent for push counts, so both the
default mode and plain BFS mode (heuristic off) return push-optimal
playthroughs. The goal condition is that every crate stands on a slot.

Pruning is sound only: corner and frozen 2x2 deadlocks (detect_deadlock),
plus dead squares (cells from which no slot is pull-reachable). Pruning can
be disabled entirely, which is how mutated levels get their final
unsolvability verdict.
"""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from ..errors import LevelFormatError
from ..games import GameDef
from ..level import Level
from .common import LimitTracker, SearchLimits
from .witness import Playthrough

Pos = tuple[int, int]

_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))


@dataclass(frozen=True)
class CratesState:
    player: Pos
    crates: tuple[Pos, ...]  # sorted

    def __post_init__(self):
        if len(set(self.crates)) != len(self.crates):
            raise ValueError("two crates share a cell")
        if self.player in self.crates:
            raise ValueError("player stands on a crate")
        if tuple(sorted(self.crates)) != self.crates:
            raise ValueError("crates must be in canonical sorted order")


def make_state(player: Pos, crates) -> CratesState:
    return CratesState(player, tuple(sorted(crates)))


class Board:
    """Static geometry of a crates level plus the initial dynamic state."""

    def __init__(self, level: Level, game: GameDef, player: Pos | None = None):
        self.rows, self.cols = level.rows, level.cols
        self.game = game
        walls: set[Pos] = set()
        slots: set[Pos] = set()
        crates: set[Pos] = set()
        players: list[Pos] = []
        for r in range(level.rows):
            for c in range(level.cols):
                sym = level.at(r, c)
                role = game.roles[sym]
                if role == "solid":
                    walls.add((r, c))
                elif role == "slot":
                    slots.add((r, c))
                elif role == "crate":
                    crates.add((r, c))
                elif role == "crate-on-slot":
                    crates.add((r, c))
                    slots.add((r, c))
                elif role == "start":
                    players.append((r, c))
                elif role == "start-on-slot":
                    players.append((r, c))
                    slots.add((r, c))
        self.walls = frozenset(walls)
        self.slots = frozenset(slots)
        self.initial_crates = frozenset(crates)
        if player is not None:
            self.player = player
        else:
            if len(players) != 1:
                raise LevelFormatError(
                    f"pusher level needs exactly 1 player marker, found {len(players)}")
            self.player = players[0]
        self._dead: frozenset[Pos] | None = None

    def in_bounds(self, pos: Pos) -> bool:
        return 0 <= pos[0] < self.rows and 0 <= pos[1] < self.cols

    def open_cell(self, pos: Pos) -> bool:
        return self.in_bounds(pos) and pos not in self.walls

    def dead_squares(self) -> frozenset[Pos]:
        """Cells from which a lone crate can never be pushed onto any slot.

        Computed by pull-reachability from the slots: a crate on cell q can
        come from p (q = p + d) only if both q and the player cell p - d are
        open. Sound regardless of other crates.
        """
        if self._dead is None:
            live: set[Pos] = set(s for s in self.slots if self.open_cell(s))
            queue = deque(live)
            while queue:
                q = queue.popleft()
                for dr, dc in _DIRS:
                    p = (q[0] - dr, q[1] - dc)
                    back = (p[0] - dr, p[1] - dc)
                    if p in live:
                        continue
                    if self.open_cell(p) and self.open_cell(back):
                        live.add(p)
                        queue.append(p)
            self._dead = frozenset(
                (r, c) for r in range(self.rows) for c in range(self.cols)
                if (r, c) not in self.walls and (r, c) not in live)
        return self._dead

    def to_level(self, state: CratesState, game_id: str) -> Level:
        crates = set(state.crates)
        cells = []
        for r in range(self.rows):
            for c in range(self.cols):
                pos = (r, c)
                on_slot = pos in self.slots
                if pos in self.walls:
                    cells.append("X")
                elif pos in crates:
                    cells.append("C" if on_slot else "c")
                elif pos == state.player:
                    cells.append("+" if on_slot else "{")
                else:
                    cells.append("s" if on_slot else "-")
        return Level(self.rows, self.cols, tuple(cells), game_id)


def corner_deadlock(board: Board, pos: Pos) -> bool:
    if pos in board.slots:
        return False
    r, c = pos
    vert = not board.open_cell((r - 1, c)) or not board.open_cell((r + 1, c))
    horiz = not board.open_cell((r, c - 1)) or not board.open_cell((r, c + 1))
    return vert and horiz


def frozen_block(board: Board, crates: frozenset[Pos], pos: Pos) -> bool:
    """Is the crate at pos part of a fully occupied 2x2 block, off slot?

    A 2x2 block of crates/walls can never move again; it is a deadlock as
    soon as any crate inside it is off its slot.
    """
    r, c = pos

    def occupied(p: Pos) -> bool:
        return p in crates or not board.open_cell(p)

    for r0 in (r - 1, r):
        for c0 in (c - 1, c):
            block = [(r0, c0), (r0, c0 + 1), (r0 + 1, c0), (r0 + 1, c0 + 1)]
            if all(occupied(p) for p in block):
                if any(p in crates and p not in board.slots for p in block):
                    return True
    return False


def detect_deadlock(level: Level, state: CratesState, game: GameDef | None = None) -> bool:
    """Sound, incomplete deadlock test: corner rule plus frozen 2x2 blocks."""
    if game is None:
        from ..games import get_game
        game = get_game(level.game_id)
    board = Board(level, game, player=state.player)
    crates = frozenset(state.crates)
    for crate in state.crates:
        if corner_deadlock(board, crate):
            return True
        if frozen_block(board, crates, crate):
            return True
    return False


def _walk_path_ix(ix: "_Indexed", crates: frozenset[int], src: int,
                  dst: int) -> list[int]:
    if src == dst:
        return [src]
    parent = {src: src}
    queue = deque((src,))
    while queue:
        cur = queue.popleft()
        for d in ix.dirs:
            nxt = cur + d
            if nxt in parent or not ix.open[nxt] or nxt in crates:
                continue
            parent[nxt] = cur
            if nxt == dst:
                path = [nxt]
                while path[-1] != src:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            queue.append(nxt)
    raise RuntimeError(f"no walk path from {src} to {dst}")


_Push = tuple[Pos, Pos, Pos]  # (player walk target, crate from, crate to)


class _Indexed:
    """Padded flat-index view of a crates level for the hot search loop."""

    def __init__(self, board: Board):
        self.board = board
        self.w = board.cols + 2
        self.h = board.rows + 2
        size = self.w * self.h
        self.open = bytearray(size)
        self.slot = bytearray(size)
        for r in range(board.rows):
            for c in range(board.cols):
                i = (r + 1) * self.w + (c + 1)
                if (r, c) not in board.walls:
                    self.open[i] = 1
                if (r, c) in board.slots:
                    self.slot[i] = 1
        self.dirs = (-self.w, self.w, -1, 1)
        # nearest-slot Manhattan distance per open cell (heuristic table)
        slots = [self.to_index(p) for p in sorted(board.slots)]
        self.slot_cells = slots
        self.h_table = [0] * size
        if slots:
            srcs = [(s // self.w, s % self.w) for s in slots]
            for i in range(size):
                if self.open[i]:
                    r, c = i // self.w, i % self.w
                    self.h_table[i] = min(abs(r - sr) + abs(c - sc)
                                          for sr, sc in srcs)

    def to_index(self, pos: Pos) -> int:
        return (pos[0] + 1) * self.w + (pos[1] + 1)

    def to_pos(self, i: int) -> Pos:
        return (i // self.w - 1, i % self.w - 1)

    def dead_squares(self) -> bytearray:
        """1 where a lone crate can never reach any slot (pull-reachability)."""
        size = self.w * self.h
        live = bytearray(size)
        queue = deque()
        for s in self.slot_cells:
            live[s] = 1
            queue.append(s)
        while queue:
            q = queue.popleft()
            for d in self.dirs:
                p = q - d
                if live[p] or not self.open[p] or not self.open[p - d]:
                    continue
                live[p] = 1
                queue.append(p)
        dead = bytearray(size)
        for i in range(size):
            if self.open[i] and not live[i]:
                dead[i] = 1
        return dead

    def frozen_2x2(self, crates: frozenset[int], crate: int) -> bool:
        w = self.w
        occupied = lambda p: (not self.open[p]) or p in crates
        for corner in (crate - w - 1, crate - w, crate - 1, crate):
            block = (corner, corner + 1, corner + w, corner + w + 1)
            if all(occupied(p) for p in block):
                if any(p in crates and not self.slot[p] for p in block):
                    return True
        return False


def solve_pusher(level: Level, game: GameDef, limits: SearchLimits | None = None,
                 *, mode: str = "astar", prune_deadlocks: bool = True,
                 want_witness: bool = True,
                 player: Pos | None = None) -> tuple[bool, Playthrough | None]:
    """Decide solvability; on success return a push-optimal playthrough."""
    if mode not in ("astar", "bfs"):
        raise ValueError(f"unknown mode {mode!r}")
    board = Board(level, game, player=player)
    crates0 = tuple(sorted(board.initial_crates))
    # Every crate on a slot means more crates than slots can never win.
    if len(crates0) > len(board.slots):
        return False, None
    if not board.open_cell(board.player):
        return False, None
    ix = _Indexed(board)
    start_player = ix.to_index(board.player)
    start_crates = frozenset(ix.to_index(p) for p in crates0)

    def solved(crates) -> bool:
        return all(ix.slot[c] for c in crates)

    if solved(start_crates):
        if not want_witness:
            return True, None
        return True, Playthrough((board.to_level(make_state(board.player, crates0),
                                                  level.game_id),))

    use_astar = mode == "astar"
    dead = ix.dead_squares() if prune_deadlocks else bytearray(ix.w * ix.h)
    if prune_deadlocks:
        for crate in start_crates:
            if dead[crate] or ix.frozen_2x2(start_crates, crate):
                return False, None

    tracker = LimitTracker(limits)
    counter = 0
    h_table = ix.h_table
    is_open = ix.open
    dirs = ix.dirs
    h0 = sum(h_table[c] for c in start_crates) if use_astar else 0
    # Heap entries: (f, g, counter, player_cell, crates, parent_key, push)
    heap: list = [(h0, 0, counter, start_player, start_crates, None, None)]
    expanded: set = set()
    trace: dict = {}
    region = bytearray(ix.w * ix.h)
    while heap:
        f, g, _, player_cell, crates, parent_key, push = heapq.heappop(heap)
        # player region flood fill, tracking the minimum cell as the state key
        for i in range(len(region)):
            region[i] = 0
        queue = [player_cell]
        region[player_cell] = 1
        norm = player_cell
        qi = 0
        while qi < len(queue):
            cur = queue[qi]
            qi += 1
            if cur < norm:
                norm = cur
            for d in dirs:
                nxt = cur + d
                if region[nxt] or not is_open[nxt] or nxt in crates:
                    continue
                region[nxt] = 1
                queue.append(nxt)
        key = (norm, crates)
        if key in expanded:
            continue
        expanded.add(key)
        trace[key] = (parent_key, push, player_cell)
        tracker.tick()
        if solved(crates):
            if not want_witness:
                return True, None
            return True, _build_playthrough(board, ix, level.game_id, trace,
                                            key, crates0)
        for crate in sorted(crates):
            for d in dirs:
                stand = crate - d
                target = crate + d
                if not region[stand]:
                    continue
                if not is_open[target] or target in crates:
                    continue
                if prune_deadlocks and dead[target]:
                    continue
                new_crates = crates - {crate} | {target}
                if prune_deadlocks and ix.frozen_2x2(new_crates, target):
                    continue
                ng = g + 1
                nh = sum(h_table[c] for c in new_crates) if use_astar else 0
                counter += 1
                heapq.heappush(heap, (ng + nh, ng, counter, crate, new_crates,
                                      key, (stand, crate, target)))
    return False, None


def _build_playthrough(board: Board, ix: "_Indexed", game_id: str, trace: dict,
                       goal_key, crates0: tuple[Pos, ...]) -> Playthrough:
    chain = []
    key = goal_key
    while key is not None:
        parent_key, push, _ = trace[key]
        chain.append(push)
        key = parent_key
    chain.reverse()  # leading None is the initial state

    def as_state(player: int, crates: frozenset[int]) -> CratesState:
        return make_state(ix.to_pos(player), [ix.to_pos(c) for c in crates])

    crates = frozenset(ix.to_index(p) for p in crates0)
    player = ix.to_index(board.player)
    states = [as_state(player, crates)]
    for push in chain:
        if push is None:
            continue
        stand, crate_from, crate_to = push
        for step in _walk_path_ix(ix, crates, player, stand)[1:]:
            states.append(as_state(step, crates))
        crates = crates - {crate_from} | {crate_to}
        states.append(as_state(crate_from, crates))
        player = crate_from
    levels = tuple(board.to_level(s, game_id) for s in states)
    return Playthrough(levels)


def step_successor_levels(level: Level, game: GameDef) -> list[Level]:
    """All levels one legal player step (move or push) away from this one."""
    board = Board(level, game)
    crates = frozenset(board.initial_crates)
    out = []
    r, c = board.player
    for dr, dc in _DIRS:
        ahead = (r + dr, c + dc)
        if not board.open_cell(ahead):
            continue
        if ahead in crates:
            beyond = (ahead[0] + dr, ahead[1] + dc)
            if not board.open_cell(beyond) or beyond in crates:
                continue
            new_crates = crates - {ahead} | {beyond}
            out.append(board.to_level(make_state(ahead, new_crates), level.game_id))
        else:
            out.append(board.to_level(make_state(ahead, crates), level.game_id))
    return out


def verify_pusher_playthrough(level: Level, play: Playthrough,
                              game: GameDef) -> tuple[bool, str | None]:
    if not play.states:
        return False, "empty playthrough"
    if play.states[0].cells != level.cells:
        return False, "playthrough does not begin at the input level"
    for i in range(len(play.states) - 1):
        nxt = play.states[i + 1]
        legal = step_successor_levels(play.states[i], game)
        if not any(nxt.cells == lv.cells for lv in legal):
            return False, f"state {i + 1} is not one legal move after state {i}"
    final = Board(play.states[-1], game)
    if not all(c in final.slots for c in final.initial_crates):
        return False, "final state leaves a crate off its slot"
    return True, None


def count_pushes(play: Playthrough, game: GameDef) -> int:
    pushes = 0
    for i in range(len(play.states) - 1):
        a = Board(play.states[i], game)
        b = Board(play.states[i + 1], game)
        if a.initial_crates != b.initial_crates:
            pushes += 1
    return pushes
