"""Top-down grid walker: 4-directional movement, keys, doors, portal jumps.

Doors open for a player holding at least one key; by default keys are not
consumed (a flag enables consuming doors). Stepping onto a portal tile allows
an optional jump to its paired tile, which is the one place an edge path may
be non-contiguous.
"""
from __future__ import annotations

from collections import deque

from ..games import DOOR, GOAL, KEY, PORTAL, SOLID, GameDef
from ..level import Level
from .common import LimitTracker, SearchLimits, functional_rows
from .witness import EdgePath

Pos = tuple[int, int]

_DIRS = ((-1, 0), (1, 0), (0, -1), (0, 1))


class _Board:
    def __init__(self, level: Level, game: GameDef):
        self.rows = level.rows
        self.cols = level.cols
        self.grid = functional_rows(level, game)
        role = game.roles
        self.role_at = {}
        self.keys: set[Pos] = set()
        self.doors: set[Pos] = set()
        self.goals: set[Pos] = set()
        self.solid: set[Pos] = set()
        portal_cells: dict[str, list[Pos]] = {}
        for r in range(self.rows):
            for c in range(self.cols):
                sym = self.grid[r][c]
                rl = role[sym]
                if rl == SOLID:
                    self.solid.add((r, c))
                elif rl == KEY:
                    self.keys.add((r, c))
                elif rl == DOOR:
                    self.doors.add((r, c))
                elif rl == GOAL:
                    self.goals.add((r, c))
                if rl == PORTAL:
                    portal_cells.setdefault(sym, []).append((r, c))
        # A portal jump is defined only when both ends of a pair are unique;
        # otherwise the tile is plain walkable ground.
        self.portal_jump: dict[Pos, Pos] = {}
        for a_sym, b_sym in game.portal_pairs:
            a_cells = portal_cells.get(a_sym, [])
            b_cells = portal_cells.get(b_sym, [])
            if len(a_cells) == 1 and len(b_cells) == 1:
                self.portal_jump[a_cells[0]] = b_cells[0]
                self.portal_jump[b_cells[0]] = a_cells[0]

    def passable(self, pos: Pos) -> bool:
        r, c = pos
        return 0 <= r < self.rows and 0 <= c < self.cols and pos not in self.solid


State = tuple[Pos, frozenset, frozenset]  # position, collected keys, opened doors


def _start_state(pos: Pos) -> State:
    return (pos, frozenset(), frozenset())


def _successors(board: _Board, state: State, consume_keys: bool):
    pos, keys, opened = state
    r, c = pos
    for dr, dc in _DIRS:
        np_ = (r + dr, c + dc)
        if not board.passable(np_):
            continue
        nkeys, nopened = keys, opened
        if np_ in board.doors and np_ not in opened:
            if consume_keys:
                if len(keys) - len(opened) < 1:
                    continue
                nopened = opened | {np_}
            elif not keys:
                continue
        if np_ in board.keys:
            nkeys = keys | {np_}
        yield (np_, nkeys, nopened)
    jump = board.portal_jump.get(pos)
    if jump is not None and board.passable(jump):
        yield (jump, keys, opened)


def solve_gridwalk(level: Level, game: GameDef, limits: SearchLimits | None = None,
                   *, consume_keys: bool = False,
                   starts: list[Pos] | None = None,
                   want_witness: bool = True) -> tuple[bool, EdgePath | None]:
    board = _Board(level, game)
    if starts is None:
        starts = [(i // level.cols, i % level.cols)
                  for i, s in enumerate(level.cells)
                  if game.roles[s] in ("start", "start-on-slot")]
    starts = [p for p in starts if board.passable(p)]
    if not starts or not board.goals:
        return False, None
    tracker = LimitTracker(limits)
    frontier: deque[State] = deque()
    parent: dict[State, State | None] = {}
    for p in starts:
        st = _start_state(p)
        if st not in parent:
            parent[st] = None
            frontier.append(st)
    while frontier:
        state = frontier.popleft()
        tracker.tick()
        for nxt in _successors(board, state, consume_keys):
            if nxt in parent:
                continue
            parent[nxt] = state
            if nxt[0] in board.goals:
                if not want_witness:
                    return True, None
                nodes = [nxt[0]]
                cur = state
                while cur is not None:
                    nodes.append(cur[0])
                    cur = parent[cur]
                nodes.reverse()
                edges = tuple((nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1))
                return True, EdgePath(edges)
            frontier.append(nxt)
    return False, None


def verify_gridwalk_path(level: Level, path: EdgePath, game: GameDef,
                         *, consume_keys: bool = False) -> tuple[bool, str | None]:
    board = _Board(level, game)
    start_syms = set(game.player_symbols)
    starts = [(r, c) for r in range(level.rows) for c in range(level.cols)
              if level.at(r, c) in start_syms]
    if len(starts) != 1 or not board.goals:
        return False, "level lacks a unique start or any goal"
    if not path.edges:
        return False, "empty path"
    nodes = path.nodes()
    if nodes[0] != starts[0]:
        return False, f"path starts at {nodes[0]}, not the start tile {starts[0]}"
    for i in range(len(path.edges) - 1):
        if path.edges[i][1] != path.edges[i + 1][0]:
            return False, f"edges {i} and {i + 1} do not share an endpoint"
    state = _start_state(nodes[0])
    for i in range(1, len(nodes)):
        target = nodes[i]
        legal = {s[0]: s for s in _successors(board, state, consume_keys)}
        if target not in legal:
            return False, f"illegal move {nodes[i - 1]} -> {target}"
        state = legal[target]
    if nodes[-1] not in board.goals:
        return False, "path does not end on the goal tile"
    return True, None
