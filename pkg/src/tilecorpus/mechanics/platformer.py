"""Gravity-bound movement templates: side-view platformer and wall climber.

Both games share gravity (fall until landing; falling out of the grid kills
the move) and both treat the goal as touched the moment the player's
trajectory crosses it. The platformer walks and jumps fixed clearance-checked
arcs (up to 4 rows of rise, 4 columns of travel at the apex). The climber has
no standing jump; instead it climbs walls, tops out over their edge, jumps
diagonally away from walls, slides down them, and leaps 2 columns off ledges.
"""
from __future__ import annotations

from collections import deque

from ..games import GOAL, GameDef
from ..level import Level
from .common import LimitTracker, SearchLimits, functional_rows, solid_mask
from .witness import EdgePath

Pos = tuple[int, int]


class _Board:
    def __init__(self, level: Level, game: GameDef):
        self.rows, self.cols = level.rows, level.cols
        rows = functional_rows(level, game)
        self.solid = solid_mask(rows, game)
        role = game.roles
        self.goals = {(r, c) for r in range(level.rows) for c in range(level.cols)
                      if role[rows[r][c]] == GOAL}

    def passable(self, pos: Pos) -> bool:
        r, c = pos
        return 0 <= r < self.rows and 0 <= c < self.cols and not self.solid[r][c]

    def supported(self, pos: Pos) -> bool:
        r, c = pos
        return r + 1 < self.rows and self.solid[r + 1][c]

    def wall_beside(self, pos: Pos, side: int) -> bool:
        r, c = pos
        cc = c + side
        return 0 <= cc < self.cols and self.solid[r][cc]

    def clinging(self, pos: Pos) -> bool:
        return self.wall_beside(pos, -1) or self.wall_beside(pos, 1)


def _fall(board: _Board, pos: Pos, touched: list[Pos],
          stable) -> Pos | None:
    """Drop until stable; None when the player falls out of the grid."""
    r, c = pos
    while not stable(board, (r, c)):
        r += 1
        if r >= board.rows:
            return None
        touched.append((r, c))
    return (r, c)


def _stands(board: _Board, pos: Pos) -> bool:
    return board.supported(pos)


def _holds(board: _Board, pos: Pos) -> bool:
    return board.supported(pos) or board.clinging(pos)


def platform_successors(board: _Board, pos: Pos, rise: int, span: int) -> list[Pos]:
    out: list[Pos] = []
    touched: list[Pos] = []
    r, c = pos
    if not board.supported(pos):
        land = _fall(board, pos, touched, _stands)
        if land is not None:
            out.append(land)
    else:
        for dc in (-1, 1):
            t = (r, c + dc)
            if board.passable(t):
                touched.append(t)
                land = _fall(board, t, touched, _stands)
                if land is not None:
                    out.append(land)
        for h in range(1, rise + 1):
            apex = (r - h, c)
            if not board.passable(apex):
                break
            touched.append(apex)
            land = _fall(board, apex, touched, _stands)
            if land is not None:
                out.append(land)
            for dirn in (-1, 1):
                for w in range(1, span + 1):
                    cell = (r - h, c + dirn * w)
                    if not board.passable(cell):
                        break
                    touched.append(cell)
                    land = _fall(board, cell, touched, _stands)
                    if land is not None:
                        out.append(land)
    for cell in touched:
        if cell in board.goals:
            out.append(cell)
    seen = set()
    uniq = []
    for p in out:
        if p not in seen:
            seen.add(p)
            uniq.append(p)
    return uniq


def climber_successors(board: _Board, pos: Pos, leap: int) -> list[Pos]:
    out: list[Pos] = []
    touched: list[Pos] = []
    r, c = pos
    if not _holds(board, pos):
        land = _fall(board, pos, touched, _holds)
        if land is not None:
            out.append(land)
    else:
        if board.supported(pos):
            for dc in (-1, 1):
                t = (r, c + dc)
                if board.passable(t):
                    touched.append(t)
                    land = _fall(board, t, touched, _holds)
                    if land is not None:
                        out.append(land)
            for dirn in (-1, 1):
                ok = True
                for j in range(1, leap + 1):
                    cell = (r, c + dirn * j)
                    if not board.passable(cell):
                        ok = False
                        break
                    touched.append(cell)
                if ok:
                    land = _fall(board, (r, c + dirn * leap), touched, _holds)
                    if land is not None:
                        out.append(land)
        for side in (-1, 1):
            if not board.wall_beside(pos, side):
                continue
            up = (r - 1, c)
            if board.passable(up):
                touched.append(up)
                if _holds(board, up):
                    out.append(up)
                over = (r - 1, c + side)
                if board.passable(over):
                    touched.append(over)
                    out.append(over)  # top out onto the wall's edge
                away = (r - 1, c - side)
                if board.passable(away):
                    touched.append(away)
                    land = _fall(board, away, touched, _holds)
                    if land is not None:
                        out.append(land)
        if not board.supported(pos):
            below = (r + 1, c)
            if board.passable(below):
                touched.append(below)
                land = _fall(board, below, touched, _holds)
                if land is not None:
                    out.append(land)
    for cell in touched:
        if cell in board.goals:
            out.append(cell)
    seen = set()
    uniq = []
    for p in out:
        if p not in seen:
            seen.add(p)
            uniq.append(p)
    return uniq


def _solve(level: Level, game: GameDef, limits: SearchLimits | None,
           successors, starts: list[Pos] | None,
           want_witness: bool) -> tuple[bool, EdgePath | None]:
    board = _Board(level, game)
    if starts is None:
        starts = [(i // level.cols, i % level.cols)
                  for i, s in enumerate(level.cells)
                  if game.roles[s] in ("start", "start-on-slot")]
    starts = [p for p in starts if board.passable(p)]
    if not starts or not board.goals:
        return False, None
    tracker = LimitTracker(limits)
    parent: dict[Pos, Pos | None] = {}
    frontier: deque[Pos] = deque()
    for p in starts:
        if p not in parent:
            parent[p] = None
            frontier.append(p)
    while frontier:
        pos = frontier.popleft()
        tracker.tick()
        for nxt in successors(board, pos):
            if nxt in parent:
                continue
            parent[nxt] = pos
            if nxt in board.goals:
                if not want_witness:
                    return True, None
                nodes = [nxt]
                cur = pos
                while cur is not None:
                    nodes.append(cur)
                    cur = parent[cur]
                nodes.reverse()
                edges = tuple((nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1))
                return True, EdgePath(edges)
            frontier.append(nxt)
    return False, None


def solve_platformer(level: Level, game: GameDef, limits: SearchLimits | None = None,
                     *, starts: list[Pos] | None = None,
                     want_witness: bool = True) -> tuple[bool, EdgePath | None]:
    rise = int(game.movement.get("jump_max_rise", 4))
    span = int(game.movement.get("jump_max_span", 4))
    return _solve(level, game, limits,
                  lambda b, p: platform_successors(b, p, rise, span),
                  starts, want_witness)


def solve_climber(level: Level, game: GameDef, limits: SearchLimits | None = None,
                  *, starts: list[Pos] | None = None,
                  want_witness: bool = True) -> tuple[bool, EdgePath | None]:
    leap = int(game.movement.get("leap_span", 2))
    return _solve(level, game, limits,
                  lambda b, p: climber_successors(b, p, leap),
                  starts, want_witness)


def _verify_path(level: Level, path: EdgePath, game: GameDef,
                 successors) -> tuple[bool, str | None]:
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
    for i in range(1, len(nodes)):
        if nodes[i] not in successors(board, nodes[i - 1]):
            return False, f"illegal move {nodes[i - 1]} -> {nodes[i]}"
    if nodes[-1] not in board.goals:
        return False, "path does not end on the goal tile"
    return True, None


def verify_platformer_path(level: Level, path: EdgePath,
                           game: GameDef) -> tuple[bool, str | None]:
    rise = int(game.movement.get("jump_max_rise", 4))
    span = int(game.movement.get("jump_max_span", 4))
    return _verify_path(level, path, game,
                        lambda b, p: platform_successors(b, p, rise, span))


def verify_climber_path(level: Level, path: EdgePath,
                        game: GameDef) -> tuple[bool, str | None]:
    leap = int(game.movement.get("leap_span", 2))
    return _verify_path(level, path, game,
                        lambda b, p: climber_successors(b, p, leap))
