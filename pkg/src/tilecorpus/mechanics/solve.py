"""Game-agnostic solvability entry points and witness verification."""
from __future__ import annotations

from dataclasses import dataclass

from ..games import GameDef, get_game
from ..level import Level, validate_marker_counts
from .common import SearchLimits
from .gridwalk import solve_gridwalk, verify_gridwalk_path
from .platformer import (solve_climber, solve_platformer, verify_climber_path,
                         verify_platformer_path)
from .pusher import solve_pusher, verify_pusher_playthrough
from .witness import EdgePath, Playthrough, SolutionWitness


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_solvable(level: Level, game: GameDef | None = None,
                   limits: SearchLimits | None = None, *,
                   mode: str = "astar", consume_keys: bool = False,
                   prune_deadlocks: bool = True,
                   want_witness: bool = True) -> tuple[bool, SolutionWitness | None]:
    """Decide solvability of a structurally valid level; attach a witness.

    Raises SearchLimitExceeded when the budget runs out, which callers must
    not conflate with unsolvable.
    """
    if game is None:
        game = get_game(level.game_id)
    validate_marker_counts(level, game)
    if game.mechanics == "grid-walk":
        return solve_gridwalk(level, game, limits, consume_keys=consume_keys,
                              want_witness=want_witness)
    if game.mechanics == "platformer":
        return solve_platformer(level, game, limits, want_witness=want_witness)
    if game.mechanics == "climber":
        return solve_climber(level, game, limits, want_witness=want_witness)
    if game.mechanics == "pusher":
        return solve_pusher(level, game, limits, mode=mode,
                            prune_deadlocks=prune_deadlocks,
                            want_witness=want_witness)
    raise ValueError(f"unknown mechanics {game.mechanics!r}")


def label_solvable(level: Level, game: GameDef | None = None,
                   limits: SearchLimits | None = None) -> bool:
    """Total solvability label for arbitrary alphabet-valid grids.

    Perturbed levels can violate the marker contract, so this uses permissive
    semantics: the level is solvable if the goal condition is reachable from
    ANY player marker (extra markers act as plain ground); a level with no
    player marker, or no goal tile in a goal game, is unsolvable.

    Raises SearchLimitExceeded when the search budget runs out.
    """
    if game is None:
        game = get_game(level.game_id)
    player_syms = set(game.player_symbols)
    starts = [(r, c) for r in range(level.rows) for c in range(level.cols)
              if level.at(r, c) in player_syms]
    if not starts:
        return False
    if game.mechanics == "grid-walk":
        ok, _ = solve_gridwalk(level, game, limits, starts=starts, want_witness=False)
        return ok
    if game.mechanics == "platformer":
        ok, _ = solve_platformer(level, game, limits, starts=starts, want_witness=False)
        return ok
    if game.mechanics == "climber":
        ok, _ = solve_climber(level, game, limits, starts=starts, want_witness=False)
        return ok
    if game.mechanics == "pusher":
        for p in starts:
            ok, _ = solve_pusher(level, game, limits, want_witness=False, player=p)
            if ok:
                return True
        return False
    raise ValueError(f"unknown mechanics {game.mechanics!r}")


def verify_witness(level: Level, witness: SolutionWitness,
                   game: GameDef | None = None, *,
                   consume_keys: bool = False) -> VerifyResult:
    """Check a witness step by step; never raises, failures carry a reason."""
    if game is None:
        game = get_game(level.game_id)
    if game.mechanics == "pusher":
        if not isinstance(witness, Playthrough):
            return VerifyResult(False, "pusher expects a playthrough witness")
        ok, reason = verify_pusher_playthrough(level, witness, game)
        return VerifyResult(ok, reason)
    if not isinstance(witness, EdgePath):
        return VerifyResult(False, f"{game.mechanics} expects an edge-path witness")
    if game.mechanics == "grid-walk":
        ok, reason = verify_gridwalk_path(level, witness, game,
                                          consume_keys=consume_keys)
    elif game.mechanics == "platformer":
        ok, reason = verify_platformer_path(level, witness, game)
    elif game.mechanics == "climber":
        ok, reason = verify_climber_path(level, witness, game)
    else:
        return VerifyResult(False, f"unknown mechanics {game.mechanics!r}")
    return VerifyResult(ok, reason)
