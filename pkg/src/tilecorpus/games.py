"""Game definitions: tile alphabets, tile roles, movement selector, palettes.

The four built-in games load from versioned JSON config files shipped as
package data, so new games can be added without touching code as long as one
of the existing movement templates applies.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Mapping

# Tile roles.
SOLID = "solid"
EMPTY = "empty"
START = "start"
GOAL = "goal"
KEY = "key"
DOOR = "door"
PORTAL = "portal"
CRATE = "crate"
SLOT = "slot"
CRATE_ON_SLOT = "crate-on-slot"
START_ON_SLOT = "start-on-slot"

ROLES = frozenset({
    SOLID, EMPTY, START, GOAL, KEY, DOOR, PORTAL, CRATE, SLOT,
    CRATE_ON_SLOT, START_ON_SLOT,
})

# Movement templates implemented by the mechanics package.
MECHANICS = ("grid-walk", "platformer", "climber", "pusher")

# Symbols whose presence marks the player's location. The pusher game writes
# the player as `+` when standing on a slot mid-playthrough, so both count.
PLAYER_ROLES = frozenset({START, START_ON_SLOT})


@dataclass(frozen=True)
class Variant:
    name: str
    required_specials: Mapping[str, int]


@dataclass(frozen=True)
class GameDef:
    game_id: str
    alphabet: tuple[str, ...]  # canonical order; perturbation enumeration follows it
    roles: Mapping[str, str]
    decor_groups: Mapping[str, str]  # decorative symbol -> functional symbol
    default_dims: tuple[int, int]  # (rows, cols)
    mechanics: str
    pattern_k: int
    variants: Mapping[str, Variant]
    portal_pairs: tuple[tuple[str, str], ...] = ()
    movement: Mapping[str, int] = field(default_factory=dict)
    palette: Mapping[str, tuple[int, int, int]] = field(default_factory=dict)
    version: int = 1

    def __post_init__(self):
        if len(set(self.alphabet)) != len(self.alphabet):
            raise ValueError(f"{self.game_id}: duplicate symbols in alphabet")
        for sym in self.alphabet:
            role = self.roles.get(sym)
            if role not in ROLES:
                raise ValueError(f"{self.game_id}: symbol {sym!r} has bad role {role!r}")
        if self.roles.get("{") != START:
            raise ValueError(f"{self.game_id}: '{{' must have the start role")
        for sym, target in self.decor_groups.items():
            if target not in self.roles:
                raise ValueError(f"{self.game_id}: decor target {target!r} lacks a role")
            if self.roles[sym] != self.roles[target]:
                raise ValueError(f"{self.game_id}: decor {sym!r} role differs from {target!r}")
        if self.mechanics not in MECHANICS:
            raise ValueError(f"{self.game_id}: unknown mechanics {self.mechanics!r}")

    def role_of(self, sym: str) -> str:
        return self.roles[sym]

    def functional(self, sym: str) -> str:
        """Canonical symbol after collapsing decorative variants."""
        return self.decor_groups.get(sym, sym)

    def symbols_with_role(self, *roles: str) -> tuple[str, ...]:
        return tuple(s for s in self.alphabet if self.roles[s] in roles)

    @property
    def player_symbols(self) -> tuple[str, ...]:
        return self.symbols_with_role(START, START_ON_SLOT)

    @property
    def goal_symbols(self) -> tuple[str, ...]:
        return self.symbols_with_role(GOAL)

    @property
    def has_goal_tile(self) -> bool:
        return bool(self.goal_symbols)

    def variant(self, name: str) -> Variant:
        try:
            return self.variants[name]
        except KeyError:
            raise KeyError(
                f"{self.game_id} has no variant {name!r}; "
                f"choose from {sorted(self.variants)}") from None


def _from_config(cfg: dict) -> GameDef:
    variants = {
        name: Variant(name=name, required_specials=dict(v["required_specials"]))
        for name, v in cfg["variants"].items()
    }
    return GameDef(
        game_id=cfg["game_id"],
        alphabet=tuple(cfg["alphabet"]),
        roles=dict(cfg["roles"]),
        decor_groups=dict(cfg.get("decor_groups", {})),
        default_dims=tuple(cfg["default_dims"]),
        mechanics=cfg["mechanics"],
        pattern_k=int(cfg["pattern_k"]),
        variants=variants,
        portal_pairs=tuple(tuple(p) for p in cfg.get("portal_pairs", [])),
        movement=dict(cfg.get("movement", {})),
        palette={k: tuple(v) for k, v in cfg.get("palette", {}).items()},
        version=int(cfg.get("version", 1)),
    )


def load_game_config(path) -> GameDef:
    with open(path, "r", encoding="utf-8") as fh:
        return _from_config(json.load(fh))


def _builtin(name: str) -> GameDef:
    ref = resources.files("tilecorpus").joinpath(f"data/games/{name}.json")
    return _from_config(json.loads(ref.read_text(encoding="utf-8")))


BUILTIN_GAMES = ("cave", "platform", "crates", "vertical")

_cache: dict[str, GameDef] = {}


def get_game(game_id: str) -> GameDef:
    if game_id not in _cache:
        if game_id not in BUILTIN_GAMES:
            raise KeyError(f"unknown game {game_id!r}; built-ins: {BUILTIN_GAMES}")
        _cache[game_id] = _builtin(game_id)
    return _cache[game_id]


def example_level_texts(game_id: str, variant: str) -> list[tuple[str, str]]:
    """Shipped hand-authored example levels for one game variant.

    Returns (filename, text) pairs in filename order.
    """
    root = resources.files("tilecorpus").joinpath(f"data/examples/{game_id}/{variant}")
    out = []
    for entry in sorted(root.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".lvl"):
            out.append((entry.name, entry.read_text(encoding="utf-8")))
    if not out:
        raise FileNotFoundError(f"no example levels for {game_id}/{variant}")
    return out
