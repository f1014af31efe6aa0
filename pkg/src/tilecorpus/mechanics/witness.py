"""Solution witnesses and their file formats.

Two kinds exist: an edge path (list of location-to-location edges) for games
solved by reachability, and a playthrough (sequence of levels) for the crate
pusher. Edge paths are written one edge per line as "r1,c1 -> r2,c2";
playthroughs are level texts separated by blank lines.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import WitnessFormatError
from ..games import GameDef
from ..level import Level, parse_level, serialize_level

Pos = tuple[int, int]
Edge = tuple[Pos, Pos]


@dataclass(frozen=True)
class EdgePath:
    edges: tuple[Edge, ...]

    kind = "edge-path"

    def nodes(self) -> list[Pos]:
        if not self.edges:
            return []
        return [self.edges[0][0]] + [e[1] for e in self.edges]


@dataclass(frozen=True)
class Playthrough:
    states: tuple[Level, ...]

    kind = "playthrough"


SolutionWitness = EdgePath | Playthrough

_EDGE_RE = re.compile(r"^\s*(-?\d+)\s*,\s*(-?\d+)\s*->\s*(-?\d+)\s*,\s*(-?\d+)\s*$")


def dump_edge_path(path: EdgePath) -> str:
    lines = [f"{a[0]},{a[1]} -> {b[0]},{b[1]}" for a, b in path.edges]
    return "\n".join(lines) + "\n"


def load_edge_path(text: str) -> EdgePath:
    edges: list[Edge] = []
    for line in text.split("\n"):
        if not line.strip():
            continue
        m = _EDGE_RE.match(line)
        if not m:
            raise WitnessFormatError(f"bad edge line: {line!r}")
        r1, c1, r2, c2 = map(int, m.groups())
        edges.append(((r1, c1), (r2, c2)))
    if not edges:
        raise WitnessFormatError("empty edge path")
    return EdgePath(tuple(edges))


def dump_playthrough(play: Playthrough) -> str:
    return "\n\n".join(serialize_level(s) for s in play.states) + "\n"


def load_playthrough(text: str, game: GameDef) -> Playthrough:
    blocks = [b for b in text.split("\n\n") if b.strip()]
    if not blocks:
        raise WitnessFormatError("empty playthrough")
    states = tuple(parse_level(b, game) for b in blocks)
    return Playthrough(states)


WITNESS_SUFFIX = {"edge-path": ".path", "playthrough": ".play"}


def dump_witness(witness: SolutionWitness) -> str:
    if isinstance(witness, EdgePath):
        return dump_edge_path(witness)
    return dump_playthrough(witness)


def load_witness(text: str, kind: str, game: GameDef) -> SolutionWitness:
    if kind == "edge-path":
        return load_edge_path(text)
    if kind == "playthrough":
        return load_playthrough(text, game)
    raise WitnessFormatError(f"unknown witness kind {kind!r}")
