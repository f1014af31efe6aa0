"""Corpus shard layout and sidecar metadata.

A shard is one generated batch:

    <root>/<game>/<variant>/levels/NNNNN.lvl
    <root>/<game>/<variant>/solutions/NNNNN.path | NNNNN.play
    <root>/<game>/<variant>/meta/NNNNN.meta
    <root>/<game>/<variant>/manifest

Level files are UTF-8 with LF-terminated rows; meta files and the manifest
are JSON. All files are written atomically (write-then-rename) and contain
no timestamps, so a shard is byte-identical across reruns of the same seed.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

from .games import GameDef
from .level import Level, parse_level, write_level_text
from .mechanics.witness import (WITNESS_SUFFIX, SolutionWitness, dump_witness,
                                load_witness)

MANIFEST_NAME = "manifest"


def shard_dir(root, game_id: str, variant: str) -> Path:
    return Path(root) / game_id / variant


def level_name(index: int) -> str:
    return f"{index:05d}"


def atomic_write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def dump_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


@dataclass(frozen=True)
class ShardEntry:
    index: int
    level: Level
    meta: dict
    witness: SolutionWitness | None


def write_entry(shard: Path, index: int, level: Level, meta: dict,
                witness: SolutionWitness | None) -> None:
    name = level_name(index)
    atomic_write_text(shard / "levels" / f"{name}.lvl", write_level_text(level))
    meta = dict(meta)
    if witness is not None:
        suffix = WITNESS_SUFFIX[witness.kind]
        atomic_write_text(shard / "solutions" / f"{name}{suffix}",
                          dump_witness(witness))
        meta["witness"] = f"solutions/{name}{suffix}"
        meta["witness_kind"] = witness.kind
    else:
        meta["witness"] = None
        meta["witness_kind"] = None
    atomic_write_text(shard / "meta" / f"{name}.meta", dump_json(meta))


def write_manifest(shard: Path, manifest: dict) -> None:
    atomic_write_text(shard / MANIFEST_NAME, dump_json(manifest))


def read_manifest(shard) -> dict:
    with open(Path(shard) / MANIFEST_NAME, "r", encoding="utf-8") as fh:
        return json.load(fh)


def read_entry(shard, index: int, game: GameDef) -> ShardEntry:
    shard = Path(shard)
    name = level_name(index)
    with open(shard / "levels" / f"{name}.lvl", "r", encoding="utf-8") as fh:
        level = parse_level(fh.read(), game, validate_counts=False)
    with open(shard / "meta" / f"{name}.meta", "r", encoding="utf-8") as fh:
        meta = json.load(fh)
    witness = None
    if meta.get("witness"):
        with open(shard / meta["witness"], "r", encoding="utf-8") as fh:
            witness = load_witness(fh.read(), meta["witness_kind"], game)
    return ShardEntry(index, level, meta, witness)


def iter_shard(shard, game: GameDef):
    shard = Path(shard)
    levels_dir = shard / "levels"
    for path in sorted(levels_dir.glob("*.lvl")):
        yield read_entry(shard, int(path.stem), game)


def shard_file_counts(shard) -> dict[str, int]:
    shard = Path(shard)
    return {
        "levels": len(list((shard / "levels").glob("*.lvl"))),
        "solutions": len(list((shard / "solutions").glob("*")))
        if (shard / "solutions").is_dir() else 0,
        "meta": len(list((shard / "meta").glob("*.meta"))),
    }
