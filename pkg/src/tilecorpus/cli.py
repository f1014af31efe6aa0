"""Command-line surface for corpus generation, solving, checking, and metrics."""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .corpus import (MANIFEST_NAME, atomic_write_text, dump_json, iter_shard,
                     read_manifest, shard_dir, shard_file_counts, write_entry,
                     write_manifest)
from .errors import (GenerationBudgetError, LevelFormatError,
                     PointsFormatError, SearchLimitExceeded)
from .games import BUILTIN_GAMES, get_game
from .generator import GenSpec, batch_generate
from .level import parse_level, serialize_level
from .mechanics import SearchLimits, check_solvable, verify_witness
from .patterns import check_acceptable, load_patterns_file, patterns_for, save_patterns
from .render import DEFAULT_TILE_SIZE, render_game_level, write_ppm
from .robustness import (DEFAULT_RADII, continuous_nonrobustness,
                         discrete_nonrobustness, load_points_file,
                         normalize_points, render_discrete_table,
                         render_sweep_table)

log = logging.getLogger("tilecorpus")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--corpus-root", default="corpus",
                   help="root directory for corpus shards (default: ./corpus)")
    p.add_argument("--game", required=True, choices=BUILTIN_GAMES)
    p.add_argument("--variant", default=None,
                   help="game variant (default: the game's first variant)")


def _add_limits(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-states", type=int, default=1_000_000,
                   help="solver state budget per level")
    p.add_argument("--max-seconds", type=float, default=10.0,
                   help="solver wall-clock budget per level")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilecorpus",
        description="Generate, solve, and analyze 2D tile-based game levels.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a corpus shard")
    _add_common(p)
    _add_limits(p)
    p.add_argument("--label", default="solvable",
                   choices=("solvable", "unsolvable"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--retry-budget", type=int, default=400)
    p.add_argument("--patterns", default=None,
                   help="pattern set file (default: extract from shipped examples)")

    p = sub.add_parser("solve", help="solve shard levels and write witnesses")
    _add_common(p)
    _add_limits(p)

    p = sub.add_parser("verify", help="verify every witness in a shard")
    _add_common(p)

    p = sub.add_parser("accept", help="check acceptability of shard levels")
    _add_common(p)
    p.add_argument("--patterns", default=None)

    p = sub.add_parser("robust-discrete",
                       help="radius-1 non-robustness of a shard")
    _add_common(p)
    _add_limits(p)
    p.add_argument("--mode", default="sampled",
                   choices=("exhaustive", "sampled"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--patterns", default=None)
    p.add_argument("--json-out", default=None)

    p = sub.add_parser("robust-continuous",
                       help="Euclidean non-robustness of labeled points")
    p.add_argument("--points", required=True, action="append",
                   help="points file; repeat for a multi-row table")
    p.add_argument("--radii", default=None,
                   help="comma-separated radii (default: the standard sweep)")
    p.add_argument("--no-normalize", action="store_true",
                   help="skip min-max normalization")
    p.add_argument("--json-out", default=None)

    p = sub.add_parser("render", help="render a level file to a plain PPM")
    p.add_argument("--game", required=True, choices=BUILTIN_GAMES)
    p.add_argument("--level", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--tile-size", type=int, default=DEFAULT_TILE_SIZE)

    p = sub.add_parser("render-shard", help="render every level of a shard")
    _add_common(p)
    p.add_argument("--tile-size", type=int, default=DEFAULT_TILE_SIZE)

    p = sub.add_parser("stats", help="summarize a shard's manifest and files")
    _add_common(p)

    p = sub.add_parser("patterns", help="extract and save a pattern set")
    p.add_argument("--game", required=True, choices=BUILTIN_GAMES)
    p.add_argument("--variant", default=None)
    p.add_argument("--out", required=True)

    return parser


def _variant_of(args) -> str:
    game = get_game(args.game)
    if args.variant is not None:
        game.variant(args.variant)
        return args.variant
    return next(iter(game.variants))


def _patterns_of(args, game, variant):
    if getattr(args, "patterns", None):
        return load_patterns_file(args.patterns)
    return patterns_for(game, variant)


def _limits_of(args) -> SearchLimits:
    return SearchLimits(max_states=args.max_states,
                        max_seconds=args.max_seconds)


def cmd_generate(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    ps = _patterns_of(args, game, variant)
    spec = GenSpec(game, variant, ps, args.label, args.seed,
                   retry_budget=args.retry_budget, limits=_limits_of(args))
    log.info("generate game=%s variant=%s label=%s n=%d seed=%d root=%s",
             args.game, variant, args.label, args.n, args.seed,
             args.corpus_root)
    try:
        manifest = batch_generate(spec, args.n, out_dir=args.corpus_root)
    except GenerationBudgetError as err:
        log.error("generation failed: %s", err)
        return EXIT_FAILURE
    shard = shard_dir(args.corpus_root, args.game, variant)
    log.info("wrote %d levels to %s (duplicates: %d)",
             manifest["n_generated"], shard, manifest["duplicates"]["count"])
    return EXIT_OK


def cmd_solve(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    shard = shard_dir(args.corpus_root, args.game, variant)
    limits = _limits_of(args)
    solved = unsolvable = skipped = 0
    for entry in iter_shard(shard, game):
        try:
            ok, witness = check_solvable(entry.level, game, limits)
        except SearchLimitExceeded:
            skipped += 1
            continue
        meta = dict(entry.meta)
        meta["label"] = "solvable" if ok else "unsolvable"
        write_entry(shard, entry.index, entry.level, meta,
                    witness if ok else None)
        if ok:
            solved += 1
        else:
            unsolvable += 1
    log.info("solve: %d solvable, %d unsolvable, %d limit-exceeded",
             solved, unsolvable, skipped)
    print(f"solvable {solved} unsolvable {unsolvable} limit-exceeded {skipped}")
    return EXIT_OK


def cmd_verify(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    shard = shard_dir(args.corpus_root, args.game, variant)
    total = passed = 0
    failures = []
    for entry in iter_shard(shard, game):
        if entry.witness is None:
            continue
        total += 1
        result = verify_witness(entry.level, entry.witness, game)
        if result:
            passed += 1
        else:
            failures.append((entry.index, result.reason))
    for index, reason in failures:
        log.error("witness %05d failed: %s", index, reason)
    print(f"verified {passed}/{total} witnesses")
    return EXIT_OK if passed == total else EXIT_FAILURE


def cmd_accept(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    ps = _patterns_of(args, game, variant)
    shard = shard_dir(args.corpus_root, args.game, variant)
    total = passed = 0
    for entry in iter_shard(shard, game):
        total += 1
        ok, violations = check_acceptable(entry.level, ps)
        if ok:
            passed += 1
        else:
            log.warning("level %05d unacceptable (%d violations)",
                        entry.index, len(violations))
    print(f"acceptable {passed}/{total}")
    return EXIT_OK if passed == total else EXIT_FAILURE


def cmd_robust_discrete(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    ps = _patterns_of(args, game, variant)
    shard = shard_dir(args.corpus_root, args.game, variant)
    levels = [entry.level for entry in iter_shard(shard, game)]
    if not levels:
        log.error("no levels in %s", shard)
        return EXIT_FAILURE
    report = discrete_nonrobustness(levels, game, ps, mode=args.mode,
                                    seed=args.seed, limits=_limits_of(args))
    print(render_discrete_table([report]), end="")
    if args.json_out:
        atomic_write_text(Path(args.json_out), dump_json(report.to_dict()))
    return EXIT_OK


def cmd_robust_continuous(args) -> int:
    radii = DEFAULT_RADII
    if args.radii:
        radii = tuple(float(v) for v in args.radii.split(","))
    rows = []
    payload = {}
    for path in args.points:
        try:
            points = load_points_file(path)
        except (OSError, PointsFormatError) as err:
            log.error("cannot read %s: %s", path, err)
            return EXIT_FAILURE
        if not args.no_normalize:
            points = normalize_points(points)
        sweep = continuous_nonrobustness(points, radii)
        name = Path(path).stem
        rows.append((name, sweep))
        payload[name] = sweep.to_dict()
    print(render_sweep_table(rows), end="")
    if args.json_out:
        atomic_write_text(Path(args.json_out), dump_json(payload))
    return EXIT_OK


def cmd_render(args) -> int:
    game = get_game(args.game)
    try:
        with open(args.level, "r", encoding="utf-8") as fh:
            level = parse_level(fh.read(), game, validate_counts=False)
    except (OSError, LevelFormatError) as err:
        log.error("cannot read level: %s", err)
        return EXIT_FAILURE
    image = render_game_level(level, game, args.tile_size)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_ppm(image, args.out)
    log.info("wrote %s (%dx%d)", args.out, image.width, image.height)
    return EXIT_OK


def cmd_render_shard(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    shard = shard_dir(args.corpus_root, args.game, variant)
    out_dir = shard / "images"
    out_dir.mkdir(parents=True, exist_ok=True)
    count = 0
    for entry in iter_shard(shard, game):
        image = render_game_level(entry.level, game, args.tile_size)
        write_ppm(image, out_dir / f"{entry.index:05d}.ppm")
        count += 1
    print(f"rendered {count} levels to {out_dir}")
    return EXIT_OK


def cmd_stats(args) -> int:
    game = get_game(args.game)
    variant = _variant_of(args)
    shard = shard_dir(args.corpus_root, args.game, variant)
    try:
        manifest = read_manifest(shard)
    except OSError as err:
        log.error("cannot read manifest: %s", err)
        return EXIT_FAILURE
    counts = shard_file_counts(shard)
    print(f"shard: {shard}")
    print(f"game/variant/label: {manifest['game']}/{manifest['variant']}"
          f"/{manifest['label']}")
    print(f"levels: manifest={manifest['n_generated']} files={counts['levels']}")
    print(f"solutions: files={counts['solutions']}")
    print(f"meta: files={counts['meta']}")
    print(f"duplicates: {manifest['duplicates']['count']}")
    print(f"base seed: {manifest['base_seed']}")
    ok = manifest["n_generated"] == counts["levels"] == counts["meta"]
    return EXIT_OK if ok else EXIT_FAILURE


def cmd_patterns(args) -> int:
    game = get_game(args.game)
    variant = args.variant or next(iter(game.variants))
    ps = patterns_for(game, variant)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    save_patterns(ps, args.out)
    print(f"wrote {len(ps.patterns)} patterns to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "verify": cmd_verify,
    "accept": cmd_accept,
    "robust-discrete": cmd_robust_discrete,
    "robust-continuous": cmd_robust_continuous,
    "render": cmd_render,
    "render-shard": cmd_render_shard,
    "stats": cmd_stats,
    "patterns": cmd_patterns,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr)
    workers = os.environ.get("TILECORPUS_WORKERS")
    if workers:
        log.info("TILECORPUS_WORKERS=%s (informational; work runs in-process)",
                 workers)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError) as err:
        log.error("%s", err)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
