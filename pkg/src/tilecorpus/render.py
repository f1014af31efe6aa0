"""Flat-color raster rendering of levels.

Canonical output is plain PPM (P3): uncompressed, bit-exact across platforms,
no image library needed. Each tile becomes an s x s block of one color.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .errors import PaletteError
from .games import GameDef
from .level import Level

DEFAULT_TILE_SIZE = 16

Color = tuple[int, int, int]


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    pixels: tuple[Color, ...]  # row-major

    def at(self, x: int, y: int) -> Color:
        return self.pixels[y * self.width + x]


def render_level(level: Level, palette: Mapping[str, Color],
                 tile_size: int = DEFAULT_TILE_SIZE) -> RasterImage:
    missing = sorted({s for s in level.cells if s not in palette})
    if missing:
        raise PaletteError(f"palette missing entries for {missing}")
    s = tile_size
    width, height = level.cols * s, level.rows * s
    row_colors = [[palette[level.at(r, c)] for c in range(level.cols)]
                  for r in range(level.rows)]
    pixels: list[Color] = []
    for r in range(level.rows):
        band = [color for color in row_colors[r] for _ in range(s)]
        for _ in range(s):
            pixels.extend(band)
    return RasterImage(width, height, tuple(pixels))


def render_game_level(level: Level, game: GameDef,
                      tile_size: int = DEFAULT_TILE_SIZE) -> RasterImage:
    return render_level(level, game.palette, tile_size)


def to_ppm(image: RasterImage) -> str:
    lines = [f"P3", f"{image.width} {image.height}", "255"]
    for y in range(image.height):
        row = image.pixels[y * image.width:(y + 1) * image.width]
        lines.append(" ".join(f"{r} {g} {b}" for r, g, b in row))
    return "\n".join(lines) + "\n"


def from_ppm(text: str) -> RasterImage:
    tokens = []
    for line in text.split("\n"):
        hash_at = line.find("#")
        if hash_at >= 0:
            line = line[:hash_at]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P3":
        raise ValueError("not a plain PPM (P3) file")
    width, height, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    values = [int(t) for t in tokens[4:]]
    if len(values) != width * height * 3:
        raise ValueError("pixel data size mismatch")
    pixels = tuple((values[i], values[i + 1], values[i + 2])
                   for i in range(0, len(values), 3))
    return RasterImage(width, height, pixels)


def write_ppm(image: RasterImage, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(to_ppm(image))


def read_ppm(path) -> RasterImage:
    with open(path, "r", encoding="ascii") as fh:
        return from_ppm(fh.read())
