"""Tile extraction and paired-sample export for image-to-image training.

An (input, target) image pair is cut into aligned non-overlapping tiles;
each tile pair becomes one side-by-side composite with the input on the
left half and the target on the right. Exported sets are split into
train/test by a seeded shuffle so the same seed always reproduces the
same manifest byte for byte.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .images import ImageBuf, write_ppm
from .rng import XorShift64Star

TILE_SIZE = 256
TRAIN_FRACTION = 0.8


@dataclass(frozen=True)
class TilePair:
    """One aligned tile pair; image is the 2*tile x tile composite."""

    pair_id: str
    x: int
    y: int
    image: ImageBuf


def cut_tiles(
    image: ImageBuf, tile: int = TILE_SIZE, stride: int | None = None
) -> list[tuple[int, int, ImageBuf]]:
    """(x, y, tile) triples in row-major origin order; partials are dropped."""
    if stride is None:
        stride = tile
    if tile < 1 or stride < 1:
        raise ValueError("tile size and stride must be positive")
    if image.width < tile or image.height < tile:
        raise ValueError(
            f"image {image.width}x{image.height} is smaller than one {tile}x{tile} tile"
        )
    tiles = []
    for y in range(0, image.height - tile + 1, stride):
        for x in range(0, image.width - tile + 1, stride):
            tiles.append((x, y, image.crop(x, y, tile, tile)))
    return tiles


def compose_pair(left: ImageBuf, right: ImageBuf) -> ImageBuf:
    if (left.height, left.channels) != (right.height, right.channels):
        raise ValueError("pair halves must share height and channel count")
    samples = np.concatenate([left.samples, right.samples], axis=1)
    return ImageBuf(left.width + right.width, left.height, left.channels, samples)


def make_pairs(
    input_tiles: list[tuple[int, int, ImageBuf]],
    target_tiles: list[tuple[int, int, ImageBuf]],
) -> list[TilePair]:
    """Input tile on the left half, target tile on the right."""
    if len(input_tiles) != len(target_tiles):
        raise ValueError(
            f"tile count mismatch: {len(input_tiles)} input vs {len(target_tiles)} target"
        )
    pairs = []
    for index, ((xi, yi, left), (xt, yt, right)) in enumerate(zip(input_tiles, target_tiles)):
        if (xi, yi) != (xt, yt):
            raise ValueError(f"tile origin mismatch at index {index}: ({xi},{yi}) vs ({xt},{yt})")
        pairs.append(TilePair(f"p{index:04d}", xi, yi, compose_pair(left, right)))
    return pairs


def split_train_test(
    n: int, seed: int, fraction: float = TRAIN_FRACTION
) -> tuple[list[int], list[int]]:
    """Seeded shuffle of [0, n); the first floor(fraction * n) indices train."""
    if n < 2:
        raise ValueError(f"need at least 2 samples to split, got {n}")
    rng = XorShift64Star(seed)
    shuffled = rng.shuffle(list(range(n)))
    cut = int(n * fraction)
    return shuffled[:cut], shuffled[cut:]


def export_pairs(
    input_image: ImageBuf,
    target_image: ImageBuf,
    out_dir,
    seed: int,
    tile: int = TILE_SIZE,
    fraction: float = TRAIN_FRACTION,
) -> dict:
    """Write pairs/<id>.ppm plus manifest.json under out_dir; returns the manifest."""
    if (input_image.width, input_image.height) != (target_image.width, target_image.height):
        raise ValueError(
            f"input and target sizes differ: {input_image.width}x{input_image.height} "
            f"vs {target_image.width}x{target_image.height}"
        )
    pairs = make_pairs(cut_tiles(input_image, tile), cut_tiles(target_image, tile))
    train, test = split_train_test(len(pairs), seed, fraction)
    train_set = set(train)

    out_dir = Path(out_dir)
    pair_dir = out_dir / "pairs"
    pair_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    split = {}
    for index, pair in enumerate(pairs):
        rel_path = f"pairs/{pair.pair_id}.ppm"
        write_ppm(pair.image, out_dir / rel_path)
        entries.append({"id": pair.pair_id, "origin": [pair.x, pair.y], "path": rel_path})
        split[pair.pair_id] = "train" if index in train_set else "test"
    manifest = {
        "composite_size": [2 * tile, tile],
        "pairs": entries,
        "seed": seed,
        "split": split,
        "tile_size": tile,
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return manifest
