"""Paired-tile dataset access: manifest loading, composite splitting, tensors.

The pair directory is an external contract: manifest.json plus one binary
P6 image per pair, each a 512x256 composite with the input tile on the left
and the target tile on the right. The harness only ever reads from it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

TILE = 256
COMPOSITE_SIZE = (2 * TILE, TILE)  # width, height

_SUBSETS = ("train", "test")


class ManifestError(Exception):
    """The pair directory or one of its files violates the expected layout."""


def _next_token(buf: bytes, pos: int) -> tuple[bytes, int]:
    while pos < len(buf):
        char = buf[pos : pos + 1]
        if char == b"#":
            while pos < len(buf) and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif char.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < len(buf) and not buf[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise ManifestError("truncated PPM header")
    return buf[start:pos], pos


def read_ppm(path) -> np.ndarray:
    """Binary P6 image as an (h, w, 3) uint8 array."""
    buf = Path(path).read_bytes()
    magic, pos = _next_token(buf, 0)
    if magic != b"P6":
        raise ManifestError(f"{path}: expected a binary P6 image, got {magic!r}")
    fields = []
    for _ in range(3):
        token, pos = _next_token(buf, pos)
        if not token.isdigit():
            raise ManifestError(f"{path}: non-numeric PPM header field {token!r}")
        fields.append(int(token))
    width, height, maxval = fields
    if maxval != 255:
        raise ManifestError(f"{path}: unsupported maxval {maxval}")
    pos += 1  # exactly one whitespace byte separates the header from the raster
    need = width * height * 3
    raster = buf[pos : pos + need]
    if len(raster) < need:
        raise ManifestError(f"{path}: raster ends after {len(raster)} of {need} bytes")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width, 3)


@dataclass(frozen=True)
class Pair:
    pair_id: str
    input: np.ndarray  # (256, 256, 3) uint8
    target: np.ndarray  # (256, 256, 3) uint8
    subset: str  # "train" or "test"


def load_pairs(manifest_dir) -> list[Pair]:
    """Every pair listed in manifest.json, split into input and target tiles."""
    root = Path(manifest_dir)
    manifest_path = root / "manifest.json"
    if not manifest_path.is_file():
        raise ManifestError(f"no manifest.json under {root}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{manifest_path}: {exc}") from exc
    if not isinstance(manifest, dict):
        raise ManifestError("manifest must be a JSON object")
    for key in ("composite_size", "pairs", "split", "tile_size"):
        if key not in manifest:
            raise ManifestError(f"manifest is missing {key!r}")
    if manifest["tile_size"] != TILE or manifest["composite_size"] != list(COMPOSITE_SIZE):
        raise ManifestError(
            f"harness expects {COMPOSITE_SIZE[0]}x{COMPOSITE_SIZE[1]} composites "
            f"(tile {TILE}), manifest declares {manifest['composite_size']} "
            f"at tile {manifest['tile_size']}"
        )
    split = manifest["split"]

    pairs = []
    for entry in manifest["pairs"]:
        if not isinstance(entry, dict) or not {"id", "path"} <= entry.keys():
            raise ManifestError(f"malformed pair entry {entry!r}")
        pair_id = entry["id"]
        subset = split.get(pair_id)
        if subset not in _SUBSETS:
            raise ManifestError(f"pair {pair_id!r} has no train/test assignment")
        image_path = root / entry["path"]
        if not image_path.is_file():
            raise ManifestError(f"missing pair image {entry['path']}")
        composite = read_ppm(image_path)
        height, width = composite.shape[:2]
        if (width, height) != COMPOSITE_SIZE:
            raise ManifestError(
                f"{entry['path']}: composite is {width}x{height}, "
                f"expected {COMPOSITE_SIZE[0]}x{COMPOSITE_SIZE[1]}"
            )
        pairs.append(Pair(pair_id, composite[:, :TILE], composite[:, TILE:], subset))
    return pairs


def subset_pairs(pairs: list[Pair], subset: str) -> list[Pair]:
    if subset not in _SUBSETS:
        raise ValueError(f"unknown subset {subset!r}")
    return [pair for pair in pairs if pair.subset == subset]


def to_tensor(tile: np.ndarray) -> torch.Tensor:
    """(h, w, 3) uint8 to a (3, h, w) float32 tensor scaled onto [-1, 1]."""
    arr = np.ascontiguousarray(tile, dtype=np.float32) / 127.5 - 1.0
    return torch.from_numpy(arr).permute(2, 0, 1)


def to_image(tensor: torch.Tensor) -> np.ndarray:
    """(3, h, w) tensor on [-1, 1] back to (h, w, 3) uint8; .5 rounds up."""
    arr = tensor.detach().cpu().numpy().transpose(1, 2, 0).astype(np.float64)
    return np.clip(np.floor((arr + 1.0) * 127.5 + 0.5), 0.0, 255.0).astype(np.uint8)
