"""Helpers that fabricate exporter-layout pair directories for tests."""

import hashlib
import json

import numpy as np

TILE = 256


def write_ppm(path, array):
    height, width = array.shape[:2]
    path.write_bytes(b"P6\n%d %d\n255\n" % (width, height) + array.tobytes())


def make_tile(seed: int) -> np.ndarray:
    """Structured 256x256x3 content: gradients plus a few seeded rectangles."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:TILE, 0:TILE]
    r = ((xx * 3 + yy) // 4) % 256
    g = ((xx + yy * 5) // 8) % 256
    b = np.full_like(xx, int(rng.integers(0, 256)))
    tile = np.stack([r, g, b], axis=2).astype(np.uint8)
    for _ in range(4):
        x0, y0 = rng.integers(0, TILE - 40, size=2)
        w, h = rng.integers(20, 40, size=2)
        tile[y0 : y0 + h, x0 : x0 + w] = rng.integers(0, 256, size=3)
    return tile


def make_pair_dir(root, n_train: int, n_test: int, seed: int = 7):
    """Write a manifest.json plus composites under root; returns the manifest."""
    (root / "pairs").mkdir(parents=True)
    entries = []
    split = {}
    for index in range(n_train + n_test):
        pair_id = f"p{index:04d}"
        composite = np.concatenate(
            [make_tile(seed * 1000 + 2 * index), make_tile(seed * 1000 + 2 * index + 1)],
            axis=1,
        )
        write_ppm(root / "pairs" / f"{pair_id}.ppm", composite)
        entries.append({"id": pair_id, "origin": [TILE * index, 0], "path": f"pairs/{pair_id}.ppm"})
        split[pair_id] = "train" if index < n_train else "test"
    manifest = {
        "composite_size": [2 * TILE, TILE],
        "pairs": entries,
        "seed": seed,
        "split": split,
        "tile_size": TILE,
    }
    (root / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


def dir_snapshot(root):
    """Relative path plus content hash for every file under root."""
    files = sorted(p for p in root.rglob("*") if p.is_file())
    return [(str(p.relative_to(root)), hashlib.sha256(p.read_bytes()).hexdigest()) for p in files]
