"""Build a paired-tile training set from one synthetic scenario.

Generates a scenario sized to an exact multiple of the tile size, runs the
full pipeline on it, renders the land-cover raster (input side) and the
augmented suitability map (target side) to PPM, and cuts both into aligned
256x256 tiles written as side-by-side composites under <out>/pairs with a
manifest.json. The output directory is everything a downstream
image-to-image trainer needs.
"""

import argparse
import json
import sys
from pathlib import Path

from evsite.grids import read_ascii_grid, render_colormap
from evsite.images import read_ppm
from evsite.pipeline import load_run_config, run
from evsite.scenario import ScenarioConfig, generate
from evsite.tiles import TILE_SIZE, export_pairs

LANDCOVER_PALETTE = {
    1: (120, 120, 120),   # developed
    2: (210, 180, 140),   # barren
    3: (70, 160, 70),     # green space
    4: (60, 90, 200),     # water
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir", help="directory for the bundle, run outputs and pairs")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--tiles-x", type=int, default=2, help="tile columns (width = 256x)")
    parser.add_argument("--tiles-y", type=int, default=2, help="tile rows (height = 256x)")
    parser.add_argument("--cell-size", type=float, default=120.0)
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    bundle = out / "bundle"
    config = ScenarioConfig(
        seed=args.seed,
        width=args.tiles_x * TILE_SIZE,
        height=args.tiles_y * TILE_SIZE,
        cell_size=args.cell_size,
    )
    print(f"generating scenario {config.width}x{config.height} (seed {config.seed}) ...")
    generate(config, bundle)

    print("running suitability pipeline ...")
    report = run(load_run_config(bundle / "run_config.json"))
    by_class = report["zones"]["by_class"]
    print(f"  zones: {by_class}")

    landcover = read_ascii_grid(bundle / "landcover.asc")
    input_ppm = out / "input_landcover.ppm"
    render_colormap(landcover, LANDCOVER_PALETTE, input_ppm)
    target_ppm = bundle / "out" / "levels_synth_augmented.ppm"

    manifest = export_pairs(
        read_ppm(input_ppm), read_ppm(target_ppm), out, seed=args.seed
    )
    n_train = sum(1 for v in manifest["split"].values() if v == "train")
    print(f"wrote {len(manifest['pairs'])} pairs ({n_train} train / "
          f"{len(manifest['pairs']) - n_train} test) under {out / 'pairs'}")
    print(f"manifest: {out / 'manifest.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
