"""How much does the reading of "distance to existing chargers" matter?

The canonical urban model rewards cells far from existing charging
stations (gap filling). The alternate reading rewards proximity
(reinforcing already served corridors). This script scores the TNC
region both ways on one scenario and reports how the Level-1 cell set
moves: overlap, Jaccard index, and the count per level.

A low Jaccard here is the expected outcome: the two readings disagree
exactly where the charger-distance criterion dominates the composite.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from evsite.models import ALTERNATE_SPECS, TNC_SPEC
from evsite.pipeline import (
    _NormalizationCache,
    _load_inputs,
    build_layers,
    load_run_config,
)
from evsite.scenario import ScenarioConfig, generate
from evsite.suitability import RegionClass, classify_regions, levelize, overlay, region_mask


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--size", type=int, default=96)
    args = parser.parse_args(argv)

    bundle = Path(args.out_dir) / "bundle"
    generate(ScenarioConfig(seed=args.seed, width=args.size, height=args.size), bundle)
    config = load_run_config(bundle / "run_config.json")

    inputs = _load_inputs(config)
    layers = build_layers(inputs, config)
    _, region_raster = classify_regions(
        inputs.zoneset, layers["corridor_distance"],
        config.rural_housing_max, config.corridor_distance_m,
    )
    mask = region_mask(region_raster, RegionClass.TNC)
    n_cells = int((mask.values == 1.0).sum())
    if n_cells < 4:
        print("scenario has no usable TNC region; pick another seed")
        return 1

    cache = _NormalizationCache(layers)
    results = {}
    for name, spec in (("gap filling", TNC_SPEC),
                       ("reinforcement", ALTERNATE_SPECS["tnc_evcs_nearer"])):
        composite = overlay(spec, cache.for_spec(spec), mask)
        results[name] = levelize(composite, config.level_method).codes

    print(f"TNC region: {n_cells} cells\n")
    print(f"{'level':>8} {'gap filling':>14} {'reinforcement':>14}")
    for level in (1, 2, 3, 4):
        print(f"{level:>8} {(results['gap filling'] == level).sum():>14} "
              f"{(results['reinforcement'] == level).sum():>14}")

    a = results["gap filling"] == 1
    b = results["reinforcement"] == 1
    union = int((a | b).sum())
    inter = int((a & b).sum())
    jaccard = inter / union if union else float("nan")
    print(f"\nLevel-1 overlap: {inter} cells of {union} in either "
          f"(Jaccard {jaccard:.3f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
