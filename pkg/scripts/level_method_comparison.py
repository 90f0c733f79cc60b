"""Compare quantile and interval level assignment on one scenario.

The quantile method forces near-equal bucket sizes; the interval method
cuts the composite score at fixed thresholds, so its buckets track the
score distribution instead. This script runs the pipeline both ways on
the same bundle and prints the per-level counts plus a 4x4 cross-tab of
cell assignments (rows = quantile level, columns = interval level).
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from evsite.grids import read_ascii_grid
from evsite.pipeline import load_run_config, run
from evsite.scenario import ScenarioConfig, generate


def run_with_method(bundle: Path, method: str, out_dir: Path) -> np.ndarray:
    doc = json.loads((bundle / "run_config.json").read_text())
    doc["level_method"] = method
    doc["output_dir"] = str(out_dir)
    config_path = bundle / f"run_config_{method}.json"
    config_path.write_text(json.dumps(doc, indent=2))
    run(load_run_config(config_path))
    return read_ascii_grid(out_dir / "levels_synth.asc").values.astype(int)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("out_dir")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--size", type=int, default=96)
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    bundle = out / "bundle"
    generate(ScenarioConfig(seed=args.seed, width=args.size, height=args.size), bundle)

    quantile = run_with_method(bundle, "quantile", out / "quantile")
    interval = run_with_method(bundle, "interval", out / "interval")

    print(f"{'level':>8} {'quantile':>10} {'interval':>10}")
    for level in (1, 2, 3, 4):
        print(f"{level:>8} {(quantile == level).sum():>10} {(interval == level).sum():>10}")

    agree = (quantile == interval).mean()
    print(f"\ncell-level agreement: {agree:.1%}")

    print("\ncross-tab (rows quantile, cols interval):")
    print(f"{'':>6}" + "".join(f"{c:>8}" for c in (1, 2, 3, 4)))
    for r in (1, 2, 3, 4):
        row = [(int(((quantile == r) & (interval == c)).sum())) for c in (1, 2, 3, 4)]
        print(f"{r:>6}" + "".join(f"{v:>8}" for v in row))
    return 0


if __name__ == "__main__":
    sys.exit(main())
