"""Command-line entry point.

Exit codes partition failures: 0 success, 2 configuration or argument
error, 3 missing or malformed input data, 1 anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import traceback
from pathlib import Path

from .features import GeoJSONError
from .grids import (
    GridParseError,
    PaletteError,
    read_ascii_grid,
    render_colormap,
    write_categorical_ascii,
)
from .images import ImageFormatError, read_ppm
from .metrics import psnr, ssim
from .pipeline import (
    LEVEL_PALETTE,
    ConfigError,
    DataError,
    classify_only,
    load_run_config,
    run,
)
from .scenario import ScenarioConfig, generate, golden_hash
from .suitability import RegionClass
from .tiles import export_pairs


def cmd_run(args) -> int:
    config = load_run_config(args.config)
    report = run(config)
    synth = report["levels"]["base"]["synth"]
    total = sum(synth.values())
    print(f"run complete: {report['zones']['count']} zones, {total} leveled cells "
          f"-> {config.output_dir}")
    return 0


def cmd_metrics(args) -> int:
    a = read_ppm(args.image_a)
    b = read_ppm(args.image_b)
    try:
        psnr_value = psnr(a, b)
        ssim_value = ssim(a, b, args.mode)
    except ValueError as exc:
        raise ConfigError(str(exc))
    doc = {
        "psnr": "inf" if math.isinf(psnr_value) else psnr_value,
        "ssim": ssim_value,
    }
    print(json.dumps(doc, sort_keys=True))
    return 0


def cmd_export_tiles(args) -> int:
    input_image = read_ppm(args.input)
    target_image = read_ppm(args.target)
    try:
        manifest = export_pairs(
            input_image, target_image, args.out_dir, args.seed, args.tile, args.fraction
        )
    except ValueError as exc:
        raise ConfigError(str(exc))
    n_train = sum(1 for v in manifest["split"].values() if v == "train")
    print(f"exported {len(manifest['pairs'])} pairs "
          f"({n_train} train / {len(manifest['pairs']) - n_train} test) to {args.out_dir}")
    return 0


def cmd_gen_scenario(args) -> int:
    try:
        config = ScenarioConfig(
            seed=args.seed,
            width=args.size,
            height=args.size,
            cell_size=args.cell_size,
            zone_k=args.zones,
        )
        out = generate(config, args.out_dir)
    except ValueError as exc:
        raise ConfigError(str(exc))
    print(golden_hash(out))
    return 0


def _load_palette(path) -> dict[int, tuple[int, int, int]]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        palette = {}
        for code, rgb in doc.items():
            r, g, b = (int(v) for v in rgb)
            if not all(0 <= v <= 255 for v in (r, g, b)):
                raise ValueError(f"channel out of range for code {code}")
            palette[int(code)] = (r, g, b)
        return palette
    except FileNotFoundError:
        raise ConfigError(f"palette file not found: {path}")
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"bad palette file {path}: {exc}")


def cmd_render(args) -> int:
    grid = read_ascii_grid(args.grid)
    palette = _load_palette(args.palette) if args.palette else dict(LEVEL_PALETTE)
    render_colormap(grid, palette, args.out)
    print(f"rendered {args.grid} -> {args.out}")
    return 0


def cmd_classify_regions(args) -> int:
    config = load_run_config(args.config)
    assignment, raster = classify_only(config)
    counts = {cls.value: 0 for cls in RegionClass}
    for cls in assignment.values():
        counts[cls.value] += 1
    if args.out:
        write_categorical_ascii(raster, args.out)
    doc = {
        "counts": counts,
        "zones": {str(zone): cls.value for zone, cls in sorted(assignment.items())},
    }
    print(json.dumps(doc, sort_keys=True, indent=2))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="evsite", description="EV charging site-suitability pipeline"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute the full pipeline from a JSON config")
    p.add_argument("config", help="path to run_config.json")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("metrics", help="PSNR/SSIM between two PPM images")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.add_argument("--mode", choices=("auto", "global", "windowed"), default="auto")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("export-tiles", help="cut aligned tiles and write the pair set")
    p.add_argument("input", help="input-side PPM image")
    p.add_argument("target", help="target-side PPM image")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tile", type=int, default=256)
    p.add_argument("--fraction", type=float, default=0.8)
    p.set_defaults(func=cmd_export_tiles)

    p = sub.add_parser("gen-scenario", help="write a synthetic input bundle")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--size", type=int, default=96, help="grid width and height in cells")
    p.add_argument("--cell-size", type=float, default=120.0, help="cell edge in meters")
    p.add_argument("--zones", type=int, default=4, help="zone partition factor k (k x k zones)")
    p.set_defaults(func=cmd_gen_scenario)

    p = sub.add_parser("render", help="colormap a categorical grid to PPM")
    p.add_argument("grid", help="ASCII grid to render")
    p.add_argument("out", help="output PPM path")
    p.add_argument("--palette", help="JSON file mapping code -> [r, g, b]", default=None)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("classify-regions", help="zone classification only, as JSON")
    p.add_argument("config", help="path to run_config.json")
    p.add_argument("--out", help="also write the class raster here", default=None)
    p.set_defaults(func=cmd_classify_regions)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ConfigError, PaletteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DataError, GridParseError, GeoJSONError, ImageFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 1


if __name__ == "__main__":
    sys.exit(main())
