"""End-to-end orchestration of a suitability run from a JSON configuration.

A run loads one input bundle, derives the criterion layers, classifies the
zones, executes the three region models (optionally in parallel, always
with bit-identical results), synthesizes the level map, and optionally
repeats the model stage with the parking-availability criterion folded in.
Everything written is deterministic for fixed inputs except the timing
values inside run_report.json.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .features import (
    FeatureSet,
    GeoJSONError,
    Point,
    parse_geojson_subset,
    rasterize_points,
    rasterize_polygon,
    rasterize_polyline,
    serialize_geojson,
)
from .grids import (
    CategoricalGrid,
    Grid,
    GridParseError,
    categorical_from_grid,
    read_ascii_grid,
    render_colormap,
    write_ascii_grid,
    write_categorical_ascii,
)
from .suitability import (
    LEVEL_LABELS,
    ONE_MILE_M,
    RegionClass,
    SuitabilitySpec,
    augment_with_parking,
    classify_regions,
    extract_candidate_sites,
    levelize,
    overlay,
    region_mask,
    spec_from_json,
    synthesize,
)
from .transforms import (
    Direction,
    EmptyFeatureSetError,
    ZoneSet,
    distance_transform,
    landcover_fractions,
    paint_attribute,
    quantile_normalize,
    read_zone_attributes,
)

REGION_ORDER = (RegionClass.TNC, RegionClass.CORRIDOR, RegionClass.RURAL)

LEVEL_PALETTE = {1: (26, 152, 80), 2: (166, 217, 106), 3: (253, 174, 97), 4: (215, 48, 39)}

_PAINTED_COLUMNS = {
    "pop_density": "pop_density_per_sqmi",
    "pct_hispanic_black": "pct_hispanic_black",
    "pct_below_poverty": "pct_below_poverty",
    "pct_multifamily": "pct_multifamily",
    "pct_zero_vehicle": "pct_zero_vehicle",
    "dac_flag": "dac_flag",
}


class ConfigError(Exception):
    """Bad run configuration or arguments (CLI exit code 2)."""


class DataError(Exception):
    """Missing or malformed input data (CLI exit code 3)."""


@dataclass(frozen=True)
class RunConfig:
    seed: int
    zones: Path
    zone_attributes: Path
    corridor: Path
    roads: Path
    evcs: Path
    dcfc: Path
    substations: Path
    landcover: Path
    parking: Path
    residential: Path
    environmental: Path
    specs: dict[str, Path]
    rural_housing_max: float = 200.0
    corridor_distance_m: float = ONE_MILE_M
    level_method: str = "quantile"
    augmentation: bool = True
    window_radius: int = 2
    developed_codes: tuple[int, ...] = (1,)
    output_dir: Path = Path("out")

    def __post_init__(self):
        if self.rural_housing_max <= 0 or self.corridor_distance_m <= 0:
            raise ConfigError("classification thresholds must be positive")
        if self.level_method not in ("quantile", "interval"):
            raise ConfigError(f"unknown level method {self.level_method!r}")
        if self.window_radius < 0:
            raise ConfigError("window_radius must be >= 0")
        missing = {"tnc", "corridor", "rural"} - set(self.specs)
        if missing:
            raise ConfigError(f"config lacks model spec paths for: {sorted(missing)}")


_PATH_KEYS = (
    "zones", "zone_attributes", "corridor", "roads", "evcs", "dcfc",
    "substations", "landcover", "parking", "residential", "environmental",
)


def load_run_config(path) -> RunConfig:
    """Parse a JSON run configuration; relative paths resolve against its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"run config not found: {path}")
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse run config {path}: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError(f"run config {path} must hold a JSON object")
    base = path.parent

    def _resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else base / p

    try:
        thresholds = doc.get("thresholds", {})
        return RunConfig(
            seed=int(doc.get("seed", 0)),
            **{key: _resolve(doc[key]) for key in _PATH_KEYS},
            specs={name: _resolve(p) for name, p in doc["specs"].items()},
            rural_housing_max=float(thresholds.get("rural_housing_max", 200.0)),
            corridor_distance_m=float(thresholds.get("corridor_distance_m", ONE_MILE_M)),
            level_method=doc.get("level_method", "quantile"),
            augmentation=bool(doc.get("augmentation", True)),
            window_radius=int(doc.get("window_radius", 2)),
            developed_codes=tuple(int(c) for c in doc.get("developed_codes", [1])),
            output_dir=_resolve(doc.get("output_dir", "out")),
        )
    except KeyError as exc:
        raise ConfigError(f"run config {path} lacks required key {exc.args[0]!r}")
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"run config {path}: {exc}")


def thread_count() -> int:
    """Worker cap from EVSITE_THREADS; 0 or unset picks a small automatic cap."""
    raw = os.environ.get("EVSITE_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"EVSITE_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError("EVSITE_THREADS must be >= 0")
    return n if n > 0 else min(3, os.cpu_count() or 1)


def _read_text(path: Path) -> str:
    try:
        return path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"input file not found: {path}")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}")


def _read_features(path: Path) -> FeatureSet:
    try:
        return parse_geojson_subset(_read_text(path))
    except GeoJSONError as exc:
        raise DataError(f"{path}: {exc}")


def _read_grid(path: Path) -> Grid:
    if not path.exists():
        raise DataError(f"input file not found: {path}")
    try:
        return read_ascii_grid(path)
    except GridParseError as exc:
        raise DataError(f"{path}: {exc}")


@dataclass
class _Inputs:
    zoneset: ZoneSet
    template: Grid
    corridor: FeatureSet
    roads: FeatureSet
    evcs: FeatureSet
    dcfc: FeatureSet
    substations: FeatureSet
    landcover: CategoricalGrid
    parking: FeatureSet
    residential: FeatureSet
    environmental: FeatureSet
    specs: dict[RegionClass, SuitabilitySpec] = field(default_factory=dict)


def _load_zoneset(config: RunConfig) -> tuple[ZoneSet, Grid]:
    """Zone raster plus attribute table, and the template every layer aligns to."""
    zone_grid = _read_grid(config.zones)
    try:
        zones_cat = categorical_from_grid(zone_grid)
    except ValueError as exc:
        raise DataError(f"{config.zones}: {exc}")
    if not config.zone_attributes.exists():
        raise DataError(f"input file not found: {config.zone_attributes}")
    try:
        table = read_zone_attributes(config.zone_attributes)
        zoneset = ZoneSet(zones_cat, table)
    except ValueError as exc:
        raise DataError(f"{config.zone_attributes}: {exc}")
    template = zone_grid.with_values(np.zeros_like(zone_grid.values), nodata=-9999.0)
    return zoneset, template


def classify_only(config: RunConfig) -> tuple[dict[int, RegionClass], CategoricalGrid]:
    """Just the zone classification stage: corridor distance plus the rule set."""
    zoneset, template = _load_zoneset(config)
    corridor = _read_features(config.corridor)
    corridor_mask = _polyline_mask(corridor, template, config.corridor)
    corridor_distance = _edt(corridor_mask, config.corridor, "corridor")
    return classify_regions(
        zoneset, corridor_distance, config.rural_housing_max, config.corridor_distance_m
    )


def _load_inputs(config: RunConfig) -> _Inputs:
    zoneset, template = _load_zoneset(config)

    landcover_grid = _read_grid(config.landcover)
    if not landcover_grid.aligned_with(template):
        raise DataError(f"{config.landcover}: not aligned with the zone raster")
    try:
        landcover = categorical_from_grid(landcover_grid)
    except ValueError as exc:
        raise DataError(f"{config.landcover}: {exc}")

    specs = {}
    for name, cls in (("tnc", RegionClass.TNC), ("corridor", RegionClass.CORRIDOR),
                      ("rural", RegionClass.RURAL)):
        spec_path = config.specs[name]
        try:
            spec = spec_from_json(_read_text(spec_path))
        except (ValueError, KeyError) as exc:
            raise DataError(f"{spec_path}: {exc}")
        if spec.region is not cls:
            raise ConfigError(
                f"{spec_path}: declares region {spec.region.value!r}, expected {name!r}"
            )
        specs[cls] = spec

    return _Inputs(
        zoneset=zoneset,
        template=template,
        corridor=_read_features(config.corridor),
        roads=_read_features(config.roads),
        evcs=_read_features(config.evcs),
        dcfc=_read_features(config.dcfc),
        substations=_read_features(config.substations),
        landcover=landcover,
        parking=_read_features(config.parking),
        residential=_read_features(config.residential),
        environmental=_read_features(config.environmental),
        specs=specs,
    )


def _merge_masks(masks: list[Grid], template: Grid) -> Grid:
    merged = np.zeros_like(template.values)
    for m in masks:
        merged = np.maximum(merged, m.values)
    return template.with_values(merged)


def _polyline_mask(fs: FeatureSet, template: Grid, path: Path) -> Grid:
    lines = fs.polylines()
    if not len(lines):
        raise DataError(f"{path}: holds no LineString features")
    return _merge_masks([rasterize_polyline(f.geometry, template) for f in lines], template)


def _polygon_mask(fs: FeatureSet, template: Grid, path: Path) -> Grid:
    polys = fs.polygons()
    if len(polys) != len(fs):
        raise DataError(f"{path}: expected Polygon features only")
    return _merge_masks([rasterize_polygon(f.geometry, template) for f in polys], template)


def _point_mask(fs: FeatureSet, template: Grid, path: Path, what: str) -> Grid:
    points = fs.points()
    if not len(points):
        raise DataError(f"{path}: holds no {what} Point features")
    mask, _ = rasterize_points(points, template, mode="presence")
    return mask


def _filter_points(fs: FeatureSet, predicate) -> FeatureSet:
    return FeatureSet(
        tuple(f for f in fs if isinstance(f.geometry, Point) and predicate(f.properties))
    )


def _edt(mask: Grid, path: Path, what: str) -> Grid:
    try:
        return distance_transform(mask)
    except EmptyFeatureSetError:
        raise DataError(f"{path}: no {what} cells inside the study area")


def _kv(props: dict, minimum: float) -> bool:
    try:
        return float(props.get("kv", 0)) >= minimum
    except (TypeError, ValueError):
        return False


def build_layers(inputs: _Inputs, config: RunConfig) -> dict[str, Grid]:
    """Derive every raw criterion layer named by the canonical models."""
    template = inputs.template
    layers: dict[str, Grid] = {}

    corridor_mask = _polyline_mask(inputs.corridor, template, config.corridor)
    layers["corridor_distance"] = _edt(corridor_mask, config.corridor, "corridor")
    roads_mask = _polyline_mask(inputs.roads, template, config.roads)
    layers["traffic_distance"] = _edt(roads_mask, config.roads, "road")

    layers["evcs_distance"] = _edt(
        _point_mask(inputs.evcs, template, config.evcs, "charging station"),
        config.evcs, "charging station",
    )

    non_tesla = _filter_points(
        inputs.dcfc, lambda p: str(p.get("network", "")).lower() != "tesla"
    )
    if not len(non_tesla):
        raise DataError(f"{config.dcfc}: holds no non-Tesla fast chargers")
    mask, _ = rasterize_points(non_tesla, template, mode="presence")
    layers["dcfc_distance"] = _edt(mask, config.dcfc, "fast charger")

    for name, minimum in (("substation_220kv_distance", 220.0),
                          ("substation_110kv_distance", 110.0)):
        subs = _filter_points(inputs.substations, lambda p, m=minimum: _kv(p, m))
        if not len(subs):
            raise DataError(f"{config.substations}: no substation at or above {minimum:g} kV")
        mask, _ = rasterize_points(subs, template, mode="presence")
        layers[name] = _edt(mask, config.substations, "substation")

    developed, under = landcover_fractions(
        inputs.landcover, set(config.developed_codes), config.window_radius
    )
    layers["developed_fraction"] = developed
    layers["under_developed_fraction"] = under

    for layer_name, column in _PAINTED_COLUMNS.items():
        try:
            layers[layer_name] = paint_attribute(inputs.zoneset, column, template)
        except KeyError as exc:
            raise DataError(f"{config.zone_attributes}: {exc.args[0]}")

    return layers


class _NormalizationCache:
    """Quantile-normalized layers, computed once per (layer, direction)."""

    def __init__(self, raw: dict[str, Grid]):
        self.raw = raw
        self._cache: dict[tuple[str, Direction], Grid] = {}

    def get(self, layer_name: str, direction: Direction) -> Grid:
        key = (layer_name, direction)
        if key not in self._cache:
            self._cache[key] = quantile_normalize(self.raw[layer_name], direction)
        return self._cache[key]

    def for_spec(self, spec: SuitabilitySpec, extra: dict[str, Grid] | None = None) -> dict[str, Grid]:
        extra = extra or {}
        out: dict[str, Grid] = {}
        for crit in spec.criteria:
            if crit.layer in extra:
                out[crit.layer] = extra[crit.layer]
                continue
            if crit.layer not in self.raw:
                raise ConfigError(
                    f"criterion {crit.name!r}: no layer named {crit.layer!r} is derivable"
                )
            if crit.layer in out and out[crit.layer] is not self.get(crit.layer, crit.direction):
                raise ConfigError(
                    f"layer {crit.layer!r} referenced twice with conflicting directions"
                )
            out[crit.layer] = self.get(crit.layer, crit.direction)
        return out


def _empty_levels(template: Grid) -> CategoricalGrid:
    return CategoricalGrid(
        template.width, template.height, template.origin_x, template.origin_y,
        template.cell_size, np.zeros((template.height, template.width), dtype=np.int64),
        dict(LEVEL_LABELS),
    )


def _run_models(
    specs: dict[RegionClass, SuitabilitySpec],
    cache: _NormalizationCache,
    masks: dict[RegionClass, Grid],
    method: str,
    template: Grid,
    workers: int,
    extra: dict[str, Grid] | None = None,
) -> dict[RegionClass, tuple[Grid, CategoricalGrid]]:
    """One model wave; absent regions get a nodata composite and empty levels."""
    # warm the normalization cache serially so worker threads only read it
    for cls in REGION_ORDER:
        cache.for_spec(specs[cls], extra)

    def one(cls: RegionClass) -> tuple[Grid, CategoricalGrid]:
        mask = masks[cls]
        if not (mask.values == 1.0).any():
            composite = template.with_values(
                np.full_like(template.values, template.nodata)
            )
            return composite, _empty_levels(template)
        layers = cache.for_spec(specs[cls], extra)
        composite = overlay(specs[cls], layers, mask)
        try:
            levels = levelize(composite, method)
        except ValueError as exc:
            raise DataError(f"region {cls.value!r}: {exc}")
        return composite, levels

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, REGION_ORDER))
    else:
        results = [one(cls) for cls in REGION_ORDER]
    return dict(zip(REGION_ORDER, results))


def _level_histogram(levels: CategoricalGrid) -> dict[str, int]:
    counts = np.bincount(levels.codes.ravel(), minlength=5)
    return {str(level): int(counts[level]) for level in range(1, 5)}


def run(config: RunConfig) -> dict:
    """Execute the full pipeline; returns the run report (also written to disk)."""
    t0 = time.perf_counter()
    timings: dict[str, float] = {}

    inputs = _load_inputs(config)
    template = inputs.template
    timings["load"] = time.perf_counter() - t0

    t = time.perf_counter()
    layers = build_layers(inputs, config)
    timings["layers"] = time.perf_counter() - t

    t = time.perf_counter()
    assignment, region_raster = classify_regions(
        inputs.zoneset,
        layers["corridor_distance"],
        config.rural_housing_max,
        config.corridor_distance_m,
    )
    masks = {cls: region_mask(region_raster, cls) for cls in REGION_ORDER}
    timings["classify"] = time.perf_counter() - t

    t = time.perf_counter()
    cache = _NormalizationCache(layers)
    workers = thread_count()
    base = _run_models(inputs.specs, cache, masks, config.level_method, template, workers)
    base_synth = synthesize({cls: lv for cls, (_, lv) in base.items()}, region_raster)
    timings["models"] = time.perf_counter() - t

    augmented = None
    augmented_synth = None
    candidate_mask = None
    if config.augmentation:
        t = time.perf_counter()
        parking_mask = _polygon_mask(inputs.parking, template, config.parking)
        residential_mask = _polygon_mask(inputs.residential, template, config.residential)
        environmental_mask = _polygon_mask(inputs.environmental, template, config.environmental)
        aug_specs = {}
        availability = None
        for cls in REGION_ORDER:
            aug_specs[cls], candidate_mask, availability = augment_with_parking(
                inputs.specs[cls], parking_mask, residential_mask, environmental_mask,
                config.window_radius,
            )
        extra = {"parking_availability": availability}
        augmented = _run_models(
            aug_specs, cache, masks, config.level_method, template, workers, extra
        )
        augmented_synth = synthesize(
            {cls: lv for cls, (_, lv) in augmented.items()}, region_raster
        )
        timings["augmented"] = time.perf_counter() - t

    t = time.perf_counter()
    out = config.output_dir
    out.mkdir(parents=True, exist_ok=True)

    write_categorical_ascii(region_raster, out / "regions.asc")
    for cls in REGION_ORDER:
        composite, levels = base[cls]
        write_ascii_grid(composite, out / f"composite_{cls.value}.asc")
        write_categorical_ascii(levels, out / f"levels_{cls.value}.asc")
    write_categorical_ascii(base_synth, out / "levels_synth.asc")
    render_colormap(base_synth, LEVEL_PALETTE, out / "levels_synth.ppm")

    if augmented is not None:
        for cls in REGION_ORDER:
            composite, levels = augmented[cls]
            write_ascii_grid(composite, out / f"composite_{cls.value}_augmented.asc")
            write_categorical_ascii(levels, out / f"levels_{cls.value}_augmented.asc")
        write_categorical_ascii(augmented_synth, out / "levels_synth_augmented.asc")
        render_colormap(augmented_synth, LEVEL_PALETTE, out / "levels_synth_augmented.ppm")
        sites = extract_candidate_sites(augmented_synth, candidate_mask, inputs.zoneset.zones)
    else:
        all_cells = template.with_values(np.ones_like(template.values))
        sites = extract_candidate_sites(base_synth, all_cells, inputs.zoneset.zones)
    (out / "candidates.geojson").write_text(serialize_geojson(sites), encoding="utf-8")
    timings["write"] = time.perf_counter() - t
    timings["total"] = time.perf_counter() - t0

    class_counts = {cls.value: 0 for cls in REGION_ORDER}
    for cls in assignment.values():
        class_counts[cls.value] += 1

    report = {
        "seed": config.seed,
        "level_method": config.level_method,
        "zones": {"count": len(assignment), "by_class": class_counts},
        "levels": {
            "base": {
                **{cls.value: _level_histogram(base[cls][1]) for cls in REGION_ORDER},
                "synth": _level_histogram(base_synth),
            },
        },
        "candidates": len(sites),
        "timings_s": timings,
    }
    if augmented is not None:
        report["levels"]["augmented"] = {
            **{cls.value: _level_histogram(augmented[cls][1]) for cls in REGION_ORDER},
            "synth": _level_histogram(augmented_synth),
        }
    (out / "run_report.json").write_text(
        json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return report
