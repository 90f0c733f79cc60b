"""Deterministic synthetic input bundles for exercising the full pipeline.

The generated study area is a square grid split into k x k rectangular
zones with a diagonal EV corridor from the south-west to the north-east
corner. Three zones are constructed, not sampled: the south-east corner
zone is low-density (rural class), the diagonal zones sit on the corridor
with suburban densities (corridor class), and the north-west corner zone
is dense and far from the corridor (TNC class). Everything random flows
from a single seeded generator, so a bundle is byte-identical per seed.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import models
from .features import Feature, FeatureSet, Point, PolyLine, Polygon, serialize_geojson
from .grids import CategoricalGrid, write_categorical_ascii
from .rng import XorShift64Star
from .suitability import ONE_MILE_M, spec_to_json
from .transforms import write_zone_attributes

LANDCOVER_LABELS = {1: "developed", 2: "barren", 3: "green", 4: "water"}
DEVELOPED_CODES = (1,)

RURAL_HOUSING = (50.0, 200.0)
DIAGONAL_HOUSING = (300.0, 3000.0)
DENSE_HOUSING = (2000.0, 5000.0)
OTHER_HOUSING = (250.0, 4500.0)
DAC_PROBABILITY = 0.16

DEFAULT_RANGES = {
    "pop_density_per_sqmi": (100.0, 9058.0),
    "pct_hispanic_black": (0.0, 0.72),
    "pct_below_poverty": (0.0, 0.22),
    "pct_multifamily": (0.0, 0.62),
    "pct_zero_vehicle": (0.0, 0.10),
}

ATTRIBUTE_COLUMNS = (
    "housing_units_per_sqmi",
    "pop_density_per_sqmi",
    "pct_hispanic_black",
    "pct_below_poverty",
    "pct_multifamily",
    "pct_zero_vehicle",
    "dac_flag",
)


@dataclass(frozen=True)
class ScenarioConfig:
    seed: int = 42
    width: int = 96
    height: int = 96
    cell_size: float = 120.0
    zone_k: int = 4
    n_evcs: int = 12
    n_dcfc: int = 6
    n_substations: int = 8
    n_parking: int = 20
    ranges: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_RANGES)
    )

    def __post_init__(self):
        if self.width < 1 or self.height < 1 or self.cell_size <= 0:
            raise ValueError("grid dimensions and cell size must be positive")
        if self.zone_k < 2:
            raise ValueError("zone partition needs k >= 2")
        if self.zone_k * self.zone_k > self.width * self.height:
            raise ValueError("more zones than cells")
        if self.n_evcs < 1 or self.n_dcfc < 1 or self.n_substations < 2 or self.n_parking < 0:
            raise ValueError("need at least 1 EVCS, 1 DCFC and 2 substations")
        for name, (lo, hi) in self.ranges.items():
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"invalid range for {name!r}: ({lo}, {hi})")


def _zone_codes(config: ScenarioConfig) -> np.ndarray:
    rows = np.arange(config.height)
    cols = np.arange(config.width)
    zr = rows * config.zone_k // config.height
    zc = cols * config.zone_k // config.width
    return (zr[:, np.newaxis] * config.zone_k + zc[np.newaxis, :] + 1).astype(np.int64)


def _check_tnc_guarantee(config: ScenarioConfig) -> None:
    """The dense corner zone must stay beyond one mile of the corridor."""
    k, cs = config.zone_k, config.cell_size
    rows = np.arange(config.height)
    cols = np.arange(config.width)
    dense_rows = rows[rows * k // config.height == k - 1]
    dense_cols = cols[cols * k // config.width == 0]
    cy = (dense_rows[:, np.newaxis] + 0.5) * cs
    cx = (dense_cols[np.newaxis, :] + 0.5) * cs
    # distance of (cx, cy) to the segment (0,0)-(W*cs, H*cs)
    qx, qy = config.width * cs, config.height * cs
    t = np.clip((cx * qx + cy * qy) / (qx * qx + qy * qy), 0.0, 1.0)
    dist = np.hypot(cx - t * qx, cy - t * qy)
    if dist.min() <= ONE_MILE_M + cs:
        raise ValueError(
            "zone partition too fine-grained: the dense corner zone would fall "
            "within one mile of the corridor, so no TNC zone is guaranteed"
        )


def _zone_attributes(config: ScenarioConfig, rng: XorShift64Star) -> dict[int, dict[str, float]]:
    k = config.zone_k
    table = {}
    for zr in range(k):
        for zc in range(k):
            zone_id = zr * k + zc + 1
            if (zr, zc) == (0, k - 1):
                housing_range = RURAL_HOUSING
            elif (zr, zc) == (k - 1, 0):
                housing_range = DENSE_HOUSING
            elif zr == zc:
                housing_range = DIAGONAL_HOUSING
            else:
                housing_range = OTHER_HOUSING
            row = {"housing_units_per_sqmi": rng.uniform(*housing_range)}
            for name in ("pop_density_per_sqmi", "pct_hispanic_black", "pct_below_poverty",
                         "pct_multifamily", "pct_zero_vehicle"):
                row[name] = rng.uniform(*config.ranges[name])
            row["dac_flag"] = 1.0 if rng.next_float() < DAC_PROBABILITY else 0.0
            table[zone_id] = row
    return table


def _point_features(config: ScenarioConfig, rng: XorShift64Star) -> dict[str, FeatureSet]:
    w_m = config.width * config.cell_size
    h_m = config.height * config.cell_size

    evcs = []
    for _ in range(config.n_evcs):
        x, y = rng.uniform(0.0, w_m), rng.uniform(0.0, h_m)
        evcs.append(Feature(Point(x, y), {"level": 2 + rng.next_below(2)}))

    dcfc = []
    for i in range(config.n_dcfc):
        x, y = rng.uniform(0.0, w_m), rng.uniform(0.0, h_m)
        # the first station is always non-Tesla so the corridor model has input
        network = "other" if i == 0 else ("tesla" if rng.next_below(2) else "other")
        dcfc.append(Feature(Point(x, y), {"network": network}))

    substations = []
    for i in range(config.n_substations):
        x, y = rng.uniform(0.0, w_m), rng.uniform(0.0, h_m)
        if i == 0:
            kv = 220
        elif i == 1:
            kv = 110
        else:
            kv = 220 if rng.next_below(2) else 110
        substations.append(Feature(Point(x, y), {"kv": kv}))

    return {
        "evcs": FeatureSet(tuple(evcs)),
        "dcfc": FeatureSet(tuple(dcfc)),
        "substations": FeatureSet(tuple(substations)),
    }


def _cell_rect(col0: int, row0: int, cols: int, rows: int, cs: float, props) -> Feature:
    x0, y0 = col0 * cs, row0 * cs
    x1, y1 = (col0 + cols) * cs, (row0 + rows) * cs
    ring = ((x0, y0), (x1, y0), (x1, y1), (x0, y1), (x0, y0))
    return Feature(Polygon(ring), dict(props))


def _parking(config: ScenarioConfig, rng: XorShift64Star) -> FeatureSet:
    lots = []
    for _ in range(config.n_parking):
        col0 = rng.next_below(max(config.width - 4, 1))
        row0 = rng.next_below(max(config.height - 4, 1))
        size = 2 + rng.next_below(3)
        lots.append(_cell_rect(col0, row0, size, size, config.cell_size, {"kind": "parking"}))
    return FeatureSet(tuple(lots))


def _exclusion_areas(config: ScenarioConfig) -> tuple[FeatureSet, FeatureSet]:
    cs = config.cell_size
    w, h = config.width, config.height
    residential = FeatureSet(
        (
            _cell_rect(w // 10, h // 2, w // 5, h // 5, cs, {"kind": "residential"}),
            _cell_rect(5 * w // 8, h // 10, w // 5, h // 6, cs, {"kind": "residential"}),
        )
    )
    environmental = FeatureSet(
        (
            _cell_rect(0, h - h // 12, w, h // 12, cs, {"kind": "greenbelt"}),
            _cell_rect(w - w // 10, h - h // 16, w // 10, h // 16, cs, {"kind": "lake"}),
        )
    )
    return residential, environmental


def _landcover(config: ScenarioConfig, rng: XorShift64Star) -> CategoricalGrid:
    h, w = config.height, config.width
    rows = np.arange(h)[:, np.newaxis]
    cols = np.arange(w)[np.newaxis, :]

    codes = np.full((h, w), 3, dtype=np.int64)
    core_row, core_col = (7 * h) // 8, w // 8
    near_core = np.maximum(np.abs(rows - core_row), np.abs(cols - core_col)) <= max(h, w) // 7
    swath = np.abs(rows * w - cols * h) < 8 * max(h, w)
    codes[near_core | swath] = 1

    noise = np.array(
        [rng.next_float() for _ in range(h * w)], dtype=np.float64
    ).reshape(h, w)
    codes[(codes == 3) & (noise < 0.08)] = 2

    codes[(rows >= h - h // 16) & (cols >= w - w // 10)] = 4
    return CategoricalGrid(w, h, 0.0, 0.0, config.cell_size, codes, dict(LANDCOVER_LABELS))


def _run_config(config: ScenarioConfig) -> dict:
    return {
        "seed": config.seed,
        "zones": "zones.asc",
        "zone_attributes": "attributes.csv",
        "corridor": "corridor.geojson",
        "roads": "roads.geojson",
        "evcs": "evcs.geojson",
        "dcfc": "dcfc.geojson",
        "substations": "substations.geojson",
        "landcover": "landcover.asc",
        "parking": "parking.geojson",
        "residential": "residential.geojson",
        "environmental": "environmental.geojson",
        "specs": {
            "tnc": "specs/tnc.json",
            "corridor": "specs/corridor.json",
            "rural": "specs/rural.json",
        },
        "thresholds": {"rural_housing_max": 200.0, "corridor_distance_m": ONE_MILE_M},
        "level_method": "quantile",
        "augmentation": True,
        "window_radius": 2,
        "developed_codes": list(DEVELOPED_CODES),
        "output_dir": "out",
    }


def generate(config: ScenarioConfig, out_dir) -> Path:
    """Write a complete input bundle plus a ready-to-run configuration."""
    _check_tnc_guarantee(config)
    rng = XorShift64Star(config.seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cs = config.cell_size
    w_m, h_m = config.width * cs, config.height * cs

    zones = CategoricalGrid(
        config.width, config.height, 0.0, 0.0, cs, _zone_codes(config),
        {z: f"zone {z}" for z in range(1, config.zone_k ** 2 + 1)},
    )
    write_categorical_ascii(zones, out / "zones.asc")

    table = _zone_attributes(config, rng)
    write_zone_attributes(table, list(ATTRIBUTE_COLUMNS), out / "attributes.csv")

    corridor = FeatureSet(
        (Feature(PolyLine(((0.0, 0.0), (w_m, h_m))), {"name": "ev_corridor"}),)
    )
    (out / "corridor.geojson").write_text(serialize_geojson(corridor), encoding="utf-8")

    roads = FeatureSet(
        (
            Feature(PolyLine(((0.0, 0.0), (w_m, h_m))), {"name": "corridor_highway"}),
            Feature(
                PolyLine(((0.0, (7 * config.height // 8 + 0.5) * cs),
                          (w_m, (7 * config.height // 8 + 0.5) * cs))),
                {"name": "crosstown"},
            ),
            Feature(PolyLine(((0.75 * w_m, 0.0), (0.75 * w_m, h_m))), {"name": "bypass"}),
        )
    )
    (out / "roads.geojson").write_text(serialize_geojson(roads), encoding="utf-8")

    points = _point_features(config, rng)
    for name, fs in points.items():
        (out / f"{name}.geojson").write_text(serialize_geojson(fs), encoding="utf-8")

    parking = _parking(config, rng)
    (out / "parking.geojson").write_text(serialize_geojson(parking), encoding="utf-8")
    residential, environmental = _exclusion_areas(config)
    (out / "residential.geojson").write_text(serialize_geojson(residential), encoding="utf-8")
    (out / "environmental.geojson").write_text(serialize_geojson(environmental), encoding="utf-8")

    write_categorical_ascii(_landcover(config, rng), out / "landcover.asc")

    spec_dir = out / "specs"
    spec_dir.mkdir(exist_ok=True)
    for cls, spec in models.CANONICAL_SPECS.items():
        (spec_dir / f"{cls.value}.json").write_text(spec_to_json(spec), encoding="utf-8")

    (out / "run_config.json").write_text(
        json.dumps(_run_config(config), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    return out


def golden_hash(bundle_dir) -> str:
    """Content digest: sorted relative paths, per-file SHA-256, digest of the list."""
    root = Path(bundle_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"not a directory: {root}")
    lines = []
    for path in sorted(root.rglob("*")):
        if path.is_file():
            digest = hashlib.sha256(path.read_bytes()).hexdigest()
            lines.append(f"{path.relative_to(root).as_posix()}:{digest}")
    return hashlib.sha256("\n".join(lines).encode("ascii")).hexdigest()
