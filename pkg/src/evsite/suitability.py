"""Region classification, weighted overlay, level assignment, and synthesis.

The study area is split into three region classes; each class gets its own
declarative criteria model (a SuitabilitySpec), producing a composite score
per cell that is bucketed into four suitability levels (1 = most suitable).
Per-region level rasters are then mosaicked back together, and an optional
parking-candidate augmentation adds one more criterion to every model.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass

import numpy as np

from .features import Feature, FeatureSet, Point
from .grids import CategoricalGrid, Grid
from .transforms import Direction, ZoneSet, density_layer, quantile_normalize

ONE_MILE_M = 1609.344

LEVEL_LABELS = {1: "most suitable", 2: "suitable", 3: "less suitable", 4: "least suitable"}


class RegionClass(enum.Enum):
    TNC = "tnc"
    CORRIDOR = "corridor"
    RURAL = "rural"


REGION_CODES = {RegionClass.TNC: 1, RegionClass.CORRIDOR: 2, RegionClass.RURAL: 3}
REGION_BY_CODE = {code: cls for cls, code in REGION_CODES.items()}
REGION_LABELS = {code: cls.value for cls, code in REGION_CODES.items()}


@dataclass(frozen=True)
class Criterion:
    name: str
    layer: str
    direction: Direction
    weight: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.weight) and self.weight > 0):
            raise ValueError(f"criterion {self.name!r}: weight must be finite and positive")


@dataclass(frozen=True)
class SuitabilitySpec:
    region: RegionClass
    criteria: tuple[Criterion, ...]

    def __post_init__(self):
        if not self.criteria:
            raise ValueError("a suitability model needs at least one criterion")
        names = [c.name for c in self.criteria]
        if len(set(names)) != len(names):
            raise ValueError("criterion names must be unique within a model")

    def with_criterion(self, criterion: Criterion) -> "SuitabilitySpec":
        return SuitabilitySpec(self.region, (*self.criteria, criterion))


def spec_from_json(text: str) -> SuitabilitySpec:
    doc = json.loads(text)
    region = RegionClass(doc["region"])
    criteria = tuple(
        Criterion(c["name"], c["layer"], Direction(c["direction"]), float(c.get("weight", 1.0)))
        for c in doc["criteria"]
    )
    return SuitabilitySpec(region, criteria)


def spec_to_json(spec: SuitabilitySpec) -> str:
    doc = {
        "region": spec.region.value,
        "criteria": [
            {"name": c.name, "layer": c.layer, "direction": c.direction.value, "weight": c.weight}
            for c in spec.criteria
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def classify_regions(
    zones: ZoneSet,
    corridor_distance: Grid,
    rural_housing_max: float = 200.0,
    corridor_distance_m: float = ONE_MILE_M,
) -> tuple[dict[int, RegionClass], CategoricalGrid]:
    """Assign each zone exactly one region class and paint the class raster.

    Rule order (thresholds inclusive): rural when housing density is at or
    below rural_housing_max; otherwise corridor when the zone's minimum
    corridor distance is within corridor_distance_m; everything else is TNC.
    A zone with attributes but no raster cells has no corridor distance and
    falls through to TNC unless it is rural.
    """
    zgrid = zones.zones
    if not zgrid.aligned_with(corridor_distance):
        raise ValueError("corridor distance grid is not aligned with the zone raster")
    housing = zones.column("housing_units_per_sqmi")

    codes = zgrid.codes
    min_dist = np.full(codes.max() + 1, np.inf)
    np.minimum.at(min_dist, codes.ravel(), corridor_distance.values.ravel())

    assignment: dict[int, RegionClass] = {}
    for zone_id in zones.zone_ids():
        if housing[zone_id] <= rural_housing_max:
            assignment[zone_id] = RegionClass.RURAL
        elif zone_id <= codes.max() and min_dist[zone_id] <= corridor_distance_m:
            assignment[zone_id] = RegionClass.CORRIDOR
        else:
            assignment[zone_id] = RegionClass.TNC

    lut = np.zeros(codes.max() + 1, dtype=np.int64)
    for zone_id, cls in assignment.items():
        if zone_id <= codes.max():
            lut[zone_id] = REGION_CODES[cls]
    region_codes = lut[codes]
    region_raster = CategoricalGrid(
        zgrid.width,
        zgrid.height,
        zgrid.origin_x,
        zgrid.origin_y,
        zgrid.cell_size,
        region_codes,
        dict(REGION_LABELS),
    )
    return assignment, region_raster


def region_mask(region_raster: CategoricalGrid, cls: RegionClass, nodata: float = -9999.0) -> Grid:
    """0/1 mask of the cells belonging to one region class."""
    vals = (region_raster.codes == REGION_CODES[cls]).astype(np.float64)
    return Grid(
        region_raster.width,
        region_raster.height,
        region_raster.origin_x,
        region_raster.origin_y,
        region_raster.cell_size,
        nodata,
        vals,
    )


def overlay(spec: SuitabilitySpec, layers: dict[str, Grid], mask: Grid) -> Grid:
    """Weighted mean of the (already normalized) criterion layers.

    composite = sum_i w_i * s_i / sum_i w_i on cells inside the mask where
    every criterion is valid; nodata elsewhere.
    """
    valid = mask.values == 1.0
    acc = np.zeros_like(mask.values)
    total_weight = 0.0
    for crit in spec.criteria:
        if crit.layer not in layers:
            raise ValueError(f"criterion {crit.name!r}: layer {crit.layer!r} not provided")
        layer = layers[crit.layer]
        if not layer.aligned_with(mask):
            raise ValueError(f"criterion {crit.name!r}: layer {crit.layer!r} not aligned")
        layer_valid = layer.valid_mask()
        valid &= layer_valid
        acc += np.where(layer_valid, layer.values, 0.0) * crit.weight
        total_weight += crit.weight
    composite = np.where(valid, acc / total_weight, mask.nodata)
    return mask.with_values(composite)


def levelize(composite: Grid, method: str = "quantile") -> CategoricalGrid:
    """Bucket the composite into levels 1 (most suitable) to 4 (least).

    "quantile" assigns equal-count buckets over the valid cells, ranking by
    score descending with row-major cell index as the tie break; "interval"
    cuts [0, 1] at 0.75 / 0.5 / 0.25 (upper edge inclusive). Cells outside
    the composite stay 0.
    """
    valid = composite.valid_mask()
    n = int(valid.sum())
    if n < 4:
        raise ValueError(f"levelize needs at least 4 valid cells, got {n}")

    codes = np.zeros(composite.values.shape, dtype=np.int64)
    if method == "quantile":
        flat_idx = np.flatnonzero(valid.ravel())
        scores = composite.values.ravel()[flat_idx]
        order = np.lexsort((flat_idx, -scores))
        remaining = n
        start = 0
        for level, divisor in ((1, 4), (2, 3), (3, 2), (4, 1)):
            take = math.ceil(remaining / divisor)
            chosen = flat_idx[order[start : start + take]]
            codes.ravel()[chosen] = level
            start += take
            remaining -= take
    elif method == "interval":
        s = composite.values
        level = np.where(s > 0.75, 1, np.where(s > 0.5, 2, np.where(s > 0.25, 3, 4)))
        codes = np.where(valid, level, 0).astype(np.int64)
    else:
        raise ValueError(f"unknown level method {method!r}")

    return CategoricalGrid(
        composite.width,
        composite.height,
        composite.origin_x,
        composite.origin_y,
        composite.cell_size,
        codes,
        dict(LEVEL_LABELS),
    )


def synthesize(
    levels_by_region: dict[RegionClass, CategoricalGrid], region_raster: CategoricalGrid
) -> CategoricalGrid:
    """Mosaic the per-region level rasters along the region-class raster."""
    out = np.zeros(region_raster.codes.shape, dtype=np.int64)
    for code, cls in REGION_BY_CODE.items():
        cells = region_raster.codes == code
        if not cells.any():
            continue
        if cls not in levels_by_region:
            raise ValueError(f"no level model supplied for region {cls.value!r}")
        model = levels_by_region[cls]
        if not model.aligned_with(region_raster):
            raise ValueError(f"level raster for region {cls.value!r} not aligned")
        out[cells] = model.codes[cells]
    return CategoricalGrid(
        region_raster.width,
        region_raster.height,
        region_raster.origin_x,
        region_raster.origin_y,
        region_raster.cell_size,
        out,
        dict(LEVEL_LABELS),
    )


def augment_with_parking(
    spec: SuitabilitySpec,
    parking_mask: Grid,
    residential_mask: Grid,
    environmental_mask: Grid,
    window_radius: int = 2,
) -> tuple[SuitabilitySpec, Grid, Grid]:
    """Fold parking-parcel candidates into a model as one extra criterion.

    Parking cells inside residential areas or environmental amenities are
    excluded. Returns (augmented spec, candidate mask, normalized availability
    layer); the layer must be registered under the name "parking_availability"
    for the augmented overlay run.
    """
    for other in (residential_mask, environmental_mask):
        if not parking_mask.aligned_with(other):
            raise ValueError("augmentation masks are not aligned")
    candidate = (
        (parking_mask.values == 1.0)
        & (residential_mask.values != 1.0)
        & (environmental_mask.values != 1.0)
    )
    candidate_mask = parking_mask.with_values(candidate.astype(np.float64))
    availability = quantile_normalize(
        density_layer(candidate_mask, window_radius), Direction.HIGHER_BETTER
    )
    augmented = spec.with_criterion(
        Criterion("parking_availability", "parking_availability", Direction.HIGHER_BETTER, 1.0)
    )
    return augmented, candidate_mask, availability


def extract_candidate_sites(
    levels: CategoricalGrid, candidate_mask: Grid, zones: CategoricalGrid
) -> FeatureSet:
    """Cell-center points where the level is 1 and the cell is a candidate."""
    if not levels.aligned_with(candidate_mask) or not levels.aligned_with(zones):
        raise ValueError("levels, candidate mask and zones must be aligned")
    hits = (levels.codes == 1) & (candidate_mask.values == 1.0)
    features = []
    for row, col in np.argwhere(hits):
        x = levels.origin_x + (col + 0.5) * levels.cell_size
        y = levels.origin_y + (row + 0.5) * levels.cell_size
        features.append(
            Feature(Point(x, y), {"level": 1, "zone_id": int(zones.codes[row, col])})
        )
    return FeatureSet(tuple(features))
