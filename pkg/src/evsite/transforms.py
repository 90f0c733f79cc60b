"""Preprocessing kernels that turn raw layers into criterion rasters.

Includes the exact two-pass Euclidean distance transform, rank-based quantile
normalization onto (0, 1), zone-attribute painting, and windowed land-cover
fractions. All functions are pure and alignment-preserving.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .grids import CategoricalGrid, Grid


class EmptyFeatureSetError(Exception):
    """Distance transform over a mask with no feature cells."""


class Direction(enum.Enum):
    """Criterion polarity: larger raw values score higher, or smaller do."""

    HIGHER_BETTER = "higher"
    NEARER_BETTER = "nearer"


# columns constrained to [0, 1]
_PCT_COLUMNS = ("pct_hispanic_black", "pct_below_poverty", "pct_multifamily", "pct_zero_vehicle")


@dataclass
class ZoneSet:
    """Block-group zone raster plus its attribute table (zone id -> columns)."""

    zones: CategoricalGrid
    attributes: dict[int, dict[str, float]]

    def __post_init__(self):
        present = set(np.unique(self.zones.codes).tolist()) - {0}
        missing = present - set(self.attributes)
        if missing:
            raise ValueError(f"zones without attribute rows: {sorted(missing)}")
        for zone_id, row in self.attributes.items():
            for col in _PCT_COLUMNS:
                if col in row and not (0.0 <= row[col] <= 1.0):
                    raise ValueError(f"zone {zone_id}: {col}={row[col]} outside [0, 1]")
            if "dac_flag" in row and row["dac_flag"] not in (0.0, 1.0):
                raise ValueError(f"zone {zone_id}: dac_flag must be 0 or 1")
            if "housing_units_per_sqmi" in row and row["housing_units_per_sqmi"] < 0:
                raise ValueError(f"zone {zone_id}: housing_units_per_sqmi must be >= 0")

    def zone_ids(self) -> list[int]:
        return sorted(self.attributes)

    def column(self, name: str) -> dict[int, float]:
        out = {}
        for zone_id, row in self.attributes.items():
            if name not in row:
                raise KeyError(f"attribute column {name!r} missing for zone {zone_id}")
            out[zone_id] = row[name]
        return out


def read_zone_attributes(path) -> dict[int, dict[str, float]]:
    """CSV with a header row; first column is the block-group id."""
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty attribute table") from None
        columns = header[1:]
        table: dict[int, dict[str, float]] = {}
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            if len(rec) != len(header):
                raise ValueError(f"{path}, line {lineno}: expected {len(header)} fields, got {len(rec)}")
            try:
                zone_id = int(rec[0])
                table[zone_id] = {c: float(v) for c, v in zip(columns, rec[1:])}
            except ValueError as exc:
                raise ValueError(f"{path}, line {lineno}: {exc}") from None
    return table


def write_zone_attributes(table: dict[int, dict[str, float]], columns: list[str], path) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["zone_id", *columns])
        for zone_id in sorted(table):
            writer.writerow([zone_id, *("%.9g" % table[zone_id][c] for c in columns)])


def _nearest_feature_sq_rows(feature: np.ndarray, big: float) -> np.ndarray:
    """Per column: squared row distance to the nearest feature cell in that column."""
    h, w = feature.shape
    dist = np.full((h, w), np.inf)
    run = np.full(w, np.inf)
    for r in range(h):
        run = np.where(feature[r], 0.0, run + 1.0)
        dist[r] = run
    run = np.full(w, np.inf)
    for r in range(h - 1, -1, -1):
        run = np.where(feature[r], 0.0, run + 1.0)
        dist[r] = np.minimum(dist[r], run)
    sq = dist * dist
    sq[~np.isfinite(sq)] = big
    return sq


def _lower_envelope_sq(f: np.ndarray) -> np.ndarray:
    """1D squared-distance transform: d[q] = min_p (f[p] + (q - p)^2).

    Lower envelope of parabolas; f must be finite.
    """
    n = f.size
    d = np.empty(n)
    v = np.zeros(n, dtype=np.intp)
    z = np.empty(n + 1)
    z[0], z[1] = -math.inf, math.inf
    k = 0
    for q in range(1, n):
        s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        while s <= z[k]:
            k -= 1
            s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) / (2.0 * q - 2.0 * v[k])
        k += 1
        v[k] = q
        z[k] = s
        z[k + 1] = math.inf
    k = 0
    for q in range(n):
        while z[k + 1] < q:
            k += 1
        d[q] = (q - v[k]) ** 2 + f[v[k]]
    return d


def distance_transform(mask: Grid, cell_size: float | None = None) -> Grid:
    """Exact Euclidean distance (center to center) to the nearest mask cell.

    Cells holding exactly 1.0 are features and map to 0; every other cell gets
    cell_size times the exact Euclidean distance, computed with the separable
    two-pass parabola method (no chamfer approximation). The output reuses the
    mask's georeferencing and nodata sentinel but contains no nodata cells.
    """
    if cell_size is None:
        cell_size = mask.cell_size
    feature = mask.values == 1.0
    if not feature.any():
        raise EmptyFeatureSetError("distance transform needs at least one feature cell")

    h, w = feature.shape
    big = float(h * h + w * w + 1)  # exceeds any real squared cell distance
    col_sq = _nearest_feature_sq_rows(feature, big)
    out = np.empty_like(col_sq)
    for r in range(h):
        out[r] = _lower_envelope_sq(col_sq[r])
    return mask.with_values(np.sqrt(out) * cell_size)


def quantile_normalize(layer: Grid, direction: Direction) -> Grid:
    """Map valid cells to (0, 1) by rank: score = (rank - 0.5) / n.

    Ties receive average ranks, so equal inputs score equally and the result
    depends on value order only. NEARER_BETTER reflects the score to 1 - s.
    Nodata cells stay nodata.
    """
    valid = layer.valid_mask()
    n = int(valid.sum())
    if n == 0:
        raise ValueError("quantile_normalize: layer has no valid cells")
    ranks = rankdata(layer.values[valid], method="average")
    scores = (ranks - 0.5) / n
    if direction is Direction.NEARER_BETTER:
        scores = 1.0 - scores
    out = np.full(layer.values.shape, layer.nodata)
    out[valid] = scores
    return layer.with_values(out)


def paint_attribute(zones: ZoneSet, column: str, template: Grid) -> Grid:
    """Spread a zone attribute across the raster; zone code 0 becomes nodata."""
    if not zones.zones.aligned_with(template):
        raise ValueError("zone raster is not aligned with the template grid")
    values = zones.column(column)  # raises KeyError if the column is missing
    codes = zones.zones.codes
    lut = np.full(codes.max() + 1, template.nodata)
    for zone_id, v in values.items():
        if 0 <= zone_id <= codes.max():
            lut[zone_id] = v
    painted = lut[codes]
    painted[codes == 0] = template.nodata
    return template.with_values(painted)


def _window_sums(a: np.ndarray, radius: int) -> np.ndarray:
    """Sum of a over the (2r+1)^2 window around each cell, clipped at borders."""
    h, w = a.shape
    sat = np.zeros((h + 1, w + 1))
    sat[1:, 1:] = a.cumsum(axis=0).cumsum(axis=1)
    r0 = np.clip(np.arange(h) - radius, 0, h)
    r1 = np.clip(np.arange(h) + radius + 1, 0, h)
    c0 = np.clip(np.arange(w) - radius, 0, w)
    c1 = np.clip(np.arange(w) + radius + 1, 0, w)
    return (
        sat[np.ix_(r1, c1)] - sat[np.ix_(r0, c1)] - sat[np.ix_(r1, c0)] + sat[np.ix_(r0, c0)]
    )


def landcover_fractions(
    landcover: CategoricalGrid,
    developed_codes: set[int],
    window_radius: int = 2,
    nodata: float = -9999.0,
) -> tuple[Grid, Grid]:
    """Windowed developed / underdeveloped fractions of the land-cover raster.

    For each cell, developed = share of classified (nonzero-code) cells in the
    (2r+1)^2 neighborhood whose code is in developed_codes; underdeveloped is
    its complement. Windows with no classified cell come out as nodata.
    """
    if window_radius < 0:
        raise ValueError("window_radius must be >= 0")
    codes = landcover.codes
    valid = (codes != 0).astype(np.float64)
    dev = (valid.astype(bool) & np.isin(codes, sorted(developed_codes))).astype(np.float64)
    valid_n = _window_sums(valid, window_radius)
    dev_n = _window_sums(dev, window_radius)

    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(valid_n > 0, dev_n / np.maximum(valid_n, 1e-300), nodata)
    under = np.where(valid_n > 0, 1.0 - frac, nodata)
    geo = (landcover.width, landcover.height, landcover.origin_x, landcover.origin_y, landcover.cell_size)
    return (
        Grid(*geo, nodata, frac),
        Grid(*geo, nodata, under),
    )


def density_layer(mask: Grid, window_radius: int = 2) -> Grid:
    """Fraction of cells in the square window that are set in the mask.

    The denominator is the number of in-bounds window cells, so the output is
    defined (and in [0, 1]) everywhere.
    """
    ones = np.ones_like(mask.values)
    hits = _window_sums((mask.values == 1.0).astype(np.float64), window_radius)
    total = _window_sums(ones, window_radius)
    return mask.with_values(hits / total)
