"""Typed vector features: a GeoJSON subset and its rasterization.

Supported geometries are Point, LineString (>= 2 vertices) and Polygon with a
single explicitly closed outer ring. Rasterization is alignment-preserving:
outputs always share the template grid's georeferencing.

Cell membership rules, fixed here once:
  * points fall into the cell found by flooring (x - origin) / cell_size;
  * a polyline marks every cell whose closed square it intersects
    (supercover) plus every cell whose center lies within half a cell size
    of a segment;
  * a polygon marks cells whose center is inside by the even-odd rule, with
    a center exactly on an edge counting as inside.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .grids import Grid

Coord = tuple[float, float]


class GeoJSONError(Exception):
    """Raised for input outside the supported GeoJSON subset."""


@dataclass(frozen=True)
class Point:
    x: float
    y: float


@dataclass(frozen=True)
class PolyLine:
    vertices: tuple[Coord, ...]

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise GeoJSONError("polyline needs at least 2 vertices")


@dataclass(frozen=True)
class Polygon:
    """Single outer ring, explicitly closed (first vertex repeated last)."""

    ring: tuple[Coord, ...]

    def __post_init__(self):
        if len(self.ring) < 4:
            raise GeoJSONError("polygon ring needs at least 3 vertices plus closure")
        if self.ring[0] != self.ring[-1]:
            raise GeoJSONError("polygon ring is not closed (first vertex must equal last)")


Geometry = Point | PolyLine | Polygon


@dataclass
class Feature:
    geometry: Geometry
    properties: dict[str, str | float] = field(default_factory=dict)


@dataclass
class FeatureSet:
    features: tuple[Feature, ...]

    def points(self) -> "FeatureSet":
        return FeatureSet(tuple(f for f in self.features if isinstance(f.geometry, Point)))

    def polylines(self) -> "FeatureSet":
        return FeatureSet(tuple(f for f in self.features if isinstance(f.geometry, PolyLine)))

    def polygons(self) -> "FeatureSet":
        return FeatureSet(tuple(f for f in self.features if isinstance(f.geometry, Polygon)))

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self):
        return iter(self.features)


def _check_coord(pair, what: str) -> Coord:
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in pair)
    ):
        raise GeoJSONError(f"{what}: coordinates must be [x, y] numbers")
    x, y = float(pair[0]), float(pair[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise GeoJSONError(f"{what}: coordinates must be finite")
    return (x, y)


def _parse_geometry(geom, idx: int) -> Geometry:
    where = f"feature {idx}"
    if not isinstance(geom, dict) or "type" not in geom:
        raise GeoJSONError(f"{where}: missing geometry")
    gtype = geom["type"]
    coords = geom.get("coordinates")
    if gtype == "Point":
        x, y = _check_coord(coords, where)
        return Point(x, y)
    if gtype == "LineString":
        if not isinstance(coords, list) or len(coords) < 2:
            raise GeoJSONError(f"{where}: LineString needs at least 2 coordinates")
        return PolyLine(tuple(_check_coord(c, where) for c in coords))
    if gtype == "Polygon":
        if not isinstance(coords, list) or len(coords) != 1:
            raise GeoJSONError(f"{where}: Polygon must have exactly one ring")
        ring = tuple(_check_coord(c, where) for c in coords[0])
        if len(ring) < 4 or ring[0] != ring[-1]:
            raise GeoJSONError(f"{where}: polygon ring is not closed")
        return Polygon(ring)
    raise GeoJSONError(f"{where}: unsupported geometry type {gtype!r}")


def parse_geojson_subset(text: str) -> FeatureSet:
    """Parse a FeatureCollection restricted to Point/LineString/Polygon."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GeoJSONError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("type") != "FeatureCollection":
        raise GeoJSONError("top-level object must be a FeatureCollection")
    raw = doc.get("features")
    if not isinstance(raw, list):
        raise GeoJSONError("FeatureCollection must carry a 'features' list")

    features = []
    for idx, item in enumerate(raw):
        if not isinstance(item, dict) or item.get("type") != "Feature":
            raise GeoJSONError(f"feature {idx}: not a Feature object")
        geometry = _parse_geometry(item.get("geometry"), idx)
        props = item.get("properties") or {}
        if not isinstance(props, dict):
            raise GeoJSONError(f"feature {idx}: properties must be an object or null")
        for key, val in props.items():
            if not isinstance(key, str) or type(val) not in (str, int, float):
                raise GeoJSONError(f"feature {idx}: property {key!r} must be a string or number")
        features.append(Feature(geometry, dict(props)))
    return FeatureSet(tuple(features))


def _geometry_json(geom: Geometry) -> dict:
    if isinstance(geom, Point):
        return {"type": "Point", "coordinates": [geom.x, geom.y]}
    if isinstance(geom, PolyLine):
        return {"type": "LineString", "coordinates": [[x, y] for x, y in geom.vertices]}
    return {"type": "Polygon", "coordinates": [[[x, y] for x, y in geom.ring]]}


def serialize_geojson(fs: FeatureSet) -> str:
    """Deterministic FeatureCollection text; parse(serialize(fs)) == fs."""
    doc = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "geometry": _geometry_json(f.geometry), "properties": f.properties}
            for f in fs
        ],
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def rasterize_points(fs: FeatureSet, template: Grid, mode: str = "presence") -> tuple[Grid, int]:
    """Drop point features onto the template grid.

    mode "presence" marks 1.0 where at least one point lands, "count" stores
    the number of points per cell. Returns the grid and the number of points
    skipped for lying outside the template extent.
    """
    if mode not in ("presence", "count"):
        raise ValueError(f"unknown mode {mode!r}")
    counts = np.zeros((template.height, template.width), dtype=np.float64)
    skipped = 0
    for f in fs:
        if not isinstance(f.geometry, Point):
            raise ValueError("rasterize_points requires point features only")
        col, row = template.cell_of(f.geometry.x, f.geometry.y)
        if template.contains_cell(col, row):
            counts[row, col] += 1.0
        else:
            skipped += 1
    if mode == "presence":
        counts = (counts > 0).astype(np.float64)
    return template.with_values(counts), skipped


def _segment_distance(cx: np.ndarray, cy: np.ndarray, p: Coord, q: Coord) -> np.ndarray:
    px, py = p
    dx, dy = q[0] - px, q[1] - py
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0.0:
        return np.hypot(cx - px, cy - py)
    t = np.clip(((cx - px) * dx + (cy - py) * dy) / seg_len2, 0.0, 1.0)
    return np.hypot(cx - (px + t * dx), cy - (py + t * dy))


def _segment_crosses_cells(
    x0: np.ndarray, y0: np.ndarray, cell: float, p: Coord, q: Coord
) -> np.ndarray:
    """Liang-Barsky clip of segment pq against each closed cell square."""
    px, py = p
    dx, dy = q[0] - px, q[1] - py
    tmin = np.zeros_like(x0)
    tmax = np.ones_like(x0)
    ok = np.ones(x0.shape, dtype=bool)
    for d, start, lo, hi in ((dx, px, x0, x0 + cell), (dy, py, y0, y0 + cell)):
        if d == 0.0:
            ok &= (start >= lo) & (start <= hi)
        else:
            t1 = (lo - start) / d
            t2 = (hi - start) / d
            tmin = np.maximum(tmin, np.minimum(t1, t2))
            tmax = np.minimum(tmax, np.maximum(t1, t2))
    return ok & (tmin <= tmax)


def rasterize_polyline(line: PolyLine, template: Grid) -> Grid:
    """Presence mask of a polyline; see module docstring for the marking rule."""
    cs = template.cell_size
    mask = np.zeros((template.height, template.width), dtype=bool)
    cols = np.arange(template.width)
    rows = np.arange(template.height)

    for p, q in zip(line.vertices[:-1], line.vertices[1:]):
        # candidate cells: segment bbox padded by one cell
        xmin, xmax = min(p[0], q[0]), max(p[0], q[0])
        ymin, ymax = min(p[1], q[1]), max(p[1], q[1])
        c0 = max(0, int(math.floor((xmin - template.origin_x) / cs)) - 1)
        c1 = min(template.width - 1, int(math.floor((xmax - template.origin_x) / cs)) + 1)
        r0 = max(0, int(math.floor((ymin - template.origin_y) / cs)) - 1)
        r1 = min(template.height - 1, int(math.floor((ymax - template.origin_y) / cs)) + 1)
        if c0 > c1 or r0 > r1:
            continue
        sub_cols = cols[c0 : c1 + 1]
        sub_rows = rows[r0 : r1 + 1]
        cx = template.origin_x + (sub_cols[None, :] + 0.5) * cs
        cy = template.origin_y + (sub_rows[:, None] + 0.5) * cs
        cx, cy = np.broadcast_arrays(cx, cy)
        near = _segment_distance(cx, cy, p, q) <= cs / 2.0
        crossed = _segment_crosses_cells(cx - cs / 2.0, cy - cs / 2.0, cs, p, q)
        mask[r0 : r1 + 1, c0 : c1 + 1] |= near | crossed

    return template.with_values(mask.astype(np.float64))


def rasterize_polygon(poly: Polygon, template: Grid) -> Grid:
    """Even-odd scanline fill over cell centers; on-edge centers are inside."""
    w, h, cs = template.width, template.height, template.cell_size
    inside = np.zeros((h, w), dtype=bool)
    xs = template.origin_x + (np.arange(w) + 0.5) * cs

    edges = list(zip(poly.ring[:-1], poly.ring[1:]))
    for r in range(h):
        yc = template.origin_y + (r + 0.5) * cs
        crossings = []
        for (x1, y1), (x2, y2) in edges:
            if (y1 > yc) != (y2 > yc):
                crossings.append(x1 + (yc - y1) * (x2 - x1) / (y2 - y1))
        if crossings:
            cr = np.asarray(crossings)
            inside[r, :] = (cr[None, :] > xs[:, None]).sum(axis=1) % 2 == 1

    # tie rule: a center exactly on any edge counts as inside
    cxg = np.broadcast_to(xs[None, :], (h, w))
    cyg = template.origin_y + (np.arange(h)[:, None] + 0.5) * cs
    cyg = np.broadcast_to(cyg, (h, w))
    for (x1, y1), (x2, y2) in edges:
        cross = (x2 - x1) * (cyg - y1) - (y2 - y1) * (cxg - x1)
        in_bbox = (
            (cxg >= min(x1, x2))
            & (cxg <= max(x1, x2))
            & (cyg >= min(y1, y2))
            & (cyg <= max(y1, y2))
        )
        inside |= (cross == 0.0) & in_bbox

    return template.with_values(inside.astype(np.float64))
