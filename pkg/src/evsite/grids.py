"""Single-band raster model and its serialization.

A Grid stores real values row-major with row 0 at the south edge, which keeps
georeferencing arithmetic uniform (the ASCII format anchors at the lower-left
corner). Rendering and ASCII text flip vertically so the first emitted row is
the north edge. Grids are immutable after construction: the value buffers are
marked read-only, so they can be shared across threads freely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Serialization precision: 9 significant digits. One write/read round-trip
# snaps values onto this lattice; after that, round-trips are exact.
_FMT = "%.9g"

HEADER_KEYS = ("ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value")


class GridParseError(Exception):
    """Raised for malformed ASCII grid input; carries 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class PaletteError(Exception):
    """Raised when a render palette does not cover a code present in the data."""


@dataclass(frozen=True)
class Grid:
    """Georeferenced single-band raster of reals with a nodata sentinel.

    values has shape (height, width), row 0 = southmost row. Every stored
    value is finite or exactly equal to the nodata sentinel.
    """

    width: int
    height: int
    origin_x: float
    origin_y: float
    cell_size: float
    nodata: float
    values: np.ndarray = field(compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be at least 1x1")
        if not (self.cell_size > 0):
            raise ValueError("cell_size must be positive")
        if not math.isfinite(self.nodata):
            raise ValueError("nodata sentinel must be finite")
        arr = np.asarray(self.values, dtype=np.float64).reshape(self.height, self.width)
        bad = ~np.isfinite(arr) & ~(arr == self.nodata)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise ValueError(f"non-finite value at row {r}, col {c}")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    def aligned_with(self, other: "Grid | CategoricalGrid") -> bool:
        return (
            self.width == other.width
            and self.height == other.height
            and self.origin_x == other.origin_x
            and self.origin_y == other.origin_y
            and self.cell_size == other.cell_size
        )

    def valid_mask(self) -> np.ndarray:
        return self.values != self.nodata

    def with_values(self, values: np.ndarray, nodata: float | None = None) -> "Grid":
        """New grid sharing this grid's georeferencing."""
        return Grid(
            self.width,
            self.height,
            self.origin_x,
            self.origin_y,
            self.cell_size,
            self.nodata if nodata is None else nodata,
            values,
        )

    def cell_center(self, col: int, row: int) -> tuple[float, float]:
        return (
            self.origin_x + (col + 0.5) * self.cell_size,
            self.origin_y + (row + 0.5) * self.cell_size,
        )

    def cell_of(self, x: float, y: float) -> tuple[int, int]:
        """(col, row) of the cell containing (x, y); may be out of bounds."""
        return (
            int(math.floor((x - self.origin_x) / self.cell_size)),
            int(math.floor((y - self.origin_y) / self.cell_size)),
        )

    def contains_cell(self, col: int, row: int) -> bool:
        return 0 <= col < self.width and 0 <= row < self.height

    def __eq__(self, other) -> bool:
        if not isinstance(other, Grid):
            return NotImplemented
        return (
            self.aligned_with(other)
            and self.nodata == other.nodata
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.width, self.height, self.origin_x, self.origin_y, self.cell_size))


@dataclass(frozen=True)
class CategoricalGrid:
    """Raster of non-negative integer codes; code 0 is reserved for "no class".

    Every nonzero code present in the raster must appear in the code table
    (code -> label). Same georeferencing rules as Grid.
    """

    width: int
    height: int
    origin_x: float
    origin_y: float
    cell_size: float
    codes: np.ndarray = field(compare=False)
    labels: dict[int, str] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("grid dimensions must be at least 1x1")
        if not (self.cell_size > 0):
            raise ValueError("cell_size must be positive")
        arr = np.asarray(self.codes, dtype=np.int64).reshape(self.height, self.width)
        if (arr < 0).any():
            raise ValueError("codes must be non-negative")
        present = set(np.unique(arr).tolist()) - {0}
        missing = present - set(self.labels)
        if missing:
            raise ValueError(f"codes missing from code table: {sorted(missing)}")
        if 0 in self.labels:
            raise ValueError("code 0 is reserved for 'no class'")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "codes", arr)

    aligned_with = Grid.aligned_with

    def __eq__(self, other) -> bool:
        if not isinstance(other, CategoricalGrid):
            return NotImplemented
        return (
            self.aligned_with(other)
            and np.array_equal(self.codes, other.codes)
            and self.labels == other.labels
        )

    def __hash__(self):
        return hash((self.width, self.height, self.origin_x, self.origin_y, self.cell_size))

    def to_grid(self, nodata: float = -9999.0) -> Grid:
        """Codes as reals; code 0 becomes nodata."""
        vals = self.codes.astype(np.float64)
        vals[self.codes == 0] = nodata
        return Grid(self.width, self.height, self.origin_x, self.origin_y, self.cell_size, nodata, vals)


def categorical_from_grid(grid: Grid, labels: dict[int, str] | None = None) -> CategoricalGrid:
    """Read integer codes out of a real grid; nodata cells become code 0.

    Raises ValueError when a valid cell holds a non-integral or negative value.
    """
    vals = grid.values
    valid = grid.valid_mask()
    rounded = np.rint(vals)
    if not np.array_equal(vals[valid], rounded[valid]) or (rounded[valid] < 0).any():
        raise ValueError("grid holds non-integral or negative values; cannot treat as categorical")
    codes = np.where(valid, rounded, 0.0).astype(np.int64)
    if labels is None:
        labels = {int(c): str(int(c)) for c in np.unique(codes) if c != 0}
    return CategoricalGrid(
        grid.width, grid.height, grid.origin_x, grid.origin_y, grid.cell_size, codes, labels
    )


def _format(v: float) -> str:
    return _FMT % v


def _parse_number(token: str, line: int, column: int) -> float:
    try:
        v = float(token)
    except ValueError:
        raise GridParseError(f"non-numeric token {token!r}", line, column) from None
    if not math.isfinite(v):
        raise GridParseError(f"non-finite value {token!r}", line, column)
    return v


def read_ascii_grid(path) -> Grid:
    """Parse an ESRI ASCII grid file.

    The header must carry ncols, nrows, xllcorner, yllcorner, cellsize and
    nodata_value in that order (keys case-insensitive); the body holds nrows
    lines of ncols numbers, north row first. Malformed input raises
    GridParseError naming the offending line and column.
    """
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()

    header: dict[str, float] = {}
    for i, key in enumerate(HEADER_KEYS):
        if i >= len(lines):
            raise GridParseError(f"missing header line for {key!r}", i + 1, 1)
        parts = lines[i].split()
        if len(parts) != 2:
            raise GridParseError("header line must be '<key> <value>'", i + 1, 1)
        if parts[0].lower() != key:
            raise GridParseError(f"expected header key {key!r}, got {parts[0]!r}", i + 1, 1)
        header[key] = _parse_number(parts[1], i + 1, 2)

    ncols, nrows = header["ncols"], header["nrows"]
    if ncols != int(ncols) or nrows != int(nrows) or ncols < 1 or nrows < 1:
        raise GridParseError("ncols/nrows must be positive integers", 1, 2)
    ncols, nrows = int(ncols), int(nrows)
    nodata = header["nodata_value"]

    body = lines[len(HEADER_KEYS):]
    values = np.empty((nrows, ncols), dtype=np.float64)
    for r in range(nrows):
        line_no = len(HEADER_KEYS) + r + 1
        if r >= len(body):
            raise GridParseError("missing data row", line_no, 1)
        tokens = body[r].split()
        if len(tokens) != ncols:
            raise GridParseError(
                f"expected {ncols} values, got {len(tokens)}", line_no, len(tokens) + 1
            )
        # file rows run north to south; storage row 0 is the south edge
        row_vals = [_parse_number(t, line_no, c + 1) for c, t in enumerate(tokens)]
        values[nrows - 1 - r, :] = row_vals

    for extra_idx in range(nrows, len(body)):
        if body[extra_idx].strip():
            raise GridParseError("unexpected content after data rows", len(HEADER_KEYS) + extra_idx + 1, 1)

    return Grid(ncols, nrows, header["xllcorner"], header["yllcorner"], header["cellsize"], nodata, values)


def write_ascii_grid(grid: Grid, path) -> None:
    """Write a Grid as an ESRI ASCII file readable by read_ascii_grid."""
    out = [
        f"ncols {grid.width}",
        f"nrows {grid.height}",
        f"xllcorner {_format(grid.origin_x)}",
        f"yllcorner {_format(grid.origin_y)}",
        f"cellsize {_format(grid.cell_size)}",
        f"nodata_value {_format(grid.nodata)}",
    ]
    for r in range(grid.height - 1, -1, -1):
        out.append(" ".join(_format(v) for v in grid.values[r]))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def write_categorical_ascii(cat: CategoricalGrid, path, nodata: float = -9999.0) -> None:
    write_ascii_grid(cat.to_grid(nodata), path)


RGB = tuple[int, int, int]


def render_colormap(
    layer: Grid | CategoricalGrid,
    palette: dict[int, RGB],
    path,
    background: RGB = (255, 255, 255),
) -> None:
    """Render a raster to a binary PPM (P6), one pixel per cell, north row first.

    Grid values must be whole numbers; each valid value (or categorical code)
    is looked up in the palette, nodata / code 0 maps to the background color.
    A value without a palette entry raises PaletteError naming it.
    """
    if isinstance(layer, CategoricalGrid):
        codes = layer.codes
        valid = codes != 0
    else:
        valid = layer.valid_mask()
        vals = layer.values
        rounded = np.rint(vals)
        if not np.array_equal(vals[valid], rounded[valid]):
            offending = vals[valid][vals[valid] != rounded[valid]][0]
            raise PaletteError(f"no palette entry for non-integral value {offending}")
        codes = np.where(valid, rounded, 0.0).astype(np.int64)

    present = set(np.unique(codes[valid]).tolist()) if valid.any() else set()
    missing = present - set(palette)
    if missing:
        raise PaletteError(f"no palette entry for code {sorted(missing)[0]}")

    lut = np.zeros((max(present, default=0) + 1, 3), dtype=np.uint8)
    lut[0] = background
    for code, rgb in palette.items():
        if 0 < code < lut.shape[0]:  # code 0 / nodata always renders as background
            lut[code] = rgb
    flat = np.where(valid, codes, 0)
    pixels = lut[flat[::-1, :]]  # flip so the first pixel row is the north edge

    with open(path, "wb") as fh:
        fh.write(f"P6\n{layer.width} {layer.height}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
