import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from evsite.grids import (
    CategoricalGrid,
    Grid,
    GridParseError,
    PaletteError,
    categorical_from_grid,
    read_ascii_grid,
    render_colormap,
    write_ascii_grid,
    write_categorical_ascii,
)
from evsite.images import read_ppm

from gridgen import make_grid


class TestGridType:
    def test_rejects_bad_dimensions(self):
        with pytest.raises(ValueError):
            Grid(0, 3, 0.0, 0.0, 1.0, -9999.0, np.zeros((3, 0)))

    def test_rejects_nonfinite_values(self):
        vals = np.zeros((2, 2))
        vals[0, 0] = np.nan
        with pytest.raises(ValueError):
            make_grid(vals)

    def test_rejects_nonfinite_nodata(self):
        with pytest.raises(ValueError):
            Grid(2, 2, 0.0, 0.0, 1.0, float("inf"), np.zeros((2, 2)))

    def test_values_are_immutable(self):
        g = make_grid(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            g.values[0, 0] = 1.0

    def test_cell_center_and_inverse(self):
        g = make_grid(np.zeros((4, 5)), cell_size=10.0, origin=(100.0, 200.0))
        assert g.cell_center(0, 0) == (105.0, 205.0)
        assert g.cell_center(4, 3) == (145.0, 235.0)
        assert g.cell_of(105.0, 205.0) == (0, 0)
        assert g.cell_of(149.9, 239.9) == (4, 3)

    def test_valid_mask(self):
        g = make_grid([[1.0, -9999.0], [3.0, 4.0]])
        assert g.valid_mask().tolist() == [[True, False], [True, True]]

    def test_alignment(self):
        a = make_grid(np.zeros((2, 3)))
        b = make_grid(np.ones((2, 3)))
        c = make_grid(np.zeros((2, 3)), cell_size=11.0)
        assert a.aligned_with(b)
        assert not a.aligned_with(c)


class TestAsciiRoundTrip:
    def test_simple_round_trip(self, tmp_path):
        g = make_grid([[1.5, 2.25], [-9999.0, 0.125]], cell_size=30.0, origin=(5.0, -7.5))
        p = tmp_path / "g.asc"
        write_ascii_grid(g, p)
        back = read_ascii_grid(p)
        assert back == g
        assert np.array_equal(back.values, g.values)

    def test_north_row_is_written_first(self, tmp_path):
        # storage row 0 is the south edge, so it must land on the last body line
        g = make_grid([[1.0, 2.0], [3.0, 4.0]])
        p = tmp_path / "g.asc"
        write_ascii_grid(g, p)
        body = p.read_text().splitlines()[6:]
        assert body == ["3 4", "1 2"]

    def test_header_keys_case_insensitive(self, tmp_path):
        p = tmp_path / "g.asc"
        p.write_text(
            "NCOLS 2\nNROWS 1\nXLLCORNER 0\nYLLCORNER 0\nCELLSIZE 1\nNODATA_VALUE -1\n5 6\n"
        )
        g = read_ascii_grid(p)
        assert g.width == 2 and g.values.tolist() == [[5.0, 6.0]]

    def test_write_read_write_is_stable(self, tmp_path):
        # one serialization may round to 9 significant digits; after that
        # the representation must be a fixed point
        vals = np.array([[np.pi, np.e], [1 / 3, 2 / 7]])
        g = make_grid(vals)
        p1, p2 = tmp_path / "a.asc", tmp_path / "b.asc"
        write_ascii_grid(g, p1)
        once = read_ascii_grid(p1)
        write_ascii_grid(once, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert read_ascii_grid(p2) == once

    @settings(max_examples=30, deadline=None)
    @given(
        values=hnp.arrays(
            np.float64,
            st.tuples(st.integers(1, 6), st.integers(1, 6)),
            elements=st.floats(-1e6, 1e6, allow_nan=False, width=32),
        )
    )
    def test_round_trip_property(self, tmp_path_factory, values):
        tmp = tmp_path_factory.mktemp("grids")
        g = make_grid(values)
        p = tmp / "g.asc"
        write_ascii_grid(g, p)
        once = read_ascii_grid(p)
        p2 = tmp / "g2.asc"
        write_ascii_grid(once, p2)
        assert read_ascii_grid(p2) == once
        assert p.read_bytes() == p2.read_bytes()


class TestAsciiErrors:
    def _write(self, tmp_path, text):
        p = tmp_path / "bad.asc"
        p.write_text(text)
        return p

    def test_missing_header_line(self, tmp_path):
        p = self._write(tmp_path, "ncols 2\nnrows 1\n")
        with pytest.raises(GridParseError) as err:
            read_ascii_grid(p)
        assert err.value.line == 3

    def test_wrong_header_key(self, tmp_path):
        p = self._write(
            tmp_path, "ncols 2\nnrows 1\nbogus 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n1 2\n"
        )
        with pytest.raises(GridParseError, match="xllcorner"):
            read_ascii_grid(p)

    def test_non_numeric_cell_names_line_and_column(self, tmp_path):
        p = self._write(
            tmp_path,
            "ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n1 oops 3\n",
        )
        with pytest.raises(GridParseError) as err:
            read_ascii_grid(p)
        assert err.value.line == 7
        assert err.value.column == 2

    def test_short_row(self, tmp_path):
        p = self._write(
            tmp_path,
            "ncols 3\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n1 2\n",
        )
        with pytest.raises(GridParseError, match="expected 3 values"):
            read_ascii_grid(p)

    def test_extra_content(self, tmp_path):
        p = self._write(
            tmp_path,
            "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\n1\n2\n",
        )
        with pytest.raises(GridParseError, match="unexpected content"):
            read_ascii_grid(p)

    def test_non_finite_value(self, tmp_path):
        p = self._write(
            tmp_path,
            "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nnodata_value -1\nnan\n",
        )
        with pytest.raises(GridParseError, match="non-finite"):
            read_ascii_grid(p)


class TestCategorical:
    def test_requires_labels_for_present_codes(self):
        with pytest.raises(ValueError, match="code table"):
            CategoricalGrid(2, 1, 0.0, 0.0, 1.0, np.array([[1, 2]]), {1: "a"})

    def test_code_zero_reserved(self):
        with pytest.raises(ValueError, match="reserved"):
            CategoricalGrid(1, 1, 0.0, 0.0, 1.0, np.array([[0]]), {0: "nope"})

    def test_from_grid_maps_nodata_to_zero(self):
        g = make_grid([[1.0, -9999.0], [2.0, 1.0]])
        cat = categorical_from_grid(g, {1: "one", 2: "two"})
        assert cat.codes.tolist() == [[1, 0], [2, 1]]

    def test_from_grid_rejects_fractional(self):
        with pytest.raises(ValueError, match="non-integral"):
            categorical_from_grid(make_grid([[1.5]]))

    def test_ascii_round_trip(self, tmp_path):
        cat = CategoricalGrid(2, 2, 0.0, 0.0, 1.0, np.array([[1, 0], [2, 3]]),
                              {1: "a", 2: "b", 3: "c"})
        p = tmp_path / "c.asc"
        write_categorical_ascii(cat, p)
        back = categorical_from_grid(read_ascii_grid(p), cat.labels)
        assert back == cat


class TestRender:
    PALETTE = {1: (255, 0, 0), 2: (0, 255, 0)}

    def test_north_row_becomes_first_pixel_row(self, tmp_path):
        # storage row 1 (north) holds code 2, so the top pixel row is green
        g = make_grid([[1.0, 1.0], [2.0, 2.0]])
        p = tmp_path / "r.ppm"
        render_colormap(g, self.PALETTE, p)
        img = read_ppm(p)
        assert img.samples[0, 0].tolist() == [0, 255, 0]
        assert img.samples[1, 0].tolist() == [255, 0, 0]

    def test_nodata_renders_background(self, tmp_path):
        g = make_grid([[-9999.0, 1.0]])
        p = tmp_path / "r.ppm"
        render_colormap(g, self.PALETTE, p, background=(9, 8, 7))
        img = read_ppm(p)
        assert img.samples[0, 0].tolist() == [9, 8, 7]

    def test_unknown_code_raises(self, tmp_path):
        g = make_grid([[3.0]])
        with pytest.raises(PaletteError, match="3"):
            render_colormap(g, self.PALETTE, tmp_path / "r.ppm")

    def test_non_integral_value_raises(self, tmp_path):
        g = make_grid([[1.25]])
        with pytest.raises(PaletteError):
            render_colormap(g, self.PALETTE, tmp_path / "r.ppm")

    def test_categorical_input(self, tmp_path):
        cat = CategoricalGrid(1, 2, 0.0, 0.0, 1.0, np.array([[1], [2]]), {1: "a", 2: "b"})
        p = tmp_path / "r.ppm"
        render_colormap(cat, self.PALETTE, p)
        img = read_ppm(p)
        assert img.width == 1 and img.height == 2
        assert img.samples[0, 0].tolist() == [0, 255, 0]
