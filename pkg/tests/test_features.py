import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evsite.features import (
    Feature,
    FeatureSet,
    GeoJSONError,
    Point,
    PolyLine,
    Polygon,
    parse_geojson_subset,
    rasterize_points,
    rasterize_polygon,
    rasterize_polyline,
    serialize_geojson,
)

from gridgen import make_grid


def fs_of(*features):
    return FeatureSet(tuple(features))


class TestParseSerialize:
    def test_identity_all_geometry_kinds(self):
        fs = fs_of(
            Feature(Point(1.5, -2.0), {"kv": 220, "name": "sub-a"}),
            Feature(PolyLine(((0.0, 0.0), (10.0, 10.0), (20.0, 10.0))), {"name": "road"}),
            Feature(Polygon(((0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 0.0))), {}),
        )
        text = serialize_geojson(fs)
        back = parse_geojson_subset(text)
        assert back == fs
        assert serialize_geojson(back) == text

    def test_output_is_valid_featurecollection(self):
        fs = fs_of(Feature(Point(0.0, 0.0), {"a": 1}))
        doc = json.loads(serialize_geojson(fs))
        assert doc["type"] == "FeatureCollection"
        assert doc["features"][0]["geometry"]["type"] == "Point"

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.tuples(
                st.floats(-1e4, 1e4, allow_nan=False),
                st.floats(-1e4, 1e4, allow_nan=False),
                st.dictionaries(
                    st.text(st.characters(categories=("Ll",)), min_size=1, max_size=5),
                    st.one_of(st.integers(-100, 100), st.text(max_size=5)),
                    max_size=3,
                ),
            ),
            max_size=8,
        )
    )
    def test_point_round_trip_property(self, points):
        fs = fs_of(*(Feature(Point(x, y), props) for x, y, props in points))
        assert parse_geojson_subset(serialize_geojson(fs)) == fs

    def test_rejects_non_collection(self):
        with pytest.raises(GeoJSONError, match="FeatureCollection"):
            parse_geojson_subset('{"type": "Point", "coordinates": [0, 0]}')

    def test_rejects_unknown_geometry(self):
        doc = {
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "geometry": {"type": "MultiPoint", "coordinates": [[0, 0]]},
                "properties": {},
            }],
        }
        with pytest.raises(GeoJSONError, match="feature 0"):
            parse_geojson_subset(json.dumps(doc))

    def test_rejects_unclosed_ring(self):
        doc = {
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "geometry": {
                    "type": "Polygon",
                    "coordinates": [[[0, 0], [1, 0], [1, 1], [0, 1]]],
                },
                "properties": {},
            }],
        }
        with pytest.raises(GeoJSONError):
            parse_geojson_subset(json.dumps(doc))

    def test_rejects_multi_ring_polygon(self):
        ring = [[0, 0], [9, 0], [9, 9], [0, 9], [0, 0]]
        hole = [[2, 2], [3, 2], [3, 3], [2, 2]]
        doc = {
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "geometry": {"type": "Polygon", "coordinates": [ring, hole]},
                "properties": {},
            }],
        }
        with pytest.raises(GeoJSONError):
            parse_geojson_subset(json.dumps(doc))

    def test_rejects_boolean_property(self):
        doc = {
            "type": "FeatureCollection",
            "features": [{
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [0, 0]},
                "properties": {"flag": True},
            }],
        }
        with pytest.raises(GeoJSONError, match="propert"):
            parse_geojson_subset(json.dumps(doc))

    def test_rejects_nonfinite_coordinate(self):
        text = ('{"type": "FeatureCollection", "features": [{"type": "Feature", '
                '"geometry": {"type": "Point", "coordinates": [1e999, 0]}, "properties": {}}]}')
        with pytest.raises(GeoJSONError):
            parse_geojson_subset(text)


class TestRasterizePoints:
    def test_presence_and_skip_count(self, template):
        fs = fs_of(
            Feature(Point(5.0, 5.0)),       # cell (0, 0)
            Feature(Point(15.0, 5.0)),      # cell (1, 0)
            Feature(Point(15.0, 5.0)),      # duplicate cell
            Feature(Point(-3.0, 5.0)),      # west of the grid
            Feature(Point(5.0, 999.0)),     # north of the grid
        )
        mask, skipped = rasterize_points(fs, template, mode="presence")
        assert skipped == 2
        assert mask.values[0, 0] == 1.0 and mask.values[0, 1] == 1.0
        assert mask.values.sum() == 2.0

    def test_count_mode(self, template):
        fs = fs_of(Feature(Point(15.0, 5.0)), Feature(Point(15.0, 5.0)))
        counts, skipped = rasterize_points(fs, template, mode="count")
        assert skipped == 0
        assert counts.values[0, 1] == 2.0

    def test_non_point_feature_rejected(self, template):
        fs = fs_of(Feature(PolyLine(((0.0, 0.0), (1.0, 1.0)))))
        with pytest.raises(ValueError):
            rasterize_points(fs, template, mode="presence")


class TestRasterizePolyline:
    def test_horizontal_line_marks_one_row(self, template):
        # y=25 runs along the centers of storage row 2
        line = PolyLine(((0.0, 25.0), (80.0, 25.0)))
        mask = rasterize_polyline(line, template)
        assert mask.values[2].tolist() == [1.0] * 8
        assert mask.values.sum() == 8.0

    def test_diagonal_marks_contiguous_path(self, template):
        line = PolyLine(((0.0, 0.0), (60.0, 60.0)))
        mask = rasterize_polyline(line, template)
        for i in range(6):
            assert mask.values[i, i] == 1.0
        # the marked set must form a connected path (no diagonal gaps on crossings)
        assert mask.values.sum() >= 6

    def test_line_outside_grid_marks_nothing(self, template):
        line = PolyLine(((0.0, 200.0), (80.0, 200.0)))
        mask = rasterize_polyline(line, template)
        assert mask.values.sum() == 0.0


class TestRasterizePolygon:
    def test_rectangle_covers_inner_cells(self, template):
        # covers cells with centers in (10..40, 10..30): cols 1-3, rows 1-2
        poly = Polygon(((10.0, 10.0), (40.0, 10.0), (40.0, 30.0), (10.0, 30.0), (10.0, 10.0)))
        mask = rasterize_polygon(poly, template)
        inside = np.zeros((6, 8))
        inside[1:3, 1:4] = 1.0
        assert np.array_equal(mask.values, inside)

    def test_triangle_even_odd(self, template):
        poly = Polygon(((0.0, 0.0), (80.0, 0.0), (0.0, 60.0), (0.0, 0.0)))
        mask = rasterize_polygon(poly, template)
        # cell centers strictly under the hypotenuse x/80 + y/60 < 1
        for row in range(6):
            for col in range(8):
                cx, cy = col * 10 + 5, row * 10 + 5
                expected = 1.0 if cx / 80 + cy / 60 < 1 else 0.0
                assert mask.values[row, col] == expected, (row, col)

    def test_polygon_outside_grid(self, template):
        poly = Polygon(((100.0, 100.0), (110.0, 100.0), (110.0, 110.0), (100.0, 100.0)))
        assert rasterize_polygon(poly, template).values.sum() == 0.0
