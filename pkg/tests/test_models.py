import numpy as np
import pytest

from evsite.models import ALTERNATE_SPECS, CANONICAL_SPECS, CORRIDOR_SPEC, RURAL_SPEC, TNC_SPEC
from evsite.pipeline import _PAINTED_COLUMNS
from evsite.suitability import RegionClass
from evsite.transforms import Direction

# layers build_layers derives from an input bundle
DERIVABLE_LAYERS = {
    "corridor_distance", "traffic_distance", "evcs_distance", "dcfc_distance",
    "substation_220kv_distance", "substation_110kv_distance",
    "developed_fraction", "under_developed_fraction", *_PAINTED_COLUMNS,
}


class TestCanonicalSpecs:
    def test_one_model_per_region(self):
        assert set(CANONICAL_SPECS) == set(RegionClass)
        for cls, spec in CANONICAL_SPECS.items():
            assert spec.region is cls

    def test_criteria_counts(self):
        assert len(TNC_SPEC.criteria) == 9
        assert len(CORRIDOR_SPEC.criteria) == 6
        assert len(RURAL_SPEC.criteria) == 5

    def test_all_layers_derivable(self):
        for spec in CANONICAL_SPECS.values():
            for crit in spec.criteria:
                assert crit.layer in DERIVABLE_LAYERS, crit.layer

    def test_distance_layer_polarities(self):
        # corridor proximity, traffic and substations reward closeness;
        # charger distances reward gaps (thin-coverage placement)
        by_layer = {c.layer: c.direction for spec in CANONICAL_SPECS.values()
                    for c in spec.criteria}
        assert by_layer["corridor_distance"] is Direction.NEARER_BETTER
        assert by_layer["traffic_distance"] is Direction.NEARER_BETTER
        assert by_layer["substation_220kv_distance"] is Direction.NEARER_BETTER
        assert by_layer["substation_110kv_distance"] is Direction.NEARER_BETTER
        assert by_layer["evcs_distance"] is Direction.HIGHER_BETTER
        assert by_layer["dcfc_distance"] is Direction.HIGHER_BETTER

    def test_equity_criteria_in_tnc_only(self):
        equity = {"pct_hispanic_black", "pct_below_poverty", "pct_multifamily",
                  "pct_zero_vehicle"}
        assert equity <= {c.layer for c in TNC_SPEC.criteria}
        assert not equity & {c.layer for c in RURAL_SPEC.criteria}
        assert not equity & {c.layer for c in CORRIDOR_SPEC.criteria}

    def test_default_weights(self):
        for spec in CANONICAL_SPECS.values():
            assert all(c.weight == 1.0 for c in spec.criteria)


class TestAlternateSpecs:
    def test_evcs_direction_flipped(self):
        for name, spec in ALTERNATE_SPECS.items():
            evcs = [c for c in spec.criteria if c.layer == "evcs_distance"]
            assert len(evcs) == 1, name
            assert evcs[0].direction is Direction.NEARER_BETTER

    def test_everything_else_unchanged(self):
        alt = ALTERNATE_SPECS["tnc_evcs_nearer"]
        assert alt.region is RegionClass.TNC
        for base_c, alt_c in zip(TNC_SPEC.criteria, alt.criteria):
            if base_c.layer == "evcs_distance":
                continue
            assert base_c == alt_c
