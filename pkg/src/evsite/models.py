"""Canonical criteria models for the three region classes.

Layer names refer to the derived layers the run pipeline builds from the
input bundle. Directions are pre-normalization: "nearer" layers are
distance rasters where small values should score high.

Two readings of EVCS availability exist: the canonical models treat
distance to existing public chargers as higher-better (gap filling, new
sites where coverage is thin); the alternate models flip that criterion
to nearer-better (reinforcement of served areas). Distance to non-Tesla
DCFC in the corridor model follows the same gap-filling reading.
"""

from __future__ import annotations

from .suitability import Criterion, RegionClass, SuitabilitySpec
from .transforms import Direction

_H = Direction.HIGHER_BETTER
_N = Direction.NEARER_BETTER

TNC_SPEC = SuitabilitySpec(
    RegionClass.TNC,
    (
        Criterion("pop_density", "pop_density", _H),
        Criterion("traffic", "traffic_distance", _N),
        Criterion("evcs_availability", "evcs_distance", _H),
        Criterion("substation_220kv", "substation_220kv_distance", _N),
        Criterion("developed_land", "developed_fraction", _H),
        Criterion("racial_composition", "pct_hispanic_black", _H),
        Criterion("income_level", "pct_below_poverty", _H),
        Criterion("housing_type", "pct_multifamily", _H),
        Criterion("vehicle_ownership", "pct_zero_vehicle", _H),
    ),
)

RURAL_SPEC = SuitabilitySpec(
    RegionClass.RURAL,
    (
        Criterion("pop_density", "pop_density", _H),
        Criterion("traffic", "traffic_distance", _N),
        Criterion("evcs_availability", "evcs_distance", _H),
        Criterion("substation_220kv", "substation_220kv_distance", _N),
        Criterion("underdeveloped_land", "under_developed_fraction", _H),
    ),
)

CORRIDOR_SPEC = SuitabilitySpec(
    RegionClass.CORRIDOR,
    (
        Criterion("pop_density", "pop_density", _H),
        Criterion("traffic", "traffic_distance", _N),
        Criterion("substation_110kv", "substation_110kv_distance", _N),
        Criterion("dac", "dac_flag", _H),
        Criterion("corridor_proximity", "corridor_distance", _N),
        Criterion("dcfc_gap", "dcfc_distance", _H),
    ),
)

CANONICAL_SPECS = {
    RegionClass.TNC: TNC_SPEC,
    RegionClass.CORRIDOR: CORRIDOR_SPEC,
    RegionClass.RURAL: RURAL_SPEC,
}


def _flip_evcs(spec: SuitabilitySpec) -> SuitabilitySpec:
    criteria = tuple(
        Criterion(c.name, c.layer, _N, c.weight) if c.layer == "evcs_distance" else c
        for c in spec.criteria
    )
    return SuitabilitySpec(spec.region, criteria)


ALTERNATE_SPECS = {
    "tnc_evcs_nearer": _flip_evcs(TNC_SPEC),
    "rural_evcs_nearer": _flip_evcs(RURAL_SPEC),
}
