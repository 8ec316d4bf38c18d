"""Flooding over Manhattan random way-point networks."""

from ._mrwp import (
    DEFAULT_C2,
    RNG_ALGORITHM,
    WorldParams,
    best_kappa,
    cell_probability,
    desk_params,
    destination_law,
    event_b_probability,
    radius_threshold,
    run_flood,
    spatial_density,
    theoretical_bound,
    zone_map,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_C2",
    "RNG_ALGORITHM",
    "WorldParams",
    "best_kappa",
    "cell_probability",
    "desk_params",
    "destination_law",
    "event_b_probability",
    "radius_threshold",
    "run_flood",
    "spatial_density",
    "theoretical_bound",
    "zone_map",
]
