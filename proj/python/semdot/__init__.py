"""Topology optimization with elemental volume fractions and smooth boundaries."""

from ._core import (
    Filter,
    MaterialModel,
    Mesh,
    SemdotError,
    bisect_threshold,
    element_stiffness_q4,
    extract_boundary,
    heaviside_smooth,
    heaviside_step,
    load_config,
    preset_names,
    run,
)

__all__ = [
    "Filter",
    "MaterialModel",
    "Mesh",
    "SemdotError",
    "bisect_threshold",
    "element_stiffness_q4",
    "extract_boundary",
    "heaviside_smooth",
    "heaviside_step",
    "load_config",
    "preset_names",
    "run",
]
