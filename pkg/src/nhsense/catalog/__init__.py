"""Concrete sensor families and named presets."""

from nhsense.catalog.presets import PRESETS, Preset, get_preset, list_presets
from nhsense.catalog.two_mode import (
    JordanForm,
    TwoModeParams,
    chiral_waveguide,
    directional_eigenvalues_closed_form,
    directional_two_mode,
    eigenvalues,
    ep_condition,
    ep_two_mode_frequency_sensor,
    jordan_eigenvalue_estimate,
    jordan_transform,
    reciprocal_two_mode,
    single_mode,
    splitting,
)

__all__ = [
    "PRESETS",
    "JordanForm",
    "Preset",
    "TwoModeParams",
    "chiral_waveguide",
    "directional_eigenvalues_closed_form",
    "directional_two_mode",
    "eigenvalues",
    "ep_condition",
    "ep_two_mode_frequency_sensor",
    "get_preset",
    "jordan_eigenvalue_estimate",
    "jordan_transform",
    "list_presets",
    "reciprocal_two_mode",
    "single_mode",
    "splitting",
]
