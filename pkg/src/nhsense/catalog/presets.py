"""Named sensor configurations used for the standard figures.

Every preset is normalized so that nbar_tot = 1 at Delta = 0 with eps = 0.
"""

from collections.abc import Callable
from typing import Any

from pydantic import BaseModel, ConfigDict

from nhsense.catalog.two_mode import (
    TwoModeParams,
    chiral_waveguide,
    directional_two_mode,
    reciprocal_two_mode,
)
from nhsense.core.model import SensorModel, normalize_drive


class Preset(BaseModel):
    """A named model factory with its default parameters."""

    model_config = ConfigDict(frozen=True)

    name: str
    description: str
    family: str
    defaults: dict[str, float]

    def build(self, **overrides: Any) -> SensorModel:
        """Construct the model, replacing any default parameter by an override.

        Raises:
            ValueError: If an override names an unknown parameter
        """
        unknown = set(overrides) - set(self.defaults)
        if unknown:
            raise ValueError(f"preset '{self.name}' has no parameter(s) {sorted(unknown)}; choose from {sorted(self.defaults)}")
        params = {**self.defaults, **overrides}
        model = _FAMILIES[self.family](params)
        return normalize_drive(model, 1.0)


def _reciprocal(params: dict[str, Any]) -> SensorModel:
    return reciprocal_two_mode(TwoModeParams(**params))


def _directional(params: dict[str, Any]) -> SensorModel:
    return directional_two_mode(TwoModeParams(**params))


def _chiral(params: dict[str, Any]) -> SensorModel:
    return chiral_waveguide(**params)


_FAMILIES: dict[str, Callable[[dict[str, Any]], SensorModel]] = {
    "reciprocal": _reciprocal,
    "directional": _directional,
    "chiral": _chiral,
}

PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset(
            name="fig2-recip-nogain",
            description="Reciprocal two-mode sensor without gain",
            family="reciprocal",
            defaults={"kappa": 1.0, "gamma1": 0.0, "gamma2": 0.2, "J": 0.2},
        ),
        Preset(
            name="fig2-recip-gain",
            description="Reciprocal two-mode sensor with gain on mode 2, tuned to its EP",
            family="reciprocal",
            defaults={"kappa": 1.0, "gamma1": 0.0, "gamma2": -0.3, "J": 0.325},
        ),
        Preset(
            name="fig2-nonrecip",
            description="Directional two-mode sensor with minimum-noise baths",
            family="directional",
            defaults={"kappa": 1.0, "gamma1": 1.0, "gamma2": 0.5, "J": 1.5, "nu2": 0.0},
        ),
        Preset(
            name="fig3-amplifier",
            description="Reciprocal two-mode amplifier without an EP (kappa + gamma1 = gamma2)",
            family="reciprocal",
            defaults={"kappa": 1.0, "gamma1": -0.84, "gamma2": 0.16, "J": 0.325},
        ),
        Preset(
            name="fig5-splitting",
            description="Directional two-mode sensor for mode-splitting spectra",
            family="directional",
            defaults={"kappa": 1.0, "gamma1": 0.5, "gamma2": 1.0, "J": 20.0, "nu2": 4.0},
        ),
        Preset(
            name="chiral",
            description="Passive directional sensor built on a chiral waveguide",
            family="chiral",
            defaults={"kappa": 1.0, "gamma1": 1.0, "gamma2": 0.1},
        ),
    ]
}


def list_presets() -> list[Preset]:
    """All presets in registry order."""
    return list(PRESETS.values())


def get_preset(name: str, **overrides: Any) -> SensorModel:
    """Build a named preset.

    Args:
        name: Preset name, see :func:`list_presets`
        **overrides: Replacement values for the preset's default parameters

    Returns:
        Normalized SensorModel

    Raises:
        ValueError: If the name or an override is unknown
    """
    if name not in PRESETS:
        raise ValueError(f"unknown preset '{name}'; choose from {sorted(PRESETS)}")
    return PRESETS[name].build(**overrides)
