"""Fundamental bounds on the measurement rate and signal power."""

from nhsense.bounds.base import Bound
from nhsense.bounds.directional import DirectionalRateBound
from nhsense.bounds.frequency import FrequencyShiftBound
from nhsense.bounds.reciprocal import ReciprocalRateBound


def default_bounds() -> list[Bound]:
    """One instance of every bound, in reporting order."""
    return [ReciprocalRateBound(), DirectionalRateBound(), FrequencyShiftBound()]


__all__ = [
    "Bound",
    "DirectionalRateBound",
    "FrequencyShiftBound",
    "ReciprocalRateBound",
    "default_bounds",
]
