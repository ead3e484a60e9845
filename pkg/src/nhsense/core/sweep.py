"""Detuning sweeps producing the signal and rate tables."""

import logging

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator

from nhsense.bounds import Bound, ReciprocalRateBound, default_bounds
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.model import SensorModel, build_htilde, normalize_drive
from nhsense.sensing.bathopt import construct_min_noise
from nhsense.sensing.metrics import measurement_rate, optimal_rate, photon_number, signal_power

logger = logging.getLogger(__name__)

RATE_COLUMNS = ("Gamma_meas", "Gamma_opt", "recip_rate_bound", "directional_rate_bound", "freq_shift_bound")


class DetuningSweep(BaseModel):
    """Metrics of one model evaluated across a grid of drive detunings.

    By default the drive amplitude is held fixed, so ``nbar_tot`` varies along
    the grid and is reported per row. With ``nbar_tot`` set, the drive is
    renormalized at every detuning so the photon number stays constant.
    The reciprocal bounds are always emitted as reference lines; other bounds
    only when they apply to the model.

    Attributes:
        model: Sensor model; its Delta is replaced by each grid point
        grid: Strictly ascending detunings
        epsilon: Perturbation strength for the signal columns
        tau: Measurement time for the signal columns
        bounds: Bounds to evaluate; defaults to every known bound
        reoptimize_baths: Rebuild the minimum-noise baths at each detuning
        nbar_tot: Photon number to hold fixed along the grid, if given
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    model: SensorModel
    grid: np.ndarray
    epsilon: float = 0.0
    tau: float = Field(default=1.0, gt=0)
    bounds: list[Bound] = Field(default_factory=default_bounds)
    reoptimize_baths: bool = False
    nbar_tot: float | None = Field(default=None, gt=0)

    @field_validator("grid", mode="before")
    @classmethod
    def validate_grid(cls, v: object) -> np.ndarray:
        grid = np.asarray(v, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("grid must be a nonempty one-dimensional sequence")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be strictly ascending")
        return grid

    def _model_at(self, delta: float, config: Config) -> SensorModel:
        model = self._baths_at(delta, config)
        if self.nbar_tot is None:
            return model
        return normalize_drive(model, self.nbar_tot, config)

    def _baths_at(self, delta: float, config: Config) -> SensorModel:
        if not self.reoptimize_baths:
            return self.model.with_updates(Delta=delta)
        model, _ = construct_min_noise(
            build_htilde(self.model), self.model.kappa, delta, self.model.V, self.model.beta, config
        )
        if self.model.nbar_th.is_vacuum:
            return model
        # Occupancy lengths must still match the rebuilt bath counts.
        return model.with_updates(nbar_th=self.model.nbar_th)

    def _active_bounds(self, config: Config) -> tuple[list[Bound], list[Bound]]:
        # Applicability is structural, so it is decided once on the base model.
        reference = [b for b in self.bounds if isinstance(b, ReciprocalRateBound)]
        checked = [b for b in self.bounds if not isinstance(b, ReciprocalRateBound) and b.applies(self.model, config)]
        return reference, checked

    def run(self, config: Config = DEFAULT_CONFIG) -> pl.DataFrame:
        """Evaluate the sweep.

        Returns:
            DataFrame with columns Delta, S, S_bound_recip, Gamma_meas,
            Gamma_opt, recip_rate_bound, nbar_tot and one column per applicable
            bound, in absolute units

        Raises:
            Unstable: If H~ is unstable
            ConstructionFailed: If ``reoptimize_baths`` and the construction fails
        """
        reference, checked = self._active_bounds(config)
        rows: list[dict[str, float]] = []
        for delta in self.grid:
            model = self._model_at(float(delta), config)
            row = {
                "Delta": float(delta),
                "S": signal_power(model, self.epsilon, self.tau, config),
                "Gamma_meas": measurement_rate(model, config=config),
                "Gamma_opt": optimal_rate(model, config),
                "nbar_tot": photon_number(model, config),
            }
            for bound in reference + checked:
                row.update(bound.reference(model, self.epsilon, self.tau, config))
            rows.append(row)

        leading = ["Delta", "S", "S_bound_recip", "Gamma_meas", "Gamma_opt", "recip_rate_bound", "nbar_tot"]
        extra = [c for b in checked for c in b.columns]
        columns = [c for c in leading if c in rows[0]] + extra
        logger.debug("DetuningSweep: %d points, bounds %s", len(rows), [b.name for b in reference + checked])
        return pl.DataFrame(rows).select(columns)

    def to_dataframe(self, config: Config = DEFAULT_CONFIG) -> pl.DataFrame:
        """Run the sweep in units of kappa, suffixing rate and detuning columns ``_per_kappa``."""
        frame = self.run(config)
        kappa = self.model.kappa
        renames = {"Delta": "Delta_per_kappa"}
        renames.update({c: f"{c}_per_kappa" for c in RATE_COLUMNS if c in frame.columns})
        scaled = [pl.col(c) / kappa for c in renames]
        return frame.with_columns(scaled).rename(renames)
