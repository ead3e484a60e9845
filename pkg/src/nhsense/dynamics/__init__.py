"""Time-domain Langevin simulation and empirical SNR estimation."""

from nhsense.dynamics.estimators import EmpiricalSNR, empirical_snr
from nhsense.dynamics.langevin import (
    HomodyneEnsemble,
    SimConfig,
    default_settle_time,
    evolve_mean,
    max_step,
    noise_diffusion,
    simulate_homodyne,
    stationary_covariance,
    steady_signal,
    steady_state_amplitudes,
)

__all__ = [
    "EmpiricalSNR",
    "HomodyneEnsemble",
    "SimConfig",
    "default_settle_time",
    "empirical_snr",
    "evolve_mean",
    "max_step",
    "noise_diffusion",
    "simulate_homodyne",
    "stationary_covariance",
    "steady_signal",
    "steady_state_amplitudes",
]
