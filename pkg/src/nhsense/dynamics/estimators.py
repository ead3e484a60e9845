"""Signal and noise estimates from paired Monte Carlo ensembles."""

import logging

import numpy as np
from pydantic import BaseModel, Field

from nhsense.core.errors import ConfigMismatch, InvalidRate
from nhsense.dynamics.langevin import HomodyneEnsemble

logger = logging.getLogger(__name__)


class EmpiricalSNR(BaseModel):
    """Empirical signal, noise and SNR with jackknife standard errors."""

    signal: float
    noise: float = Field(ge=0)
    snr: float
    signal_se: float = Field(ge=0)
    noise_se: float = Field(ge=0)
    snr_se: float = Field(ge=0)
    n_traj: int


def _require_matching(ens_eps: HomodyneEnsemble, ens_0: HomodyneEnsemble) -> None:
    if ens_eps.config != ens_0.config:
        raise ConfigMismatch(f"ensembles were run with different settings: {ens_eps.config} vs {ens_0.config}")
    for field in ("phase", "t_settle", "kappa"):
        a, b = getattr(ens_eps, field), getattr(ens_0, field)
        if a != b:
            raise ConfigMismatch(f"ensembles differ in {field}: {a} vs {b}")
    if ens_eps.n_traj != ens_0.n_traj:
        raise ConfigMismatch(f"ensembles differ in size: {ens_eps.n_traj} vs {ens_0.n_traj}")


def _jackknife_se(replicates: np.ndarray) -> float:
    n = replicates.size
    return float(np.sqrt((n - 1) / n * np.sum((replicates - replicates.mean()) ** 2)))


def empirical_snr(ens_eps: HomodyneEnsemble, ens_0: HomodyneEnsemble) -> EmpiricalSNR:
    """SNR_emp = (<m>_eps - <m>_0)^2 / Var_0(m).

    Standard errors come from the leave-one-out jackknife over trajectory
    indices, treating (m_eps[i], m_0[i]) as a pair. With common random numbers
    this captures the correlation between the two ensembles.

    Raises:
        ConfigMismatch: If the ensembles were produced with different settings
        InvalidRate: If fewer than three trajectories are available or Var_0 = 0
    """
    _require_matching(ens_eps, ens_0)
    n = ens_0.n_traj
    if n < 3:
        raise InvalidRate(f"empirical_snr needs at least 3 trajectories, got {n}")

    x = ens_eps.samples_m
    # Centring keeps the leave-one-out sums well conditioned.
    y = ens_0.samples_m - ens_0.samples_m.mean()
    offset = ens_0.samples_m.mean()

    sum_x, sum_y, sum_y2 = x.sum(), y.sum(), np.sum(y**2)
    mean_x_loo = (sum_x - x) / (n - 1)
    mean_y_loo = (sum_y - y) / (n - 1)
    signal_loo = (mean_x_loo - mean_y_loo - offset) ** 2
    noise_loo = (sum_y2 - y**2 - (n - 1) * mean_y_loo**2) / (n - 2)

    signal = float((x.mean() - ens_0.samples_m.mean()) ** 2)
    noise = float(np.var(ens_0.samples_m, ddof=1))
    if noise <= 0:
        raise InvalidRate("reference ensemble has zero variance")

    result = EmpiricalSNR(
        signal=signal,
        noise=noise,
        snr=signal / noise,
        signal_se=_jackknife_se(signal_loo),
        noise_se=_jackknife_se(noise_loo),
        snr_se=_jackknife_se(signal_loo / noise_loo),
        n_traj=n,
    )
    logger.debug("empirical_snr: %s", result)
    return result
