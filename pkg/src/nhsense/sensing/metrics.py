"""Scalar sensing metrics: photon number, signal, noise, measurement rates and bounds.

All functions evaluate the susceptibility at the model's drive detuning with
eps = 0 unless stated otherwise. Rates carry the normalization
SNR = (eps^2 / kappa^2) tau Gamma.
"""

import logging

import numpy as np
import scipy.optimize
from pydantic import BaseModel, Field

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import InvalidRate
from nhsense.core.model import SensorModel, is_reciprocal, require_stable_model
from nhsense.sensing.response import chi_matrix, response_element

logger = logging.getLogger(__name__)


class MetricsReport(BaseModel):
    """All metrics of one model at one drive setting."""

    nbar_tot: float = Field(ge=0)
    signal_power: float = Field(ge=0)
    s_epsilon: float = Field(ge=0)
    noise_psd: float = Field(gt=0)
    noise_psd_min: float = Field(gt=0)
    gamma_meas: float = Field(ge=0)
    gamma_opt: float = Field(ge=0)
    snr: float = Field(ge=0)
    bounds: dict[str, float] = Field(default_factory=dict)
    flags: dict[str, bool] = Field(default_factory=dict)

    def to_record(self, kappa: float = 1.0) -> dict[str, float | bool]:
        """Flat record with rates divided by kappa and suffixed ``_per_kappa``."""
        record: dict[str, float | bool] = {
            "nbar_tot": self.nbar_tot,
            "S": self.signal_power,
            "S_epsilon": self.s_epsilon,
            "S_II_per_kappa": self.noise_psd / kappa,
            "S_II_min_per_kappa": self.noise_psd_min / kappa,
            "Gamma_meas_per_kappa": self.gamma_meas / kappa,
            "Gamma_opt_per_kappa": self.gamma_opt / kappa,
            "SNR": self.snr,
        }
        for name, value in self.bounds.items():
            # Signal bounds are dimensionless, the rest are rates.
            if name.startswith("S_"):
                record[name] = value
            else:
                record[f"{name}_per_kappa"] = value / kappa
        record.update(self.flags)
        return record


def _require_positive(name: str, value: float) -> None:
    if not value > 0:
        raise InvalidRate(f"{name} must be > 0, got {value}")


def reflection_excess(chi11: complex) -> float:
    """|1 - chi_11|^2 - 1; positive when the waveguide sees reflection gain."""
    return abs(1.0 - chi11) ** 2 - 1.0


def photon_number(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """Coherent intracavity photon number nbar_tot = (beta^2 / kappa) (chi^dagger chi)_11."""
    chi = chi_matrix(model, config=config)
    return float(model.beta**2 / model.kappa * np.sum(np.abs(chi[:, 0]) ** 2))


def signal_power(model: SensorModel, epsilon: float, tau: float, config: Config = DEFAULT_CONFIG) -> float:
    """Homodyne signal power S = 2 (beta^2 / kappa) |(chi V chi)_11|^2 eps^2 tau^2."""
    _require_positive("tau", tau)
    chi = chi_matrix(model, config=config)
    element = response_element(chi, model.V)
    return float(2 * model.beta**2 / model.kappa * abs(element) ** 2 * epsilon**2 * tau**2)


def s_epsilon(epsilon: float, tau: float, nbar_tot: float) -> float:
    """Signal power of the ideal one-mode dispersive sensor, 8 eps^2 tau^2 nbar."""
    _require_positive("tau", tau)
    return 8.0 * epsilon**2 * tau**2 * nbar_tot


def noise_psd_from_chi(model: SensorModel, chi: cm.CMat) -> float:
    """Zero-frequency homodyne noise for a given susceptibility.

    With thermal occupancies n_B (waveguide), n_C (gain) and n_D (loss):

        S_II = (kappa/2) [1 + 2 n_B |1 - chi_11|^2
                          + (4/kappa) (chi Y diag(n_C + 1) Y^dagger chi^dagger)_11
                          + (4/kappa) (chi Z diag(n_D) Z^dagger chi^dagger)_11]
    """
    kappa = model.kappa
    occ = model.nbar_th
    row = chi[0, :]
    gain_amp = np.abs(row @ model.Y) ** 2
    loss_amp = np.abs(row @ model.Z) ** 2
    gain_term = float(np.sum(gain_amp * (occ.gain_vector(model.n_gain) + 1.0)))
    loss_term = float(np.sum(loss_amp * occ.loss_vector(model.n_loss)))
    waveguide_term = 2 * occ.waveguide * abs(1.0 - chi[0, 0]) ** 2
    return kappa / 2 * (1.0 + waveguide_term + 4 / kappa * (gain_term + loss_term))


def noise_psd(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """Zero-frequency homodyne noise S_II[0] with the model's actual baths."""
    return noise_psd_from_chi(model, chi_matrix(model, config=config))


def min_noise_from_chi11(kappa: float, chi11: complex) -> float:
    """(kappa/2)(1 + 2 Theta[x] x) with x = |1 - chi_11|^2 - 1; Theta[0] taken as 0."""
    excess = reflection_excess(chi11)
    return kappa / 2 * (1.0 + 2.0 * excess if excess > 0 else 1.0)


def min_noise(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """Smallest noise any bath realization of this H~ can reach at this detuning."""
    chi = chi_matrix(model, config=config)
    return min_noise_from_chi11(model.kappa, complex(chi[0, 0]))


def _rate(model: SensorModel, chi: cm.CMat, noise: float) -> float:
    # Gamma = 2 kappa beta^2 |(chi V chi)_11|^2 / S_II
    element = response_element(chi, model.V)
    return float(2 * model.kappa * model.beta**2 * abs(element) ** 2 / noise)


def measurement_rate(model: SensorModel, use_min_noise: bool = False, config: Config = DEFAULT_CONFIG) -> float:
    """Measurement rate Gamma_meas defined by SNR = (eps^2 / kappa^2) tau Gamma.

    Args:
        model: Sensor model
        use_min_noise: Use the minimum noise of this H~ instead of the actual baths
        config: Tolerances

    Returns:
        Rate in the model's units
    """
    chi = chi_matrix(model, config=config)
    if use_min_noise:
        noise = min_noise_from_chi11(model.kappa, complex(chi[0, 0]))
    else:
        noise = noise_psd_from_chi(model, chi)
    return _rate(model, chi, noise)


def optimal_rate(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """Gamma_opt: the measurement rate of a minimum-noise realization of this H~."""
    return measurement_rate(model, use_min_noise=True, config=config)


def snr(model: SensorModel, epsilon: float, tau: float, config: Config = DEFAULT_CONFIG) -> float:
    """Power signal-to-noise ratio S / (tau S_II[0])."""
    return signal_power(model, epsilon, tau, config) / (tau * noise_psd(model, config))


def f_chi(chi11: complex) -> float:
    """f(chi_11) = |chi_11|^2 / (1 + 2 Theta[x] x), x = |1 - chi_11|^2 - 1. Maximum 4 at chi_11 = 2."""
    excess = reflection_excess(chi11)
    denominator = 1.0 + 2.0 * excess if excess > 0 else 1.0
    return abs(chi11) ** 2 / denominator


def maximize_f_chi(extent: float = 6.0, points: int = 1201) -> tuple[float, complex]:
    """Maximize f over the square [-extent, extent]^2 of the complex plane.

    A grid search is refined with Nelder-Mead from the best grid point.

    Returns:
        Tuple (max value, argmax)
    """
    axis = np.linspace(-extent, extent, points)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    chi = re + 1j * im
    excess = np.abs(1.0 - chi) ** 2 - 1.0
    values = np.abs(chi) ** 2 / np.where(excess > 0, 1.0 + 2.0 * excess, 1.0)
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    start = np.array([axis[i], axis[j]])

    result = scipy.optimize.minimize(
        lambda x: -f_chi(complex(x[0], x[1])),
        start,
        method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
    )
    best = complex(result.x[0], result.x[1])
    if -result.fun < values[i, j]:
        best = complex(start[0], start[1])
    logger.debug("maximize_f_chi: grid max %.12g at %s, refined %s", values[i, j], start, best)
    return f_chi(best), best


def reciprocal_bounds(
    model: SensorModel, epsilon: float, tau: float, config: Config = DEFAULT_CONFIG
) -> tuple[float, float]:
    """Signal and rate bounds for reciprocal two-mode coupling sensors.

    Returns:
        Tuple (S_bound, rate_bound) = ((1/4) S_eps |chi_11|^2, 16 kappa nbar_tot)

    Raises:
        NotReciprocal: If |H~_12| != |H~_21|
        WrongPerturbation: If V is not the symmetric coupling perturbation
    """
    from nhsense.bounds.reciprocal import ReciprocalRateBound

    values = ReciprocalRateBound().evaluate(model, epsilon, tau, config)
    return values["S_bound_recip"], values["recip_rate_bound"]


def directional_bound(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """kappa nbar_tot |chi_12|^2 for a fully directional two-mode sensor.

    Raises:
        NotDirectional: If chi_21 does not vanish
    """
    from nhsense.bounds.directional import DirectionalRateBound

    return DirectionalRateBound().evaluate(model, config=config)["directional_rate_bound"]


def freq_shift_bound(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """4 kappa nbar_tot f(chi_11) for frequency-shift sensing of mode 1.

    Raises:
        WrongPerturbation: If V is not e11
    """
    from nhsense.bounds.frequency import FrequencyShiftBound

    return FrequencyShiftBound().evaluate(model, config=config)["freq_shift_bound"]


def metrics_report(
    model: SensorModel, epsilon: float, tau: float, config: Config = DEFAULT_CONFIG
) -> MetricsReport:
    """Evaluate every metric and each bound that applies to the model.

    Args:
        model: Sensor model
        epsilon: Perturbation strength used for S, S_eps and SNR
        tau: Measurement time
        config: Tolerances

    Returns:
        MetricsReport
    """
    from nhsense.bounds import default_bounds

    _require_positive("tau", tau)
    htilde = require_stable_model(model, 0.0, config)
    chi = chi_matrix(model, config=config)
    chi11 = complex(chi[0, 0])
    nbar = float(model.beta**2 / model.kappa * np.sum(np.abs(chi[:, 0]) ** 2))
    noise = noise_psd_from_chi(model, chi)
    noise_min = min_noise_from_chi11(model.kappa, chi11)
    signal = float(2 * model.beta**2 / model.kappa * abs(response_element(chi, model.V)) ** 2 * epsilon**2 * tau**2)

    bounds: dict[str, float] = {}
    for bound in default_bounds():
        if bound.applies(model, config):
            bounds.update(bound.evaluate(model, epsilon, tau, config))
        else:
            logger.debug("metrics_report: %s does not apply", bound.name)

    return MetricsReport(
        nbar_tot=nbar,
        signal_power=signal,
        s_epsilon=s_epsilon(epsilon, tau, nbar),
        noise_psd=noise,
        noise_psd_min=noise_min,
        gamma_meas=_rate(model, chi, noise),
        gamma_opt=_rate(model, chi, noise_min),
        snr=signal / (tau * noise),
        bounds=bounds,
        flags={
            "reciprocal": is_reciprocal(htilde, config),
            "has_reflection_gain": reflection_excess(chi11) > 0,
        },
    )
