"""Gaussian quantum Fisher information of the integrated output mode.

Only the first-moment term of the Gaussian QFI is kept, which is the
strong-drive limit; the covariance is taken at zeroth order in eps. In that
limit homodyne detection at the optimal phase is an optimal measurement and
eps^2 F = SNR.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import DuplicateTones, InvalidRate
from nhsense.core.model import SensorModel
from nhsense.sensing.metrics import min_noise_from_chi11, noise_psd_from_chi
from nhsense.sensing.response import chi_matrix, response_element

logger = logging.getLogger(__name__)


class GaussianMoments(BaseModel):
    """Quadrature means and symmetrized covariance of the temporal output mode."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u: np.ndarray
    W: np.ndarray
    tau: float = Field(gt=0)
    epsilon: float = 0.0

    @field_validator("W")
    @classmethod
    def validate_symmetric(cls, v: np.ndarray) -> np.ndarray:
        if v.shape != (2, 2) or not np.allclose(v, v.T, rtol=0, atol=1e-12 * max(np.abs(v).max(), 1.0)):
            raise ValueError(f"W must be a symmetric 2x2 matrix, got {v}")
        return v


class Tone(BaseModel):
    """One drive tone at detuning ``Delta`` with amplitude ``beta``."""

    model_config = ConfigDict(frozen=True)

    Delta: float
    beta: float = Field(ge=0)


class ToneSet(BaseModel):
    """A multi-tone drive."""

    model_config = ConfigDict(frozen=True)

    tones: list[Tone] = Field(min_length=1)

    @classmethod
    def from_pairs(cls, pairs: list[tuple[float, float]]) -> "ToneSet":
        """Build from (Delta_j, beta_j) pairs."""
        return cls(tones=[Tone(Delta=d, beta=b) for d, b in pairs])

    def require_distinct(self) -> None:
        """Raise DuplicateTones if two tones share a detuning."""
        detunings = [t.Delta for t in self.tones]
        if len(set(detunings)) != len(detunings):
            raise DuplicateTones(f"tone detunings must be distinct, got {detunings}")

    def photon_numbers(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> np.ndarray:
        """Coherent photon number n_j contributed by each tone."""
        out = np.empty(len(self.tones))
        for k, tone in enumerate(self.tones):
            chi = chi_matrix(model, tone.Delta, config=config)
            out[k] = tone.beta**2 / model.kappa * np.sum(np.abs(chi[:, 0]) ** 2)
        return out

    def normalized(self, model: SensorModel, nbar_tot: float, config: Config = DEFAULT_CONFIG) -> "ToneSet":
        """Rescale every amplitude by one factor so the photon numbers sum to ``nbar_tot``."""
        total = float(np.sum(self.photon_numbers(model, config)))
        if total == 0:
            raise InvalidRate("cannot normalize a tone set with zero photon number")
        factor = np.sqrt(nbar_tot / total)
        return ToneSet(tones=[Tone(Delta=t.Delta, beta=t.beta * factor) for t in self.tones])


def _require_tau(tau: float) -> None:
    if not tau > 0:
        raise InvalidRate(f"tau must be > 0, got {tau}")


def output_moments(
    model: SensorModel, epsilon: float, tau: float, config: Config = DEFAULT_CONFIG
) -> GaussianMoments:
    """First and second moments of the output mode integrated over ``tau``.

    u = sqrt(2 tau) beta (Re(1 - chi_11), Im(1 - chi_11)) with chi at eps;
    W = (S_II[0] / kappa) I_2 with the model's actual baths at eps = 0.
    """
    _require_tau(tau)
    chi_eps = chi_matrix(model, epsilon=epsilon, config=config)
    field = 1.0 - complex(chi_eps[0, 0])
    u = np.sqrt(2 * tau) * model.beta * np.array([field.real, field.imag])
    noise = noise_psd_from_chi(model, chi_matrix(model, config=config))
    return GaussianMoments(u=u, W=noise / model.kappa * np.eye(2), tau=tau, epsilon=epsilon)


def _first_moment_fisher(beta: float, kappa: float, tau: float, chi: np.ndarray, V: np.ndarray, noise: float) -> float:
    # d chi_11 / d eps = -i (chi V chi)_11 / kappa
    dchi = -1j * response_element(chi, V) / kappa
    du = np.sqrt(2 * tau) * beta * np.array([-dchi.real, -dchi.imag])
    w_inv = np.eye(2) * (kappa / noise)
    return float(du @ w_inv @ du)


def qfi_single(model: SensorModel, tau: float, config: Config = DEFAULT_CONFIG) -> float:
    """Single-tone QFI of the output mode at eps = 0 (first-moment term)."""
    _require_tau(tau)
    chi = chi_matrix(model, config=config)
    noise = noise_psd_from_chi(model, chi)
    return _first_moment_fisher(model.beta, model.kappa, tau, chi, model.V, noise)


def per_tone_rate(model: SensorModel, Delta_j: float, config: Config = DEFAULT_CONFIG) -> tuple[float, float]:
    """Measurement rate per coherent photon for a tone at ``Delta_j``.

    Returns:
        Tuple (gamma_actual, gamma_opt), each
        2 kappa^2 |(chi V chi)_11|^2 / (S (chi^dagger chi)_11) with S the
        actual or minimum noise at ``Delta_j``
    """
    chi = chi_matrix(model, Delta_j, config=config)
    weight = float(np.sum(np.abs(chi[:, 0]) ** 2))
    numerator = 2 * model.kappa**2 * abs(response_element(chi, model.V)) ** 2
    actual = noise_psd_from_chi(model, chi)
    optimal = min_noise_from_chi11(model.kappa, complex(chi[0, 0]))
    return numerator / (actual * weight), numerator / (optimal * weight)


def qfi_multitone(model: SensorModel, tones: ToneSet, tau: float, config: Config = DEFAULT_CONFIG) -> float:
    """QFI of a multi-tone drive in the long-time limit.

    Each tone's output mode is independent, so the covariance is block
    diagonal and the QFI is the sum over tones of (tau / kappa^2) n_j Gamma~(Delta_j).

    Raises:
        DuplicateTones: If two tones share a detuning
        Unstable: If the model is unstable
    """
    _require_tau(tau)
    tones.require_distinct()
    total = 0.0
    for tone in tones.tones:
        chi = chi_matrix(model, tone.Delta, config=config)
        noise = noise_psd_from_chi(model, chi)
        term = _first_moment_fisher(tone.beta, model.kappa, tau, chi, model.V, noise)
        logger.debug("qfi_multitone: Delta=%g beta=%g F_j=%.6g", tone.Delta, tone.beta, term)
        total += term
    return total
