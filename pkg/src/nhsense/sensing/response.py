"""Linear response: susceptibility, response coefficient, homodyne phase and output spectra."""

import logging

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.signal import find_peaks

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import ZeroResponse
from nhsense.core.model import SensorModel, build_htilde, require_stable

logger = logging.getLogger(__name__)


class SusceptibilityResult(BaseModel):
    """Susceptibility matrix with the (omega, Delta, epsilon) it was evaluated at."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    chi: np.ndarray
    omega: float = 0.0
    Delta: float = 0.0
    epsilon: float = 0.0

    @field_validator("chi")
    @classmethod
    def validate_finite(cls, v: np.ndarray) -> np.ndarray:
        if not np.all(np.isfinite(v)):
            raise ValueError("susceptibility has non-finite entries")
        return v

    @property
    def chi11(self) -> complex:
        return complex(self.chi[0, 0])


class IntensitySpectrum(BaseModel):
    """Sampled output intensity P[Delta] and the resonances found in it."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    detunings: np.ndarray
    intensities: np.ndarray
    resonance_detunings: np.ndarray = Field(default_factory=lambda: np.zeros(0))
    kappa: float = Field(default=1.0, gt=0)
    beta: float = Field(default=1.0, ge=0)

    @model_validator(mode="after")
    def validate_lengths(self) -> "IntensitySpectrum":
        if self.detunings.shape != self.intensities.shape:
            raise ValueError(
                f"detunings and intensities differ in length: "
                f"{self.detunings.shape} vs {self.intensities.shape}"
            )
        if np.any(self.intensities < 0):
            raise ValueError("intensities must be nonnegative")
        return self

    @property
    def resonance_count(self) -> int:
        return int(self.resonance_detunings.size)

    def to_dataframe(self) -> pl.DataFrame:
        """Spectrum table with detuning in units of kappa and P in units of beta^2."""
        scale = self.beta**2 if self.beta > 0 else 1.0
        return pl.DataFrame(
            {
                "Delta_per_kappa": self.detunings / self.kappa,
                "P": self.intensities / scale,
            }
        )


def chi_matrix(
    model: SensorModel,
    Delta: float | None = None,
    epsilon: float = 0.0,
    omega: float = 0.0,
    config: Config = DEFAULT_CONFIG,
) -> cm.CMat:
    """chi = i kappa [(omega + Delta) I - H~[eps]]^-1 as a bare array.

    ``Delta`` defaults to the model's drive detuning.
    """
    delta = model.Delta if Delta is None else Delta
    htilde = build_htilde(model, epsilon)
    require_stable(htilde, config, scale=model.kappa)
    m = model.mode_count
    return 1j * model.kappa * cm.inverse((omega + delta) * np.eye(m) - htilde, config)


def susceptibility(
    model: SensorModel,
    omega: float = 0.0,
    Delta: float | None = None,
    epsilon: float = 0.0,
    config: Config = DEFAULT_CONFIG,
) -> SusceptibilityResult:
    """Evaluate the susceptibility matrix by direct inversion.

    Args:
        model: Sensor model
        omega: Frequency offset from the drive
        Delta: Drive detuning; defaults to ``model.Delta``
        epsilon: Perturbation strength
        config: Tolerances

    Returns:
        SusceptibilityResult

    Raises:
        Unstable: If H~[eps] has an eigenvalue on or above the real axis
        SingularMatrix: If the drive sits exactly on a lossless resonance
    """
    delta = model.Delta if Delta is None else Delta
    chi = chi_matrix(model, delta, epsilon, omega, config)
    return SusceptibilityResult(chi=chi, omega=omega, Delta=delta, epsilon=epsilon)


def susceptibility_eigenform(
    model: SensorModel,
    Delta: float | None = None,
    epsilon: float = 0.0,
    config: Config = DEFAULT_CONFIG,
) -> SusceptibilityResult:
    """Evaluate chi = -i kappa adj(H~ - Delta I) / prod_j (Omega_j - Delta).

    Independent of :func:`susceptibility` apart from the shared H~; used as a
    cross-check path.
    """
    delta = model.Delta if Delta is None else Delta
    htilde = build_htilde(model, epsilon)
    require_stable(htilde, config, scale=model.kappa)
    m = model.mode_count
    shifted = htilde - delta * np.eye(m)
    denominator = np.prod(np.linalg.eigvals(htilde) - delta)
    chi = -1j * model.kappa * cm.adjugate(shifted, config) / denominator
    return SusceptibilityResult(chi=chi, omega=0.0, Delta=delta, epsilon=epsilon)


def response_element(chi: cm.CMat, V: cm.CMat) -> complex:
    """(chi V chi)_11."""
    return complex((chi[0, :] @ V @ chi[:, 0]))


def lambda_response(model: SensorModel, config: Config = DEFAULT_CONFIG) -> complex:
    """Linear response coefficient lambda = i (beta / kappa) (chi V chi)_11 at eps = 0."""
    chi = chi_matrix(model, config=config)
    return 1j * model.beta / model.kappa * response_element(chi, model.V)


def homodyne_phase(model: SensorModel, config: Config = DEFAULT_CONFIG) -> float:
    """Optimal homodyne phase phi = -arg(lambda), in (-pi, pi].

    Raises:
        ZeroResponse: If lambda vanishes, so no quadrature carries the signal
    """
    chi = chi_matrix(model, config=config)
    element = response_element(chi, model.V)
    floor = config.hermitian_tol * cm.frobenius(chi) ** 2 * cm.frobenius(model.V)
    if model.beta == 0 or abs(element) <= floor:
        raise ZeroResponse(f"response coefficient vanishes at Delta = {model.Delta}")
    lam = 1j * model.beta / model.kappa * element
    phi = -float(np.angle(lam))
    return np.pi if phi <= -np.pi else phi


def output_field(model: SensorModel, epsilon: float = 0.0, config: Config = DEFAULT_CONFIG) -> complex:
    """Steady-state waveguide output <B_out> = beta (1 - chi~_11[0; Delta; eps])."""
    chi = chi_matrix(model, epsilon=epsilon, config=config)
    return model.beta * (1.0 - complex(chi[0, 0]))


def avg_homodyne_current(model: SensorModel, epsilon: float = 0.0, config: Config = DEFAULT_CONFIG) -> float:
    """<I> = sqrt(2 kappa) Re[e^{i phi} beta (1 - chi~_11)], phi fixed at eps = 0."""
    phi = homodyne_phase(model, config)
    field = output_field(model, epsilon, config)
    return float(np.sqrt(2 * model.kappa) * (np.exp(1j * phi) * field).real)


def output_intensity(
    model: SensorModel,
    Delta: float | None = None,
    epsilon: float = 0.0,
    config: Config = DEFAULT_CONFIG,
) -> float:
    """Coherent output intensity P[Delta] = beta^2 |1 - chi_11|^2."""
    chi = chi_matrix(model, Delta, epsilon, config=config)
    return float(model.beta**2 * abs(1.0 - chi[0, 0]) ** 2)


def _parabolic_vertex(x: np.ndarray, y: np.ndarray) -> float:
    # Vertex of the parabola through three points; falls back to the middle one.
    a, b, _ = np.polyfit(x - x[1], y, 2)
    if a >= 0:
        return float(x[1])
    vertex = float(x[1] - b / (2 * a))
    return min(max(vertex, float(x[0])), float(x[2]))


def find_resonances(
    detunings: np.ndarray,
    intensities: np.ndarray,
    background: float,
    min_prominence: float = DEFAULT_CONFIG.resonance_prominence,
) -> np.ndarray:
    """Locate resonance features in a sampled spectrum.

    A resonance is an interior local maximum of |P - background| whose
    prominence is at least ``min_prominence`` times the largest deviation.
    With ``min_prominence = 0`` every sign change of the discrete first
    difference from rising to falling counts.
    Each maximum is refined by a parabola through the extremal triple.

    Args:
        detunings: Ascending sample points
        intensities: P at each sample point
        background: Far-detuned intensity (beta^2)
        min_prominence: Relative prominence threshold, 0 to keep every maximum

    Returns:
        Refined resonance detunings, ascending
    """
    deviation = np.abs(intensities - background)
    top = float(np.max(deviation)) if deviation.size else 0.0
    if deviation.size < 3 or top == 0.0:
        return np.zeros(0)
    peaks, _ = find_peaks(deviation, prominence=min_prominence * top if min_prominence > 0 else None)
    refined = [
        _parabolic_vertex(detunings[i - 1 : i + 2], deviation[i - 1 : i + 2]) for i in peaks
    ]
    logger.debug("find_resonances: %d peaks at %s", len(refined), refined)
    return np.asarray(refined, dtype=float)


def intensity_spectrum(
    model: SensorModel,
    Delta_grid: np.ndarray | list[float],
    epsilon: float = 0.0,
    config: Config = DEFAULT_CONFIG,
) -> IntensitySpectrum:
    """Sample P[Delta] over a grid and detect resonances.

    Args:
        model: Sensor model (its own Delta is ignored)
        Delta_grid: Strictly ascending detunings
        epsilon: Perturbation strength
        config: Tolerances

    Returns:
        IntensitySpectrum

    Raises:
        ValueError: If the grid is empty or not strictly ascending
        Unstable: If H~[eps] is unstable
    """
    grid = np.asarray(Delta_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("Delta grid must be a nonempty 1-D sequence")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("Delta grid must be strictly ascending")

    htilde = build_htilde(model, epsilon)
    require_stable(htilde, config, scale=model.kappa)
    m = model.mode_count
    intensities = np.empty_like(grid)
    for k, delta in enumerate(grid):
        chi = 1j * model.kappa * cm.inverse(delta * np.eye(m) - htilde, config)
        intensities[k] = model.beta**2 * abs(1.0 - chi[0, 0]) ** 2

    background = model.beta**2
    resonances = find_resonances(grid, intensities, background, config.resonance_prominence)
    return IntensitySpectrum(
        detunings=grid,
        intensities=intensities,
        resonance_detunings=resonances,
        kappa=model.kappa,
        beta=model.beta,
    )
