"""One- and two-mode sensor families, EP conditions and spectral formulas."""

import logging
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import InvalidRate, NotAtEP, UnstableEP, WrongDimension
from nhsense.core.model import (
    SensorModel,
    build_htilde,
    coupling_perturbation,
    eigenvalues_of,
    frequency_perturbation,
    from_hamiltonian,
    require_stable,
)
from nhsense.sensing.bathopt import construct_min_noise

logger = logging.getLogger(__name__)

Perturbation = Literal["coupling", "frequency"]


class TwoModeParams(BaseModel):
    """Parameters of the two-mode families.

    ``gamma1`` and ``gamma2`` are local loss rates (negative for gain), ``J``
    the mode-mode coupling and ``nu2`` the detuning of mode 2 from mode 1.
    """

    model_config = ConfigDict(frozen=True)

    kappa: float = Field(default=1.0, gt=0)
    gamma1: float = 0.0
    gamma2: float = 0.0
    J: complex = 0.0
    nu2: float = 0.0


def _perturbation(kind: Perturbation, m: int) -> cm.CMat:
    if kind == "coupling":
        return coupling_perturbation()
    if kind == "frequency":
        return frequency_perturbation(m)
    raise ValueError(f"perturbation must be 'coupling' or 'frequency', got '{kind}'")


def _local_baths(rates: list[float]) -> tuple[cm.CMat, cm.CMat]:
    # Each positive rate becomes a loss column, each negative one a gain column.
    m = len(rates)
    gain_cols, loss_cols = [], []
    for i, rate in enumerate(rates):
        if rate == 0:
            continue
        col = np.zeros(m, dtype=np.complex128)
        col[i] = np.sqrt(abs(rate) / 2)
        (loss_cols if rate > 0 else gain_cols).append(col)
    y = np.column_stack(gain_cols) if gain_cols else np.zeros((m, 0), dtype=np.complex128)
    z = np.column_stack(loss_cols) if loss_cols else np.zeros((m, 0), dtype=np.complex128)
    return y, z


def single_mode(kappa: float = 1.0, gamma1: float = 0.0, Delta: float = 0.0, beta: float = 1.0) -> SensorModel:
    """One-mode sensor with H~ = -i (kappa + gamma1) / 2 and V = e11.

    Raises:
        Unstable: If kappa + gamma1 <= 0
    """
    y, z = _local_baths([gamma1])
    model = SensorModel(H=[[0.0]], Y=y, Z=z, kappa=kappa, V=frequency_perturbation(1), Delta=Delta, beta=beta)
    require_stable(build_htilde(model), scale=kappa)
    return model


def reciprocal_htilde(p: TwoModeParams) -> cm.CMat:
    """[[-i(kappa + gamma1)/2, J], [J, nu2 - i gamma2/2]]."""
    return np.array(
        [
            [-0.5j * (p.kappa + p.gamma1), p.J],
            [p.J, p.nu2 - 0.5j * p.gamma2],
        ],
        dtype=np.complex128,
    )


def directional_htilde(p: TwoModeParams) -> cm.CMat:
    """[[-i(kappa + gamma1)/2, J], [0, nu2 - i gamma2/2]]."""
    return np.array(
        [
            [-0.5j * (p.kappa + p.gamma1), p.J],
            [0.0, p.nu2 - 0.5j * p.gamma2],
        ],
        dtype=np.complex128,
    )


def reciprocal_two_mode(
    p: TwoModeParams,
    perturbation: Perturbation = "coupling",
    Delta: float = 0.0,
    beta: float = 1.0,
) -> SensorModel:
    """Reciprocal two-mode sensor with local gain/loss baths.

    Args:
        p: Parameters; J must be real
        perturbation: ``"coupling"`` for V = (e12 + e21)/2, ``"frequency"`` for V = e11
        Delta: Drive detuning
        beta: Drive amplitude

    Raises:
        ValueError: If J has an imaginary part
        Unstable: If the resulting H~ is unstable
    """
    if complex(p.J).imag != 0:
        raise ValueError(f"reciprocal family takes real J, got {p.J}")
    j = complex(p.J).real
    y, z = _local_baths([p.gamma1, p.gamma2])
    model = SensorModel(
        H=[[0.0, j], [j, p.nu2]],
        Y=y,
        Z=z,
        kappa=p.kappa,
        V=_perturbation(perturbation, 2),
        Delta=Delta,
        beta=beta,
    )
    require_stable(build_htilde(model), scale=p.kappa)
    return model


def directional_two_mode(
    p: TwoModeParams,
    min_noise: bool = True,
    perturbation: Perturbation = "coupling",
    Delta: float = 0.0,
    beta: float = 1.0,
    config: Config = DEFAULT_CONFIG,
) -> SensorModel:
    """Fully directional two-mode sensor, H~_21 = 0.

    Baths come from the minimum-noise construction at ``Delta`` by default,
    or from the naive gain/loss split when ``min_noise`` is False.

    Raises:
        Unstable: If H~ is unstable
        ConstructionFailed: If the minimum-noise construction fails
    """
    htilde = directional_htilde(p)
    v = _perturbation(perturbation, 2)
    if min_noise:
        model, realization = construct_min_noise(htilde, p.kappa, Delta, v, beta, config)
        logger.debug("directional_two_mode: residual %.3e", realization.residual)
        return model
    return from_hamiltonian(htilde, p.kappa, v, Delta=Delta, beta=beta, config=config)


def chiral_waveguide(
    kappa: float = 1.0,
    gamma1: float = 1.0,
    gamma2: float = 0.1,
    Delta: float = 0.0,
    beta: float = 1.0,
) -> SensorModel:
    """Passive directional sensor built from a shared one-way (chiral) loss channel.

    Both modes leak into one channel z = (sqrt(gamma1/2), sqrt(gamma2/2)).
    Its collective loss term -i z z^dagger contributes -i sqrt(gamma1 gamma2)/2
    to both off-diagonal entries; the Hermitian coupling
    H_12 = -i sqrt(gamma1 gamma2)/2 cancels it below the diagonal and doubles it
    above, giving H~_12 = -i sqrt(gamma1 gamma2) and H~_21 = 0 with no gain.

    Raises:
        InvalidRate: If gamma1 or gamma2 is not positive
    """
    if gamma1 <= 0 or gamma2 <= 0:
        raise InvalidRate(f"chiral waveguide needs gamma1, gamma2 > 0, got {gamma1}, {gamma2}")
    g = np.sqrt(gamma1 * gamma2)
    h = np.array([[0.0, -0.5j * g], [0.5j * g, 0.0]], dtype=np.complex128)
    z = np.array([[np.sqrt(gamma1 / 2)], [np.sqrt(gamma2 / 2)]], dtype=np.complex128)
    return SensorModel(
        H=h,
        Y=np.zeros((2, 0)),
        Z=z,
        kappa=kappa,
        V=coupling_perturbation(),
        Delta=Delta,
        beta=beta,
    )


def ep_condition(kappa: float, gamma1: float, gamma2: float) -> float:
    """Coupling J_EP = (kappa + gamma1 - gamma2)/4 at which the reciprocal pair has an EP.

    Raises:
        UnstableEP: If kappa + gamma1 + gamma2 <= 0, so the EP is not stable
    """
    if kappa + gamma1 + gamma2 <= 0:
        raise UnstableEP(f"EP is unstable: kappa + gamma1 + gamma2 = {kappa + gamma1 + gamma2} <= 0")
    return (kappa + gamma1 - gamma2) / 4


def ep_two_mode_frequency_sensor(kappa: float = 1.0, gamma2: float = 0.25, beta: float = 1.0) -> SensorModel:
    """Reciprocal EP sensor read out through a mode-1 frequency shift.

    Mode 1 gain is tuned to gamma1 = -(sqrt(kappa) - sqrt(gamma2))^2, which
    makes chi_11 = 2 at Delta = 0, and J sits at the EP.

    Raises:
        InvalidRate: If gamma2 <= 0
    """
    if gamma2 <= 0:
        raise InvalidRate(f"gamma2 must be > 0, got {gamma2}")
    gamma1 = -((np.sqrt(kappa) - np.sqrt(gamma2)) ** 2)
    j = ep_condition(kappa, gamma1, gamma2)
    p = TwoModeParams(kappa=kappa, gamma1=gamma1, gamma2=gamma2, J=j)
    return reciprocal_two_mode(p, perturbation="frequency", beta=beta)


def eigenvalues(model: SensorModel, epsilon: float = 0.0) -> np.ndarray:
    """Spectrum of H~[eps], sorted by real part then imaginary part. Never raises on instability."""
    return eigenvalues_of(build_htilde(model, epsilon))


def splitting(model: SensorModel, epsilon: float = 0.0) -> complex:
    """Omega_+ - Omega_- for a two-mode model (Omega_+ has the larger real part).

    Raises:
        WrongDimension: If the model does not have two modes
    """
    if model.mode_count != 2:
        raise WrongDimension(f"splitting needs M = 2, got {model.mode_count}")
    lower, upper = eigenvalues(model, epsilon)
    return complex(upper - lower)


def directional_eigenvalues_closed_form(p: TwoModeParams, epsilon: float = 0.0) -> np.ndarray:
    """Eigenvalues of the directional pair under a symmetric coupling change eps.

    Omega_pm = nu2/2 - i(kappa + gamma1 + gamma2)/4
               pm sqrt(J eps/2 + eps^2/4 + (nu2/2 + i(kappa + gamma1 - gamma2)/4)^2)
    """
    centre = p.nu2 / 2 - 0.25j * (p.kappa + p.gamma1 + p.gamma2)
    offset = p.nu2 / 2 + 0.25j * (p.kappa + p.gamma1 - p.gamma2)
    root = np.sqrt(complex(p.J) * epsilon / 2 + epsilon**2 / 4 + offset**2)
    return eigenvalues_of(np.diag([centre + root, centre - root]))


class JordanForm(BaseModel):
    """Similarity transform bringing an EP-tuned reciprocal pair to Jordan form."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    T: np.ndarray
    HJ: np.ndarray
    VJ: np.ndarray


JORDAN_T = 0.5 * np.array([[1.0, -1j], [-1j, 1.0]], dtype=np.complex128)
JORDAN_T_INV = np.array([[1.0, 1j], [1j, 1.0]], dtype=np.complex128)


def jordan_transform(p: TwoModeParams, config: Config = DEFAULT_CONFIG) -> JordanForm:
    """Bring the EP-tuned reciprocal pair to HJ = [[Omega, 2J], [0, Omega]].

    VJ is the image of a mode-1 frequency shift, T e11 T^-1.

    Raises:
        NotAtEP: If J (or nu2) is off the EP by more than 1e-10 kappa
    """
    j_ep = ep_condition(p.kappa, p.gamma1, p.gamma2)
    if abs(complex(p.J) - j_ep) > 1e-10 * p.kappa or abs(p.nu2) > 1e-10 * p.kappa:
        raise NotAtEP(f"J = {p.J} is not at the EP coupling {j_ep} (nu2 = {p.nu2})")
    htilde = reciprocal_htilde(p)
    hj = JORDAN_T @ htilde @ JORDAN_T_INV
    vj = JORDAN_T @ frequency_perturbation(2) @ JORDAN_T_INV
    return JordanForm(T=JORDAN_T.copy(), HJ=hj, VJ=vj)


def jordan_eigenvalue_estimate(p: TwoModeParams, epsilon: float) -> np.ndarray:
    """Leading small-eps eigenvalues at the EP, Omega[0] pm sqrt(-i eps J)."""
    centre = -0.25j * (p.kappa + p.gamma1 + p.gamma2)
    root = np.sqrt(-1j * epsilon * complex(p.J))
    return eigenvalues_of(np.diag([centre + root, centre - root]))
