"""Minimum-noise bath realizations of a given effective Hamiltonian.

For a fixed H~ the homodyne noise depends on how its anti-Hermitian part is
split into gain (YY^dagger) and loss (ZZ^dagger) couplings. The construction
here works in the "dressed" frame h = chi A chi^dagger, where
A = YY^dagger - ZZ^dagger, and chooses the split so that
(chi YY^dagger chi^dagger)_11 = max(h_11, 0), which is the smallest value
allowed and gives exactly the minimum noise at the chosen detuning.
"""

import logging

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import ConstructionFailed, NotPSD
from nhsense.core.model import SensorModel, build_htilde, from_hamiltonian, require_stable
from nhsense.sensing.metrics import min_noise_from_chi11, noise_psd_from_chi

logger = logging.getLogger(__name__)


class BathRealization(BaseModel):
    """Gain and loss couplings realizing an H~, with the noise they achieve."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    Y: np.ndarray
    Z: np.ndarray
    achieved_noise: float = Field(gt=0)
    target_min_noise: float = Field(gt=0)
    residual: float = Field(ge=0)
    regularized: bool = Field(default=False, description="True if the h11 ~ 0 regularizer was used")

    @property
    def n_gain(self) -> int:
        return int(self.Y.shape[1])

    @property
    def n_loss(self) -> int:
        return int(self.Z.shape[1])


def _anti_hermitian_target(htilde: cm.CMat, kappa: float) -> cm.CMat:
    # A = (H~ - H~^dagger)/2i + (kappa/2) e11 = YY^dagger - ZZ^dagger
    m = htilde.shape[0]
    a = (htilde - cm.dagger(htilde)) / 2j + (kappa / 2) * cm.basis_matrix(m)
    return (a + cm.dagger(a)) / 2


def _chi(htilde: cm.CMat, kappa: float, Delta: float, config: Config) -> cm.CMat:
    m = htilde.shape[0]
    return 1j * kappa * cm.inverse(Delta * np.eye(m) - htilde, config)


def h_matrix(htilde: object, kappa: float = 1.0, Delta: float = 0.0, config: Config = DEFAULT_CONFIG) -> cm.CMat:
    """Dressed dissipation matrix h = chi A chi^dagger.

    h_11 = (kappa/2)(|1 - chi_11|^2 - 1) for every realization of H~, so its
    sign tells whether the waveguide sees reflection gain.

    Args:
        htilde: Effective Hamiltonian
        kappa: Waveguide coupling rate
        Delta: Drive detuning
        config: Tolerances

    Returns:
        Hermitian M x M matrix

    Raises:
        Unstable: If H~ is not stable
    """
    ht = cm.as_cmat(htilde, "Htilde")
    cm.require_square(ht, "Htilde")
    require_stable(ht, config, scale=kappa)
    chi = _chi(ht, kappa, Delta, config)
    h = chi @ _anti_hermitian_target(ht, kappa) @ cm.dagger(chi)
    return (h + cm.dagger(h)) / 2


def bordered_matrix(h: cm.CMat, sign: float) -> cm.CMat:
    """X1 with first row/column sign * h_1i and diagonal padding M |h_1j|^2 / |h_11|.

    ``sign`` is +1 for the h11 > 0 case (X+1) and -1 for h11 < 0 (X-1). In both
    cases h - sign * X1 has vanishing first row and column.
    """
    m = h.shape[0]
    pivot = abs(h[0, 0].real)
    x = np.zeros((m, m), dtype=np.complex128)
    x[0, :] = sign * h[0, :]
    x[:, 0] = sign * h[:, 0]
    x[0, 0] = pivot
    for j in range(1, m):
        x[j, j] = m * abs(h[0, j]) ** 2 / pivot
    return x


def _split_remainder(remainder: cm.CMat, config: Config) -> tuple[cm.CMat, cm.CMat]:
    # Eigen-split the block without row/column 1, then re-embed with zero border.
    m = remainder.shape[0]
    plus = np.zeros((m, m), dtype=np.complex128)
    minus = np.zeros((m, m), dtype=np.complex128)
    if m == 1:
        return plus, minus
    block = remainder[1:, 1:]
    block = (block + cm.dagger(block)) / 2
    if cm.frobenius(block) > 0:
        block_plus, block_minus = cm.psd_split(block, config)
        plus[1:, 1:] = block_plus
        minus[1:, 1:] = block_minus
    return plus, minus


def _require_psd(name: str, x: cm.CMat, scale: float, config: Config) -> None:
    if x.size and cm.frobenius(x) > 0 and cm.min_eigenvalue(x, config) < -config.psd_tol * max(cm.frobenius(x), scale):
        raise ConstructionFailed(f"{name} is not positive semidefinite (min eigenvalue {cm.min_eigenvalue(x, config):.3e})")


def dressed_split(h: cm.CMat, kappa: float, config: Config = DEFAULT_CONFIG) -> tuple[cm.CMat, cm.CMat, bool]:
    """Split h into PSD parts X_Y - X_Z with (X_Y)_11 = max(h_11, 0).

    Returns:
        Tuple (X_Y, X_Z, regularized)

    Raises:
        ConstructionFailed: If a bordered matrix fails the PSD check
    """
    m = h.shape[0]
    norm = cm.frobenius(h)
    h11 = float(h[0, 0].real)
    border = float(np.max(np.abs(h[0, 1:]))) if m > 1 else 0.0
    regularized = False

    if abs(h11) <= config.small_h11 * norm:
        if border <= config.small_h11 * norm:
            # Decoupled readout mode: the rho -> 0 limit has no bordered part.
            logger.debug("dressed_split: h11 ~ 0 with vanishing border, no bordered term")
            x_plus, x_minus = _split_remainder(h - h[0, 0] * cm.basis_matrix(m), config)
            return x_plus, x_minus, False
        rho = config.rho_scale * max(norm, kappa)
        logger.debug("dressed_split: h11 = %.3e ~ 0, regularizing with rho = %.3e", h11, rho)
        h = h + rho * cm.basis_matrix(m)
        h11 += rho
        regularized = True

    if h11 < 0:
        logger.debug("dressed_split: h11 = %.6g < 0 (no reflection gain)", h11)
        x1 = bordered_matrix(h, -1.0)
        _require_psd("X-1", x1, norm, config)
        x_plus2, x_minus2 = _split_remainder(h + x1, config)
        x_gain, x_loss = x_plus2, x1 + x_minus2
    else:
        logger.debug("dressed_split: h11 = %.6g > 0 (reflection gain)", h11)
        x1 = bordered_matrix(h, 1.0)
        _require_psd("X+1", x1, norm, config)
        x_plus2, x_minus2 = _split_remainder(h - x1, config)
        x_gain, x_loss = x1 + x_plus2, x_minus2

    if regularized:
        # Compensate the rho e11 shift on the loss side so X_Y - X_Z = h exactly.
        x_loss = x_loss + config.rho_scale * max(norm, kappa) * cm.basis_matrix(m)
    return x_gain, x_loss, regularized


def construct_min_noise(
    htilde: object,
    kappa: float,
    Delta: float = 0.0,
    V: object | None = None,
    beta: float = 1.0,
    config: Config = DEFAULT_CONFIG,
) -> tuple[SensorModel, BathRealization]:
    """Build a bath realization of H~ that reaches the minimum noise at ``Delta``.

    Args:
        htilde: Effective Hamiltonian (H~_11 must have zero real part)
        kappa: Waveguide coupling rate
        Delta: Drive detuning the noise is minimized at
        V: Perturbation matrix carried into the model; zeros if omitted
        beta: Drive amplitude carried into the model
        config: Tolerances

    Returns:
        Tuple (model, realization)

    Raises:
        Unstable: If H~ is not stable
        ConstructionFailed: If the intermediate PSD check fails
    """
    ht = cm.as_cmat(htilde, "Htilde")
    m = cm.require_square(ht, "Htilde")
    h = h_matrix(ht, kappa, Delta, config)
    x_gain, x_loss, regularized = dressed_split(h, kappa, config)

    # Map back from the dressed frame: G = chi^-1 X chi^-dagger.
    resolvent = Delta * np.eye(m) - ht
    gain = resolvent @ x_gain @ cm.dagger(resolvent) / kappa**2
    loss = resolvent @ x_loss @ cm.dagger(resolvent) / kappa**2
    gain = (gain + cm.dagger(gain)) / 2
    loss = (loss + cm.dagger(loss)) / 2
    try:
        y = cm.psd_factor(gain, config)
        z = cm.psd_factor(loss, config)
    except NotPSD as exc:
        raise ConstructionFailed(f"bath factorization failed: {exc}") from exc

    model = SensorModel(
        H=(ht + cm.dagger(ht)) / 2,
        Y=y,
        Z=z,
        kappa=kappa,
        V=np.zeros((m, m)) if V is None else V,
        Delta=Delta,
        beta=beta,
    )
    residual = cm.frobenius(build_htilde(model) - ht)
    chi = _chi(ht, kappa, Delta, config)
    realization = BathRealization(
        Y=model.Y,
        Z=model.Z,
        achieved_noise=noise_psd_from_chi(model, chi),
        target_min_noise=min_noise_from_chi11(kappa, complex(chi[0, 0])),
        residual=residual,
        regularized=regularized,
    )
    logger.debug(
        "construct_min_noise: N_Y=%d N_Z=%d achieved=%.12g target=%.12g residual=%.3e",
        realization.n_gain,
        realization.n_loss,
        realization.achieved_noise,
        realization.target_min_noise,
        residual,
    )
    return model, realization


def random_realization(
    htilde: object,
    kappa: float,
    seed: int,
    V: object | None = None,
    scale: float = 1.0,
    config: Config = DEFAULT_CONFIG,
) -> SensorModel:
    """Naive realization of H~ with a random PSD matrix K added to both baths.

    K = R R^dagger with R a complex Gaussian M x M matrix whose entries have
    variance ``scale * |H~|_F / M``. Adding K to both YY^dagger and ZZ^dagger
    leaves H~ unchanged and can only add noise.

    Raises:
        Unstable: If H~ is not stable
    """
    ht = cm.as_cmat(htilde, "Htilde")
    m = cm.require_square(ht, "Htilde")
    base = from_hamiltonian(ht, kappa, np.zeros((m, m)) if V is None else V, config=config)
    if scale == 0:
        return base
    rng = np.random.default_rng(seed)
    std = np.sqrt(scale * cm.frobenius(ht) / m / 2)
    r = std * (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))
    k = r @ cm.dagger(r)
    gain = cm.gram(base.Y) + k
    loss = cm.gram(base.Z) + k
    return base.with_updates(
        Y=cm.psd_factor((gain + cm.dagger(gain)) / 2, config),
        Z=cm.psd_factor((loss + cm.dagger(loss)) / 2, config),
    )
