"""Time-domain simulation of the driven sensor and its homodyne record.

The quantum Langevin equations are linear, so a c-number stochastic
simulation with complex Gaussian noises of variance (n + 1/2) per channel
reproduces every symmetrized moment of the output. Gain channels enter
through the conjugated noise variable, mirroring the C^dagger input operator.

Each trajectory owns a Philox generator keyed by ``seed ^ index`` and
trajectories are processed in fixed-size blocks, so results are bit-identical
for any number of worker threads.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
import polars as pl
import scipy.linalg
from pydantic import BaseModel, ConfigDict, Field

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import StepTooLarge, ZeroResponse
from nhsense.core.model import SensorModel, build_htilde, require_stable_model, stability_margin_of
from nhsense.sensing.response import chi_matrix, homodyne_phase

logger = logging.getLogger(__name__)

SETTLE_MARGINS = 20.0
STEP_FRACTION = 0.01


class SimConfig(BaseModel):
    """Monte Carlo settings.

    ``t_settle`` defaults to 20 / stability margin for a vacuum start and to 0
    for a stationary start. ``phase`` defaults to the optimal homodyne phase.
    """

    model_config = ConfigDict(frozen=True)

    dt: float = Field(gt=0)
    tau: float = Field(gt=0)
    n_traj: int = Field(ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    t_settle: float | None = Field(default=None, ge=0)
    initial_state: Literal["vacuum", "stationary"] = "vacuum"
    phase: float | None = None
    block_size: int = Field(default=1024, ge=1)
    chunk_steps: int = Field(default=256, ge=1)


class HomodyneEnsemble(BaseModel):
    """Integrated homodyne currents m(tau), one per trajectory."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    samples_m: np.ndarray
    epsilon: float
    config: SimConfig
    phase: float
    t_settle: float = Field(ge=0)
    kappa: float = Field(gt=0)

    @property
    def n_traj(self) -> int:
        return int(self.samples_m.size)

    def to_dataframe(self) -> pl.DataFrame:
        """Table with columns (traj_index, m_value)."""
        return pl.DataFrame(
            {
                "traj_index": np.arange(self.n_traj, dtype=np.int64),
                "m_value": self.samples_m,
            }
        )

    def metadata(self) -> dict[str, object]:
        """Settings needed to reproduce the ensemble."""
        return {
            "epsilon": self.epsilon,
            "phase": self.phase,
            "t_settle": self.t_settle,
            "kappa": self.kappa,
            "n_traj": self.n_traj,
            "config": self.config.model_dump(),
        }


def steady_state_amplitudes(model: SensorModel, epsilon: float = 0.0, config: Config = DEFAULT_CONFIG) -> np.ndarray:
    """Steady-state mode amplitudes alpha = -i (beta / sqrt(kappa)) chi~[0; Delta; eps] e1."""
    chi = chi_matrix(model, epsilon=epsilon, config=config)
    return -1j * model.beta / np.sqrt(model.kappa) * chi[:, 0]


def _generator(model: SensorModel, epsilon: float) -> np.ndarray:
    # d alpha / dt = A alpha + drive, A = i(Delta - H~[eps])
    htilde = build_htilde(model, epsilon)
    return 1j * (model.Delta * np.eye(model.mode_count) - htilde)


def evolve_mean(
    model: SensorModel,
    epsilon: float,
    t_grid: np.ndarray | list[float],
    config: Config = DEFAULT_CONFIG,
) -> np.ndarray:
    """Mean amplitudes alpha(t) from alpha(0) = 0 under the coherent drive.

    Integrated exactly: the deviation from steady state is propagated by
    expm(A dt) between successive grid points.

    Returns:
        Array of shape (len(t_grid), M)

    Raises:
        ValueError: If the grid is empty, negative or decreasing
        Unstable: If H~[eps] is unstable
    """
    times = np.asarray(t_grid, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] < 0 or np.any(np.diff(times) < 0):
        raise ValueError("t_grid must be a nonempty, nondecreasing sequence starting at t >= 0")
    require_stable_model(model, epsilon, config)
    a = _generator(model, epsilon)
    alpha_ss = steady_state_amplitudes(model, epsilon, config)
    out = np.empty((times.size, model.mode_count), dtype=np.complex128)
    deviation = -alpha_ss
    previous = 0.0
    for k, t in enumerate(times):
        if t > previous:
            deviation = scipy.linalg.expm(a * (t - previous)) @ deviation
            previous = t
        out[k] = alpha_ss + deviation
    return out


def noise_diffusion(model: SensorModel) -> cm.CMat:
    """Diffusion matrix D of the fluctuations, symmetrized convention.

    D = kappa (n_B + 1/2) e11 + 2 Y diag(n_C + 1/2) Y^dagger + 2 Z diag(n_D + 1/2) Z^dagger
    """
    occ = model.nbar_th
    m = model.mode_count
    d = model.kappa * (occ.waveguide + 0.5) * cm.basis_matrix(m)
    d += 2 * (model.Y * (occ.gain_vector(model.n_gain) + 0.5)) @ cm.dagger(model.Y)
    d += 2 * (model.Z * (occ.loss_vector(model.n_loss) + 0.5)) @ cm.dagger(model.Z)
    return d


def stationary_covariance(model: SensorModel, epsilon: float = 0.0, config: Config = DEFAULT_CONFIG) -> cm.CMat:
    """Symmetrized fluctuation covariance <da da^dagger> in steady state.

    Solves A S + S A^dagger + D = 0 with A = i(Delta - H~[eps]).
    """
    require_stable_model(model, epsilon, config)
    a = _generator(model, epsilon)
    sigma = scipy.linalg.solve_continuous_lyapunov(a, -noise_diffusion(model))
    return (sigma + cm.dagger(sigma)) / 2


def max_step(model: SensorModel, epsilon: float = 0.0) -> float:
    """Largest admissible time step, 0.01 / max(|Delta - H~[eps]|_2, kappa)."""
    scale = max(float(np.linalg.norm(_generator(model, epsilon), 2)), model.kappa)
    return STEP_FRACTION / scale


def default_settle_time(model: SensorModel, sim: SimConfig, config: Config = DEFAULT_CONFIG) -> float:
    """Settling time used when ``sim.t_settle`` is not given."""
    if sim.t_settle is not None:
        return sim.t_settle
    if sim.initial_state == "stationary":
        return 0.0
    margin = stability_margin_of(require_stable_model(model, 0.0, config))
    return SETTLE_MARGINS / margin


class _Integrator:
    """Exact-drift Euler-Maruyama stepper shared by all trajectory blocks."""

    def __init__(self, model: SensorModel, epsilon: float, sim: SimConfig, phase: float, t_settle: float, config: Config):
        m = model.mode_count
        a = _generator(model, epsilon)
        self.sim = sim
        self.kappa = model.kappa
        self.beta = model.beta
        self.phase_factor = np.exp(1j * phase)
        self.propagator_t = scipy.linalg.expm(a * sim.dt).T
        drive = np.zeros(m, dtype=np.complex128)
        drive[0] = -1j * np.sqrt(model.kappa) * model.beta
        self.offset = np.linalg.solve(a, (self.propagator_t.T - np.eye(m)) @ drive)

        occ = model.nbar_th
        self.n_gain = model.n_gain
        self.n_channels = 1 + model.n_gain + model.n_loss
        occupancies = np.concatenate(
            [[occ.waveguide], occ.gain_vector(model.n_gain), occ.loss_vector(model.n_loss)]
        )
        self.noise_scale = np.sqrt((occupancies + 0.5) * sim.dt)
        self.waveguide_coupling = np.zeros(m, dtype=np.complex128)
        self.waveguide_coupling[0] = -1j * np.sqrt(model.kappa)
        self.gain_coupling_t = (-1j * np.sqrt(2) * model.Y).T
        self.loss_coupling_t = (-1j * np.sqrt(2) * model.Z).T

        self.n_settle = int(round(t_settle / sim.dt))
        self.n_measure = int(round(sim.tau / sim.dt))
        self.alpha_ss = steady_state_amplitudes(model, epsilon, config)
        self.initial_factor: np.ndarray | None = None
        if sim.initial_state == "stationary":
            u, values = cm.herm_eig(stationary_covariance(model, epsilon, config), config)
            self.initial_factor = u * np.sqrt(np.clip(values, 0.0, None))

    def _complex_normals(self, rng: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
        # Circular complex Gaussian with E|z|^2 = 1.
        raw = rng.standard_normal((*shape, 2))
        return (raw[..., 0] + 1j * raw[..., 1]) / np.sqrt(2)

    def run_block(self, indices: np.ndarray) -> np.ndarray:
        sim = self.sim
        m = self.propagator_t.shape[0]
        generators = [np.random.Generator(np.random.Philox(key=sim.seed ^ int(i))) for i in indices]
        nb = len(indices)

        state = np.zeros((nb, m), dtype=np.complex128)
        if self.initial_factor is not None:
            draws = np.stack([self._complex_normals(g, (m,)) for g in generators])
            state = self.alpha_ss + draws @ self.initial_factor.T

        total = self.n_settle + self.n_measure
        m_values = np.zeros(nb)
        step = 0
        while step < total:
            k = min(sim.chunk_steps, total - step)
            noise = np.stack([self._complex_normals(g, (k, self.n_channels)) for g in generators])
            noise *= self.noise_scale
            waveguide = noise[..., 0]
            gain = np.conj(noise[..., 1 : 1 + self.n_gain])
            loss = noise[..., 1 + self.n_gain :]
            injected = (
                waveguide[..., None] * self.waveguide_coupling
                + gain @ self.gain_coupling_t
                + loss @ self.loss_coupling_t
            )

            readout = np.empty((nb, k), dtype=np.complex128)
            for s in range(k):
                readout[:, s] = state[:, 0]
                state = state @ self.propagator_t + self.offset + injected[:, s, :]

            start = max(self.n_settle - step, 0)
            if start < k:
                # B_out dt = beta dt + dB_in - i sqrt(kappa) a_1 dt
                field = self.beta * sim.dt + waveguide[:, start:] - 1j * np.sqrt(self.kappa) * readout[:, start:] * sim.dt
                m_values += np.sqrt(2 * self.kappa) * np.real(self.phase_factor * field).sum(axis=1)
            step += k
        return m_values


def simulate_homodyne(
    model: SensorModel,
    epsilon: float,
    sim: SimConfig,
    config: Config = DEFAULT_CONFIG,
) -> HomodyneEnsemble:
    """Monte Carlo ensemble of the integrated homodyne current.

    Each trajectory integrates the Langevin equations for t_settle + tau and
    accumulates m = integral of I dt over the last tau.

    Args:
        model: Sensor model
        epsilon: Perturbation strength
        sim: Simulation settings
        config: Tolerances and thread cap

    Returns:
        HomodyneEnsemble

    Raises:
        Unstable: If H~[eps] is unstable
        StepTooLarge: If sim.dt exceeds :func:`max_step`
    """
    require_stable_model(model, epsilon, config)
    limit = max_step(model, epsilon)
    if sim.dt > limit:
        raise StepTooLarge(f"dt = {sim.dt:.3e} exceeds the stable step {limit:.3e}")

    if sim.phase is not None:
        phase = sim.phase
    else:
        try:
            phase = homodyne_phase(model, config)
        except ZeroResponse:
            logger.debug("simulate_homodyne: zero response, homodyne phase set to 0")
            phase = 0.0
    t_settle = default_settle_time(model, sim, config)
    integrator = _Integrator(model, epsilon, sim, phase, t_settle, config)

    blocks = [
        np.arange(start, min(start + sim.block_size, sim.n_traj))
        for start in range(0, sim.n_traj, sim.block_size)
    ]
    workers = min(config.worker_count(), len(blocks))
    logger.debug(
        "simulate_homodyne: eps=%g n_traj=%d blocks=%d workers=%d steps=%d+%d",
        epsilon,
        sim.n_traj,
        len(blocks),
        workers,
        integrator.n_settle,
        integrator.n_measure,
    )
    if workers <= 1:
        results = [integrator.run_block(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(integrator.run_block, blocks))

    return HomodyneEnsemble(
        samples_m=np.concatenate(results),
        epsilon=epsilon,
        config=sim,
        phase=phase,
        t_settle=t_settle,
        kappa=model.kappa,
    )


def steady_signal(model: SensorModel, epsilon: float, tau: float, phase: float | None = None, config: Config = DEFAULT_CONFIG) -> float:
    """Exact steady-state signal (<m>_eps - <m>_0)^2, including nonlinear response in eps.

    Agrees with the linear-response signal power to leading order in eps.
    """
    phi = homodyne_phase(model, config) if phase is None else phase
    chi_0 = chi_matrix(model, config=config)[0, 0]
    chi_eps = chi_matrix(model, epsilon=epsilon, config=config)[0, 0]
    shift = model.beta * (chi_0 - chi_eps)
    return float((tau * np.sqrt(2 * model.kappa) * (np.exp(1j * phi) * shift).real) ** 2)
