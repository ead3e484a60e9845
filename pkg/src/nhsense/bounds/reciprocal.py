"""Photon-number bound for reciprocal two-mode coupling sensors."""

from pydantic import Field

from nhsense.bounds.base import Bound
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import NotReciprocal, WrongPerturbation
from nhsense.core.model import (
    SensorModel,
    build_htilde,
    coupling_perturbation,
    has_perturbation,
    is_reciprocal,
)
from nhsense.sensing.metrics import photon_number, s_epsilon
from nhsense.sensing.response import chi_matrix


class ReciprocalRateBound(Bound):
    """S <= (1/4) S_eps |chi_11|^2 and Gamma <= 16 kappa nbar_tot.

    Holds for any reciprocal two-mode H~ perturbed through a symmetric change of
    the coupling, whatever the gain, loss or EP tuning.
    """

    name: str = "reciprocal"
    columns: tuple[str, ...] = Field(default=("S_bound_recip", "recip_rate_bound"))

    def check(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> None:
        if model.mode_count != 2 or not has_perturbation(model, coupling_perturbation(), config):
            raise WrongPerturbation("reciprocal bound needs a two-mode model with V = (e12 + e21) / 2")
        if not is_reciprocal(build_htilde(model), config):
            raise NotReciprocal("reciprocal bound needs |H~_12| = |H~_21|")

    def reference(
        self,
        model: SensorModel,
        epsilon: float = 0.0,
        tau: float = 1.0,
        config: Config = DEFAULT_CONFIG,
    ) -> dict[str, float]:
        chi = chi_matrix(model, config=config)
        nbar = photon_number(model, config)
        return {
            "S_bound_recip": 0.25 * s_epsilon(epsilon, tau, nbar) * abs(chi[0, 0]) ** 2,
            "recip_rate_bound": 16.0 * model.kappa * nbar,
        }
