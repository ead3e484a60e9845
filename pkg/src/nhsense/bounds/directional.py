"""Rate bound for fully directional two-mode sensors."""

from pydantic import Field

from nhsense.bounds.base import Bound
from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import NotDirectional, WrongDimension
from nhsense.core.model import SensorModel
from nhsense.sensing.metrics import photon_number
from nhsense.sensing.response import chi_matrix


class DirectionalRateBound(Bound):
    """Gamma <= kappa nbar_tot |chi_12|^2 when chi_21 = 0."""

    name: str = "directional"
    columns: tuple[str, ...] = Field(default=("directional_rate_bound",))

    def check(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> None:
        if model.mode_count != 2:
            raise WrongDimension(f"directional bound needs M = 2, got {model.mode_count}")
        chi = chi_matrix(model, config=config)
        if abs(chi[1, 0]) > config.hermitian_tol * cm.frobenius(chi):
            raise NotDirectional(f"chi_21 = {chi[1, 0]:.3e} does not vanish")

    def reference(
        self,
        model: SensorModel,
        epsilon: float = 0.0,
        tau: float = 1.0,
        config: Config = DEFAULT_CONFIG,
    ) -> dict[str, float]:
        chi = chi_matrix(model, config=config)
        nbar = photon_number(model, config)
        return {"directional_rate_bound": model.kappa * nbar * abs(chi[0, 1]) ** 2}
