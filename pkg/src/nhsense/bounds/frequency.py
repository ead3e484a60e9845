"""Rate bound for sensing a frequency shift of the readout mode."""

from pydantic import Field

from nhsense.bounds.base import Bound
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import WrongPerturbation
from nhsense.core.model import SensorModel, frequency_perturbation, has_perturbation
from nhsense.sensing.metrics import f_chi, photon_number
from nhsense.sensing.response import chi_matrix


class FrequencyShiftBound(Bound):
    """Gamma <= 4 kappa nbar_tot f(chi_11) <= 16 kappa nbar_tot for V = e11."""

    name: str = "frequency_shift"
    columns: tuple[str, ...] = Field(default=("freq_shift_bound",))

    def check(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> None:
        if not has_perturbation(model, frequency_perturbation(model.mode_count), config):
            raise WrongPerturbation("frequency-shift bound needs V = e11")

    def reference(
        self,
        model: SensorModel,
        epsilon: float = 0.0,
        tau: float = 1.0,
        config: Config = DEFAULT_CONFIG,
    ) -> dict[str, float]:
        chi = chi_matrix(model, config=config)
        nbar = photon_number(model, config)
        return {"freq_shift_bound": 4.0 * model.kappa * nbar * f_chi(complex(chi[0, 0]))}
