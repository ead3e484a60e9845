"""Base class for fundamental bounds on sensing performance."""

from abc import ABC, abstractmethod

from pydantic import BaseModel, ConfigDict, Field

from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import ValidationFailure
from nhsense.core.model import SensorModel


class Bound(BaseModel, ABC):
    """A bound that holds for a structurally defined family of sensors."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(description="Bound identifier")
    columns: tuple[str, ...] = Field(default=(), description="Keys produced by evaluate()")

    @abstractmethod
    def check(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> None:
        """Verify the model belongs to the family the bound covers.

        Raises:
            ValidationFailure: A subclass naming the violated precondition
        """

    @abstractmethod
    def reference(
        self,
        model: SensorModel,
        epsilon: float = 0.0,
        tau: float = 1.0,
        config: Config = DEFAULT_CONFIG,
    ) -> dict[str, float]:
        """Evaluate the bound formula without checking applicability.

        Sweeps use this to draw a bound as a reference line next to sensors
        outside its family.

        Returns:
            Mapping of column name to value
        """

    def applies(self, model: SensorModel, config: Config = DEFAULT_CONFIG) -> bool:
        """True if :meth:`check` passes."""
        try:
            self.check(model, config)
        except ValidationFailure:
            return False
        return True

    def evaluate(
        self,
        model: SensorModel,
        epsilon: float = 0.0,
        tau: float = 1.0,
        config: Config = DEFAULT_CONFIG,
    ) -> dict[str, float]:
        """Check applicability, then evaluate.

        Args:
            model: Sensor model
            epsilon: Perturbation strength (signal bounds only)
            tau: Measurement time (signal bounds only)
            config: Tolerances

        Returns:
            Mapping of column name to value
        """
        self.check(model, config)
        return self.reference(model, epsilon, tau, config)
