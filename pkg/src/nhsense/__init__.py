"""Signal, noise and measurement-rate analysis of non-Hermitian coupled-mode sensors."""

__version__ = "0.1.0"

from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.model import SensorModel, ThermalOccupancy, build_htilde, load_model, validate
from nhsense.sensing.metrics import MetricsReport, metrics_report

__all__ = [
    "DEFAULT_CONFIG",
    "Config",
    "MetricsReport",
    "SensorModel",
    "ThermalOccupancy",
    "__version__",
    "build_htilde",
    "load_model",
    "metrics_report",
    "validate",
]
