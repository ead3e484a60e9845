"""Configuration module for numerical tolerances and parallelism."""

import os

from pydantic import BaseModel, ConfigDict, Field

THREADS_ENV_VAR = "NHSENSE_THREADS"


class Config(BaseModel):
    """Numerical tolerances shared by every module.

    All tolerances are relative to the Frobenius norm of the matrix under test,
    except ``stability_margin`` which is in units of kappa.
    """

    model_config = ConfigDict(frozen=True)

    hermitian_tol: float = Field(default=1e-10, gt=0)
    psd_tol: float = Field(default=1e-10, gt=0)
    rank_tol: float = Field(default=1e-10, gt=0)
    cond_max: float = Field(default=1e12, gt=1)
    adjugate_det_threshold: float = Field(default=1e-8, gt=0)
    stability_margin: float = Field(default=1e-9, ge=0)
    decomposition_tol: float = Field(default=1e-9, gt=0)

    # Resonance detection, relative to the largest deviation from background
    resonance_prominence: float = Field(default=1e-2, ge=0)

    # Minimum-noise bath construction
    small_h11: float = Field(default=1e-12, gt=0)
    rho_scale: float = Field(default=1e-10, gt=0)

    threads: int = Field(default=0, ge=0)  # 0 = auto

    @classmethod
    def from_env(cls, **overrides: float | int) -> "Config":
        """Build a config, reading the thread cap from ``NHSENSE_THREADS``.

        Args:
            **overrides: Explicit field values, applied last

        Returns:
            Config instance

        Raises:
            ValueError: If the environment variable is not a nonnegative integer
        """
        values: dict[str, float | int] = {}
        raw = os.environ.get(THREADS_ENV_VAR)
        if raw is not None and raw.strip():
            try:
                values["threads"] = int(raw)
            except ValueError as exc:
                raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got '{raw}'") from exc
        values.update(overrides)
        return cls(**values)

    def worker_count(self) -> int:
        """Resolve the thread cap to a concrete worker count."""
        if self.threads > 0:
            return self.threads
        return os.cpu_count() or 1


DEFAULT_CONFIG = Config()
