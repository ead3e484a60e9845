"""Sensor data model: Hamiltonian, baths, waveguide, perturbation and drive."""

import json
import logging
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator

from nhsense.core import cmatrix as cm
from nhsense.core.config import DEFAULT_CONFIG, Config
from nhsense.core.errors import ShapeMismatch, Unstable

logger = logging.getLogger(__name__)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


def context_config(info: ValidationInfo) -> Config:
    """Config supplied through the pydantic validation context, if any."""
    context = info.context if isinstance(info.context, dict) else {}
    config = context.get("config", DEFAULT_CONFIG)
    if not isinstance(config, Config):
        raise TypeError(f"validation context 'config' must be a Config, got {type(config).__name__}")
    return config


def has_frequency_reference(h: np.ndarray, kappa: float, config: Config = DEFAULT_CONFIG) -> bool:
    """H[0,0] vanishes: drive detuning is measured from mode 1."""
    return bool(abs(h[0, 0]) <= config.hermitian_tol * max(cm.frobenius(h), kappa))


class ThermalOccupancy(BaseModel):
    """Thermal occupancies of the waveguide and of each gain / loss bath.

    Empty ``gain`` / ``loss`` tuples mean vacuum for every bath of that kind.
    """

    model_config = ConfigDict(frozen=True)

    waveguide: float = Field(default=0.0, ge=0)
    gain: tuple[float, ...] = ()
    loss: tuple[float, ...] = ()

    @field_validator("gain", "loss")
    @classmethod
    def validate_nonnegative(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        """Occupancies must be nonnegative."""
        if any(n < 0 for n in v):
            raise ValueError(f"thermal occupancies must be >= 0, got {v}")
        return v

    @property
    def is_vacuum(self) -> bool:
        return self.waveguide == 0 and not any(self.gain) and not any(self.loss)

    @staticmethod
    def _vector(values: tuple[float, ...], count: int, kind: str) -> np.ndarray:
        if not values:
            return np.zeros(count)
        if len(values) != count:
            raise ShapeMismatch(f"{kind} occupancies have length {len(values)}, expected {count}")
        return np.asarray(values, dtype=float)

    def gain_vector(self, count: int) -> np.ndarray:
        """Per-channel occupancy of the gain baths."""
        return self._vector(self.gain, count, "gain")

    def loss_vector(self, count: int) -> np.ndarray:
        """Per-channel occupancy of the loss baths."""
        return self._vector(self.loss, count, "loss")


class SensorModel(BaseModel):
    """Full description of a linear coupled-mode sensor.

    The effective Hamiltonian is never stored; it is rebuilt from the
    Hermitian part ``H``, the bath couplings ``Y`` (gain) and ``Z`` (loss),
    and the waveguide rate ``kappa`` by :func:`build_htilde`. Mode 1 (index 0)
    is the mode coupled to the readout waveguide.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    H: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    kappa: float = Field(gt=0)
    V: np.ndarray
    Delta: float = 0.0
    beta: float = Field(default=1.0, ge=0)
    nbar_th: ThermalOccupancy = Field(default_factory=ThermalOccupancy)
    htilde_reference: np.ndarray | None = Field(
        default=None, description="Independently supplied effective Hamiltonian, checked by validate()"
    )

    @model_validator(mode="before")
    @classmethod
    def coerce_arrays(cls, data: Any) -> Any:
        """Convert matrix fields to complex arrays; empty Y/Z become M x 0."""
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for key in ("H", "V"):
            if key in data:
                data[key] = _frozen(cm.as_cmat(data[key], key))
        m = data["H"].shape[0] if isinstance(data.get("H"), np.ndarray) else None
        for key in ("Y", "Z"):
            raw = data.get(key)
            arr = np.zeros((0,), dtype=np.complex128) if raw is None else np.array(raw, dtype=np.complex128)
            if arr.size == 0 and m is not None:
                arr = np.zeros((m, 0), dtype=np.complex128)
            elif arr.ndim == 1 and m is not None and arr.shape[0] == m:
                arr = arr.reshape(m, 1)
            data[key] = _frozen(cm.as_cmat(arr, key))
        if data.get("htilde_reference") is not None:
            data["htilde_reference"] = _frozen(cm.as_cmat(data["htilde_reference"], "htilde_reference"))
        return data

    @model_validator(mode="after")
    def validate_structure(self, info: ValidationInfo) -> "SensorModel":
        """Check shapes, Hermiticity and the frequency reference convention.

        Tolerances come from a ``Config`` passed as ``context={"config": ...}``
        to ``model_validate``, else from ``DEFAULT_CONFIG``.
        """
        config = context_config(info)
        m = cm.require_square(self.H, "H")
        if self.V.shape != (m, m):
            raise ShapeMismatch(f"V has shape {self.V.shape}, expected {(m, m)}")
        for name, mat in (("Y", self.Y), ("Z", self.Z)):
            if mat.shape[0] != m:
                raise ShapeMismatch(f"{name} has {mat.shape[0]} rows, expected {m}")
        if self.htilde_reference is not None and self.htilde_reference.shape != (m, m):
            raise ShapeMismatch(f"htilde_reference has shape {self.htilde_reference.shape}, expected {(m, m)}")
        cm.require_hermitian(self.H, "H", config)
        cm.require_hermitian(self.V, "V", config)
        if not has_frequency_reference(self.H, self.kappa, config):
            raise ValueError(
                f"frequency reference requires H[0,0] = 0 (drive detuning is measured "
                f"from mode 1), got {self.H[0, 0]}"
            )
        # Validates occupancy lengths against the bath counts.
        self.nbar_th.gain_vector(self.n_gain)
        self.nbar_th.loss_vector(self.n_loss)
        return self

    @property
    def mode_count(self) -> int:
        return int(self.H.shape[0])

    @property
    def n_gain(self) -> int:
        return int(self.Y.shape[1])

    @property
    def n_loss(self) -> int:
        return int(self.Z.shape[1])

    def with_updates(self, config: Config | None = None, **updates: Any) -> "SensorModel":
        """Return a validated copy with some fields replaced.

        Args:
            config: Tolerances for the checks; ``DEFAULT_CONFIG`` if omitted
            **updates: Field values to replace

        Returns:
            New SensorModel
        """
        values = {name: getattr(self, name) for name in type(self).model_fields}
        values.update(updates)
        return type(self).model_validate(values, context={"config": config or DEFAULT_CONFIG})


class ValidationReport(BaseModel):
    """Outcome of :func:`validate`."""

    decomposition_residual: float = Field(ge=0)
    stability_margin_found: float
    stable: bool
    reciprocal: bool
    messages: list[str] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        """Stable and free of structural or decomposition problems."""
        return self.stable and not self.messages


def dissipator(model: SensorModel) -> cm.CMat:
    """YY^dagger - ZZ^dagger - (kappa/2) e11, the anti-Hermitian part of H~ divided by i."""
    m = model.mode_count
    return cm.gram(model.Y) - cm.gram(model.Z) - (model.kappa / 2) * cm.basis_matrix(m)


def build_htilde(model: SensorModel, epsilon: float = 0.0) -> cm.CMat:
    """Effective Hamiltonian H~[eps] = H + eps V + i(YY^dagger - ZZ^dagger - kappa/2 e11)."""
    return model.H + epsilon * model.V + 1j * dissipator(model)


def eigenvalues_of(htilde: cm.CMat) -> np.ndarray:
    """Eigenvalues sorted by real part, then imaginary part."""
    values = np.linalg.eigvals(htilde)
    order = np.lexsort((values.imag, values.real))
    return values[order]


def stability_margin_of(htilde: cm.CMat) -> float:
    """-max_j Im(Omega_j): positive for a stable effective Hamiltonian."""
    return float(-np.max(np.linalg.eigvals(htilde).imag))


def require_stable(htilde: cm.CMat, config: Config = DEFAULT_CONFIG, scale: float = 1.0) -> None:
    """Raise Unstable unless every eigenvalue lies below -stability_margin * scale."""
    margin = stability_margin_of(htilde)
    if margin <= config.stability_margin * scale:
        raise Unstable(
            f"effective Hamiltonian is not stable: max Im(Omega) = {-margin:.6g} "
            f"(required < {-config.stability_margin * scale:.1e})"
        )


def require_stable_model(model: SensorModel, epsilon: float = 0.0, config: Config = DEFAULT_CONFIG) -> cm.CMat:
    """Build H~[eps], check stability and return it."""
    htilde = build_htilde(model, epsilon)
    require_stable(htilde, config, scale=model.kappa)
    return htilde


def is_reciprocal(htilde: cm.CMat, config: Config = DEFAULT_CONFIG) -> bool:
    """|H~_ij| = |H~_ji| for every pair of modes (trivially true for M = 1)."""
    mags = np.abs(htilde)
    return bool(np.max(np.abs(mags - mags.T)) <= config.hermitian_tol * cm.frobenius(htilde))


def validate(model: SensorModel, config: Config = DEFAULT_CONFIG) -> ValidationReport:
    """Check the bath decomposition identity, stability and reciprocity.

    Args:
        model: Sensor model
        config: Tolerances

    Returns:
        ValidationReport; never raises
    """
    messages: list[str] = []
    for name, mat in (("H", model.H), ("V", model.V)):
        if not cm.is_hermitian(mat, config):
            messages.append(f"{name} is not Hermitian within {config.hermitian_tol:.1e}")
    if not has_frequency_reference(model.H, model.kappa, config):
        messages.append(f"H[0,0] = {model.H[0, 0]} breaks the mode-1 frequency reference")
    htilde = model.htilde_reference if model.htilde_reference is not None else build_htilde(model)
    anti = (htilde - cm.dagger(htilde)) / 2j
    residual = cm.frobenius(anti - dissipator(model))
    if model.htilde_reference is not None:
        herm = (htilde + cm.dagger(htilde)) / 2
        herm_residual = cm.frobenius(herm - model.H)
        if herm_residual > config.hermitian_tol * max(cm.frobenius(htilde), model.kappa):
            messages.append(f"Hermitian part differs from supplied H~ by {herm_residual:.3e}")
        residual = float(np.hypot(residual, herm_residual))
    if residual > config.decomposition_tol * max(cm.frobenius(htilde), model.kappa):
        messages.append(f"bath decomposition residual {residual:.3e}")

    margin = stability_margin_of(htilde)
    stable = margin > config.stability_margin * model.kappa
    if not stable:
        messages.append(f"unstable: stability margin {margin:.6g}")
    reciprocal = is_reciprocal(htilde, config)
    logger.debug("validate: residual=%.3e margin=%.6g reciprocal=%s", residual, margin, reciprocal)
    return ValidationReport(
        decomposition_residual=residual,
        stability_margin_found=margin,
        stable=stable,
        reciprocal=reciprocal,
        messages=messages,
    )


def from_hamiltonian(
    htilde: object,
    kappa: float,
    V: object,
    Delta: float = 0.0,
    beta: float = 1.0,
    config: Config = DEFAULT_CONFIG,
) -> SensorModel:
    """Build a model with a naive bath realization of a given H~.

    The matrix (H~ - H~^dagger)/2i + (kappa/2) e11 is split into gain and loss
    parts by :func:`~nhsense.core.cmatrix.psd_split`. This is a valid
    realization but generally not the minimum-noise one.

    Raises:
        ShapeMismatch: If H~ is not square
        Unstable: If H~ has an eigenvalue on or above the real axis
    """
    ht = cm.as_cmat(htilde, "Htilde")
    m = cm.require_square(ht, "Htilde")
    require_stable(ht, config, scale=kappa)
    herm = (ht + cm.dagger(ht)) / 2
    target = (ht - cm.dagger(ht)) / 2j + (kappa / 2) * cm.basis_matrix(m)
    target = (target + cm.dagger(target)) / 2
    gain, loss = cm.psd_split(target, config)
    return SensorModel(
        H=herm,
        Y=cm.psd_factor(gain, config),
        Z=cm.psd_factor(loss, config),
        kappa=kappa,
        V=V,
        Delta=Delta,
        beta=beta,
    )


def normalize_drive(model: SensorModel, nbar: float = 1.0, config: Config = DEFAULT_CONFIG) -> SensorModel:
    """Return a copy whose drive amplitude gives ``nbar`` coherent photons.

    The photon number is evaluated at the model's detuning with eps = 0, as
    nbar_tot = (beta^2 / kappa) (chi^dagger chi)_11.

    Raises:
        Unstable: If the model is not stable
        ValueError: If ``nbar`` is negative
    """
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    htilde = require_stable_model(model, 0.0, config)
    m = model.mode_count
    chi = 1j * model.kappa * cm.inverse(model.Delta * np.eye(m) - htilde, config)
    weight = float(np.sum(np.abs(chi[:, 0]) ** 2))
    beta = float(np.sqrt(nbar * model.kappa / weight))
    logger.debug("normalize_drive: nbar=%g weight=%.6g beta=%.6g", nbar, weight, beta)
    return model.with_updates(beta=beta)


# JSON schema: complex entries as [re, im], matrices as row-major nested lists.

def _encode_matrix(a: np.ndarray) -> list[Any]:
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _decode_matrix(raw: Any, name: str) -> np.ndarray:
    arr = np.asarray(raw, dtype=float)
    if arr.size == 0:
        return np.zeros(arr.shape[:2] if arr.ndim >= 2 else (0,), dtype=np.complex128)
    if arr.ndim == 3 and arr.shape[-1] == 2:
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.ndim == 2:
        return arr.astype(np.complex128)
    raise ShapeMismatch(f"{name}: expected a matrix of numbers or [re, im] pairs, got shape {arr.shape}")


def model_to_dict(model: SensorModel) -> dict[str, Any]:
    """Serialize a model to the JSON schema (rates in units of kappa)."""
    out: dict[str, Any] = {
        "units": "kappa",
        "H": _encode_matrix(model.H),
        "Y": _encode_matrix(model.Y),
        "Z": _encode_matrix(model.Z),
        "kappa": model.kappa,
        "V": _encode_matrix(model.V),
        "Delta": model.Delta,
        "beta": model.beta,
        "nbar_th": model.nbar_th.model_dump(),
    }
    if model.htilde_reference is not None:
        out["Htilde"] = _encode_matrix(model.htilde_reference)
    return out


def model_from_dict(data: dict[str, Any], config: Config = DEFAULT_CONFIG) -> SensorModel:
    """Build a model from the JSON schema.

    ``units`` is ``"kappa"`` (default; kappa may be omitted and is then 1) or
    ``"absolute"`` (kappa required). ``Htilde``, when present, is kept as the
    reference checked by :func:`validate`.

    Raises:
        ValueError: On unknown units or a missing required field
    """
    units = data.get("units", "kappa")
    if units not in ("kappa", "absolute"):
        raise ValueError(f"units must be 'kappa' or 'absolute', got '{units}'")
    if "kappa" not in data and units == "absolute":
        raise ValueError("kappa is required when units is 'absolute'")
    for key in ("H", "V"):
        if key not in data:
            raise ValueError(f"model field '{key}' is required")
    fields: dict[str, Any] = {
        "H": _decode_matrix(data["H"], "H"),
        "V": _decode_matrix(data["V"], "V"),
        "Y": _decode_matrix(data.get("Y", []), "Y"),
        "Z": _decode_matrix(data.get("Z", []), "Z"),
        "kappa": float(data.get("kappa", 1.0)),
        "Delta": float(data.get("Delta", 0.0)),
        "beta": float(data.get("beta", 1.0)),
    }
    if "nbar_th" in data:
        fields["nbar_th"] = ThermalOccupancy(**data["nbar_th"])
    if "Htilde" in data:
        fields["htilde_reference"] = _decode_matrix(data["Htilde"], "Htilde")
    return SensorModel.model_validate(fields, context={"config": config})


def load_model(path: str | Path, config: Config = DEFAULT_CONFIG) -> SensorModel:
    """Read a model from a JSON file.

    Raises:
        OSError: If the file cannot be read
        ValueError: If the content is not valid JSON or not a valid model
    """
    text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: top-level JSON value must be an object")
    return model_from_dict(data, config)


def dump_model(model: SensorModel, path: str | Path) -> None:
    """Write a model to a JSON file."""
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def coupling_perturbation() -> cm.CMat:
    """Symmetric perturbation of the two-mode coupling, V = (e12 + e21) / 2."""
    return np.array([[0.0, 0.5], [0.5, 0.0]], dtype=np.complex128)


def frequency_perturbation(m: int) -> cm.CMat:
    """Frequency shift of mode 1, V = e11."""
    return cm.basis_matrix(m)


def has_perturbation(model: SensorModel, expected: cm.CMat, config: Config = DEFAULT_CONFIG) -> bool:
    """True if the model's V equals ``expected`` within hermitian_tol."""
    if model.V.shape != expected.shape:
        return False
    return cm.frobenius(model.V - expected) <= config.hermitian_tol * max(cm.frobenius(expected), 1.0)
