"""Command-line interface.

Every subcommand loads one model (a named preset or a JSON file), computes a
table or record and writes it as CSV or JSON to ``--output`` or stdout.
Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 I/O failure.
"""

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np
import polars as pl
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from nhsense import __version__
from nhsense.catalog.presets import get_preset, list_presets
from nhsense.core.config import Config
from nhsense.core.errors import NumericalFailure
from nhsense.core.model import SensorModel, build_htilde, load_model, model_to_dict
from nhsense.core.sweep import DetuningSweep
from nhsense.dynamics.langevin import SimConfig, simulate_homodyne
from nhsense.exporters import CsvExporter, JsonExporter
from nhsense.sensing.bathopt import construct_min_noise
from nhsense.sensing.fisher import ToneSet, qfi_multitone, qfi_single
from nhsense.sensing.metrics import metrics_report
from nhsense.sensing.response import intensity_spectrum

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

Command = Literal["metrics", "sweep", "spectrum", "bath-opt", "qfi", "simulate", "catalog-list"]

DEFAULT_GRIDS: dict[str, str] = {
    "sweep": "-2:2:401",
    "spectrum": "-10:14:2001",
}
DEFAULT_FORMATS: dict[str, str] = {"bath-opt": "json"}


def parse_grid(spec: str) -> tuple[float, float, int]:
    """Parse ``start:stop:count`` into its parts."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like start:stop:count, got '{spec}'")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValueError(f"grid must look like start:stop:count, got '{spec}'") from exc


def parse_tones(spec: str) -> list[tuple[float, float]]:
    """Parse ``Delta:beta,Delta:beta,...`` into pairs."""
    pairs = []
    for item in spec.split(","):
        delta, sep, beta = item.partition(":")
        if not sep:
            raise ValueError(f"tone must look like Delta:beta, got '{item}'")
        pairs.append((float(delta), float(beta)))
    return pairs


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation.

    Detunings, rates and times are given in units of kappa (and 1/kappa).
    """

    model_config = ConfigDict(frozen=True, protected_namespaces=())

    command: Command
    preset: str | None = None
    model_path: Path | None = None
    J: float | None = None
    delta_grid: tuple[float, float, int] | None = None
    epsilon: float = 0.0
    tau: float = Field(default=1.0, gt=0)
    output: Path | None = None
    format: Literal["csv", "json"] = "csv"
    reoptimize_baths: bool = False
    nbar: float | None = Field(default=None, gt=0)
    tones: list[tuple[float, float]] | None = None
    seed: int = Field(default=0, ge=0)
    n_traj: int = Field(default=1000, ge=1)
    dt: float = Field(default=1e-3, gt=0)
    initial_state: Literal["vacuum", "stationary"] = "vacuum"

    @field_validator("delta_grid")
    @classmethod
    def validate_grid(cls, v: tuple[float, float, int] | None) -> tuple[float, float, int] | None:
        if v is None:
            return v
        start, stop, count = v
        if count < 1:
            raise ValueError(f"grid needs at least one point, got {count}")
        if count > 1 and not stop > start:
            raise ValueError(f"grid must be ascending, got {start}:{stop}")
        return v

    @model_validator(mode="after")
    def validate_source(self) -> "RunConfig":
        """Exactly one model source, except for catalog-list."""
        if self.command == "catalog-list":
            return self
        if (self.preset is None) == (self.model_path is None):
            raise ValueError("give exactly one of --preset or --model")
        if self.J is not None and self.preset is None:
            raise ValueError("--J only applies to presets")
        return self

    def grid(self, kappa: float) -> np.ndarray:
        """Detuning grid in absolute units."""
        start, stop, count = self.delta_grid or parse_grid(DEFAULT_GRIDS.get(self.command, "0:0:1"))
        return np.linspace(start, stop, count) * kappa

    def load(self) -> SensorModel:
        """Build or read the model."""
        if self.preset is not None:
            overrides: dict[str, Any] = {} if self.J is None else {"J": self.J}
            return get_preset(self.preset, **overrides)
        assert self.model_path is not None
        return load_model(self.model_path)


def _emit_table(frame: pl.DataFrame, cfg: RunConfig) -> None:
    if cfg.format == "csv":
        text = CsvExporter().render(frame)
    else:
        text = JsonExporter().render(frame)
    _write(text, cfg.output)


def _emit_record(payload: Any, cfg: RunConfig) -> None:
    if cfg.format == "csv" and isinstance(payload, dict):
        _emit_table(pl.DataFrame([payload]), cfg)
    else:
        _write(JsonExporter().render(payload), cfg.output)


def _write(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8", newline="")
        logger.info("wrote %s", output)


def _kappa_units(model: SensorModel, cfg: RunConfig) -> tuple[float, float]:
    # Command-line epsilon and tau are in units of kappa and 1/kappa.
    return cfg.epsilon * model.kappa, cfg.tau / model.kappa


def _run_metrics(cfg: RunConfig) -> None:
    model = cfg.load()
    epsilon, tau = _kappa_units(model, cfg)
    report = metrics_report(model, epsilon, tau)
    _emit_record(report.to_record(model.kappa), cfg)


def _run_sweep(cfg: RunConfig) -> None:
    model = cfg.load()
    epsilon, tau = _kappa_units(model, cfg)
    sweep = DetuningSweep(
        model=model,
        grid=cfg.grid(model.kappa),
        epsilon=epsilon,
        tau=tau,
        reoptimize_baths=cfg.reoptimize_baths,
        nbar_tot=cfg.nbar,
    )
    _emit_table(sweep.to_dataframe(), cfg)


def _run_spectrum(cfg: RunConfig) -> None:
    model = cfg.load()
    epsilon, _ = _kappa_units(model, cfg)
    spectrum = intensity_spectrum(model, cfg.grid(model.kappa), epsilon)
    logger.info("spectrum: %d resonance(s) at %s", spectrum.resonance_count, spectrum.resonance_detunings)
    _emit_table(spectrum.to_dataframe(), cfg)


def _run_bath_opt(cfg: RunConfig) -> None:
    if cfg.format != "json":
        raise ValueError("bath-opt writes JSON only")
    model = cfg.load()
    if not model.nbar_th.is_vacuum:
        raise ValueError("bath-opt constructs vacuum baths; the model has nonzero nbar_th")
    built, realization = construct_min_noise(build_htilde(model), model.kappa, model.Delta, model.V, model.beta)
    _emit_record({"model": model_to_dict(built), "realization": realization}, cfg)


def _run_qfi(cfg: RunConfig) -> None:
    model = cfg.load()
    _, tau = _kappa_units(model, cfg)
    record: dict[str, float] = {"tau_kappa": cfg.tau, "F_single": qfi_single(model, tau)}
    if cfg.tones is not None:
        tones = ToneSet.from_pairs([(d * model.kappa, b) for d, b in cfg.tones])
        record["F_multitone"] = qfi_multitone(model, tones, tau)
    _emit_record(record, cfg)


def _run_simulate(cfg: RunConfig) -> None:
    model = cfg.load()
    epsilon, tau = _kappa_units(model, cfg)
    sim = SimConfig(
        dt=cfg.dt / model.kappa,
        tau=tau,
        n_traj=cfg.n_traj,
        seed=cfg.seed,
        initial_state=cfg.initial_state,
    )
    ensemble = simulate_homodyne(model, epsilon, sim, Config.from_env())
    if cfg.format == "csv":
        _emit_table(ensemble.to_dataframe(), cfg)
        if cfg.output is not None:
            JsonExporter().export(ensemble.metadata(), cfg.output.with_suffix(".json"))
    else:
        _emit_record({"metadata": ensemble.metadata(), "m_value": ensemble.samples_m}, cfg)


def _run_catalog_list(cfg: RunConfig) -> None:
    rows = [
        {"name": p.name, "family": p.family, "description": p.description, "parameters": str(p.defaults)}
        for p in list_presets()
    ]
    if cfg.format == "csv":
        _emit_table(pl.DataFrame(rows), cfg)
    else:
        _write(JsonExporter().render([p.model_dump() for p in list_presets()]), cfg.output)


_HANDLERS = {
    "metrics": _run_metrics,
    "sweep": _run_sweep,
    "spectrum": _run_spectrum,
    "bath-opt": _run_bath_opt,
    "qfi": _run_qfi,
    "simulate": _run_simulate,
    "catalog-list": _run_catalog_list,
}


def run(cfg: RunConfig) -> int:
    """Execute one command and map failures to exit codes."""
    try:
        _HANDLERS[cfg.command](cfg)
    except NumericalFailure as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except np.linalg.LinAlgError as exc:
        logger.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError) as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_INVALID
    except OSError as exc:
        logger.error("I/O failure: %s", exc)
        return EXIT_IO
    return EXIT_OK


def _add_model_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--preset", help="Named preset, see catalog-list")
    source.add_argument("--model", dest="model_path", type=Path, help="Model JSON file")
    parser.add_argument("--J", type=float, help="Override the preset coupling J (units of kappa)")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", "-o", type=Path, help="Output file (default: stdout)")
    parser.add_argument("--format", choices=["csv", "json"], help="Output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nhsense",
        description="Signal, noise and measurement-rate analysis of non-Hermitian coupled-mode sensors.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--verbose", "-v", action="store_true", help="Log debug output to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    metrics = sub.add_parser("metrics", help="Signal, noise, rates and bounds at one detuning")
    sweep = sub.add_parser("sweep", help="Signal and rate table over a detuning grid")
    spectrum = sub.add_parser("spectrum", help="Output intensity P(Delta) over a detuning grid")
    bath = sub.add_parser("bath-opt", help="Minimum-noise bath realization of the model's H~")
    qfi = sub.add_parser("qfi", help="Quantum Fisher information, single- and multi-tone")
    simulate = sub.add_parser("simulate", help="Monte Carlo ensemble of the integrated homodyne current")
    sub.add_parser("catalog-list", help="List the named presets")

    for p in (metrics, sweep, spectrum, bath, qfi, simulate):
        _add_model_source(p)
        _add_output(p)
    for p in (metrics, sweep, spectrum, simulate):
        p.add_argument("--epsilon", type=float, default=0.0, help="Perturbation strength (units of kappa)")
    for p in (metrics, sweep, qfi, simulate):
        p.add_argument("--tau", type=float, default=1.0, help="Measurement time (units of 1/kappa)")
    for p in (sweep, spectrum):
        p.add_argument("--delta", dest="delta_grid", help="Detuning grid start:stop:count (units of kappa)")
    sweep.add_argument("--reoptimize-baths", action="store_true", help="Rebuild minimum-noise baths at each detuning")
    sweep.add_argument("--nbar", type=float, help="Hold the photon number fixed at this value along the grid")
    qfi.add_argument("--tones", help="Multi-tone drive as Delta:beta,Delta:beta,...")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--n-traj", type=int, default=1000)
    simulate.add_argument("--dt", type=float, default=1e-3, help="Time step (units of 1/kappa)")
    simulate.add_argument("--initial-state", choices=["vacuum", "stationary"], default="vacuum")

    catalog = sub.choices["catalog-list"]
    _add_output(catalog)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    """Convert parsed arguments into a RunConfig."""
    values = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    if "delta_grid" in values:
        values["delta_grid"] = parse_grid(values["delta_grid"])
    if "tones" in values:
        values["tones"] = parse_tones(values["tones"])
    values.setdefault("format", DEFAULT_FORMATS.get(args.command, "csv"))
    return RunConfig(**values)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point of the ``nhsense`` console script."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = config_from_args(args)
    except (ValidationError, ValueError) as exc:
        logger.error("invalid arguments: %s", exc)
        return EXIT_INVALID
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
