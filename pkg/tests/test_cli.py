import json

import polars as pl
import pytest

from nhsense.cli import (
    EXIT_INVALID,
    EXIT_IO,
    EXIT_NUMERICAL,
    EXIT_OK,
    RunConfig,
    main,
    parse_grid,
    parse_tones,
)


def test_parse_grid():
    assert parse_grid("-2:2:401") == (-2.0, 2.0, 401)
    with pytest.raises(ValueError):
        parse_grid("0:1")
    with pytest.raises(ValueError):
        parse_grid("a:1:3")


def test_parse_tones():
    assert parse_tones("0:1,0.5:0.25") == [(0.0, 1.0), (0.5, 0.25)]
    with pytest.raises(ValueError):
        parse_tones("0.5")


def test_run_config_needs_one_source(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(command="metrics")
    with pytest.raises(ValueError):
        RunConfig(command="metrics", preset="chiral", model_path=tmp_path / "m.json")
    with pytest.raises(ValueError):
        RunConfig(command="metrics", model_path=tmp_path / "m.json", J=1.0)
    with pytest.raises(ValueError):
        RunConfig(command="sweep", preset="chiral", delta_grid=(1.0, 0.0, 5))
    assert RunConfig(command="catalog-list").preset is None


def test_catalog_list(capsys):
    assert main(["catalog-list"]) == EXIT_OK
    frame = pl.read_csv(capsys.readouterr().out.encode())
    assert "fig2-nonrecip" in frame["name"].to_list()


def test_catalog_list_json(capsys):
    assert main(["catalog-list", "--format", "json"]) == EXIT_OK
    names = [p["name"] for p in json.loads(capsys.readouterr().out)]
    assert "chiral" in names


def test_metrics(capsys):
    assert main(["metrics", "--preset", "fig2-nonrecip", "--epsilon", "0.01", "--tau", "2"]) == EXIT_OK
    frame = pl.read_csv(capsys.readouterr().out.encode())
    assert frame["Gamma_meas_per_kappa"][0] == pytest.approx(36.0, rel=1e-9)


def test_metrics_json_file(tmp_path):
    out = tmp_path / "metrics.json"
    assert main(["metrics", "--preset", "chiral", "--format", "json", "-o", str(out)]) == EXIT_OK
    record = json.loads(out.read_text())
    assert record["S_II_per_kappa"] == pytest.approx(0.5)


def test_missing_model_file(tmp_path):
    assert main(["metrics", "--model", str(tmp_path / "missing.json")]) == EXIT_IO


def test_unknown_preset():
    assert main(["metrics", "--preset", "nope"]) == EXIT_INVALID


def test_preset_and_model_are_exclusive(tmp_path):
    with pytest.raises(SystemExit):
        main(["metrics", "--preset", "chiral", "--model", str(tmp_path / "m.json")])


def test_unstable_model_file(tmp_path):
    path = tmp_path / "unstable.json"
    path.write_text(json.dumps({"H": [[0.0]], "Y": [[1.0]], "V": [[1.0]]}))
    assert main(["metrics", "--model", str(path)]) == EXIT_NUMERICAL


def test_sweep_is_reproducible(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (first, second):
        assert main(["sweep", "--preset", "fig2-recip-gain", "--delta=-1:1:21", "--epsilon", "0.01", "-o", str(out)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()
    frame = pl.read_csv(first)
    assert frame.height == 21
    assert frame.columns[0] == "Delta_per_kappa"


def test_sweep_with_fixed_photon_number(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--preset", "fig3-amplifier", "--delta=-1:1:11", "--nbar", "2", "-o", str(out)]) == EXIT_OK
    assert pl.read_csv(out)["nbar_tot"].to_list() == pytest.approx([2.0] * 11, rel=1e-12)


def test_spectrum_independent_of_coupling(tmp_path):
    frames = []
    for j in ("20", "50"):
        out = tmp_path / f"spectrum_{j}.csv"
        assert main(["spectrum", "--preset", "fig5-splitting", "--J", j, "-o", str(out)]) == EXIT_OK
        frames.append(pl.read_csv(out))
    assert frames[0].height == 2001
    assert frames[0]["P"].to_list() == pytest.approx(frames[1]["P"].to_list(), abs=1e-10)


def test_bath_opt(tmp_path):
    out = tmp_path / "bath.json"
    assert main(["bath-opt", "--preset", "fig2-recip-gain", "-o", str(out)]) == EXIT_OK
    payload = json.loads(out.read_text())
    realization = payload["realization"]
    assert realization["achieved_noise"] == pytest.approx(realization["target_min_noise"], rel=1e-9)
    assert "H" in payload["model"]


def test_bath_opt_rejects_csv():
    assert main(["bath-opt", "--preset", "chiral", "--format", "csv"]) == EXIT_INVALID


def test_bath_opt_rejects_thermal_model(tmp_path):
    path = tmp_path / "thermal.json"
    model = {"H": [[0.0, 0.2], [0.2, 0.0]], "Z": [[0.0], [0.3162]], "V": [[0.0, 0.5], [0.5, 0.0]]}
    path.write_text(json.dumps({**model, "nbar_th": {"waveguide": 0.5}}))
    out = tmp_path / "bath.json"
    assert main(["bath-opt", "--model", str(path), "-o", str(out)]) == EXIT_INVALID
    assert not out.exists()
    path.write_text(json.dumps(model))
    assert main(["bath-opt", "--model", str(path), "-o", str(out)]) == EXIT_OK


def test_qfi_with_tones(capsys):
    assert main(["qfi", "--preset", "fig2-nonrecip", "--tau", "3", "--tones", "0:0.5,0.25:0.5"]) == EXIT_OK
    frame = pl.read_csv(capsys.readouterr().out.encode())
    assert frame["F_single"][0] > 0
    assert frame["F_multitone"][0] > 0


def test_qfi_duplicate_tones():
    assert main(["qfi", "--preset", "fig2-nonrecip", "--tones", "0:1,0:1"]) == EXIT_INVALID


def test_simulate_writes_sidecar(tmp_path):
    out = tmp_path / "sim.csv"
    args = ["simulate", "--preset", "fig2-recip-nogain", "--n-traj", "4", "--tau", "0.05"]
    assert main([*args, "--initial-state", "stationary", "-o", str(out)]) == EXIT_OK
    frame = pl.read_csv(out)
    assert frame.columns == ["traj_index", "m_value"]
    assert frame.height == 4
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["n_traj"] == 4
    assert meta["config"]["initial_state"] == "stationary"


def test_simulate_step_too_large():
    assert main(["simulate", "--preset", "fig2-nonrecip", "--n-traj", "2", "--dt", "0.5"]) == EXIT_INVALID
