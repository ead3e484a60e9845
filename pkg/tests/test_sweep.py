import numpy as np
import pytest

from nhsense.catalog import get_preset
from nhsense.core.sweep import DetuningSweep

GRID = np.linspace(-2.0, 2.0, 401)


def _sweep(name, **kwargs):
    return DetuningSweep(model=get_preset(name), grid=GRID, epsilon=0.01, tau=1.0, **kwargs).run()


def test_columns():
    frame = _sweep("fig2-recip-nogain")
    assert frame.columns == ["Delta", "S", "S_bound_recip", "Gamma_meas", "Gamma_opt", "recip_rate_bound", "nbar_tot"]
    assert frame.height == GRID.size
    assert "directional_rate_bound" in _sweep("fig2-nonrecip").columns


def test_per_kappa_frame():
    model = get_preset("fig2-nonrecip")
    sweep = DetuningSweep(model=model.with_updates(kappa=2.0), grid=[-1.0, 0.0, 1.0], epsilon=0.01)
    frame = sweep.to_dataframe()
    assert frame.columns[0] == "Delta_per_kappa"
    assert "Gamma_meas_per_kappa" in frame.columns
    assert "directional_rate_bound_per_kappa" in frame.columns
    assert "S" in frame.columns
    np.testing.assert_allclose(frame["Delta_per_kappa"].to_numpy(), [-0.5, 0.0, 0.5])
    raw = sweep.run()
    np.testing.assert_allclose(frame["Gamma_meas_per_kappa"].to_numpy(), raw["Gamma_meas"].to_numpy() / 2.0)


def test_grid_validation():
    model = get_preset("fig2-recip-nogain")
    with pytest.raises(ValueError):
        DetuningSweep(model=model, grid=[])
    with pytest.raises(ValueError):
        DetuningSweep(model=model, grid=[0.0, 1.0, 1.0])
    with pytest.raises(ValueError):
        DetuningSweep(model=model, grid=[0.0], tau=0.0)


@pytest.mark.parametrize("name", ["fig2-recip-nogain", "fig2-recip-gain"])
def test_reciprocal_rate_bound_holds(name):
    frame = _sweep(name)
    gamma = frame["Gamma_opt"].to_numpy()
    bound = frame["recip_rate_bound"].to_numpy()
    np.testing.assert_allclose(bound, 16.0 * frame["nbar_tot"].to_numpy())
    assert np.all(gamma <= bound + 1e-9)


def test_gain_raises_signal_but_not_rate():
    nogain = _sweep("fig2-recip-nogain", nbar_tot=1.0)
    gain = _sweep("fig2-recip-gain", nbar_tot=1.0)
    assert gain["S"].max() > nogain["S"].max()
    assert gain["Gamma_opt"].max() <= 16.0 * (1 + 1e-9)
    assert nogain["Gamma_opt"].max() <= 16.0 * (1 + 1e-9)
    assert gain["Gamma_opt"].max() <= nogain["Gamma_opt"].max() * (1 + 1e-9)


def test_nonreciprocal_sensor_beats_bound():
    frame = _sweep("fig2-nonrecip")
    gamma = frame["Gamma_meas"].to_numpy()
    bound = frame["recip_rate_bound"].to_numpy()
    centre = int(np.argmin(np.abs(GRID)))
    assert gamma[centre] == pytest.approx(36.0 * frame["nbar_tot"][centre], rel=1e-9)
    above = np.flatnonzero(gamma > bound)
    assert centre in above
    # The violation holds on a contiguous run of grid points around resonance.
    assert above.size > 10
    run = above[(above >= centre - 5) & (above <= centre + 5)]
    assert run.size == 11


@pytest.mark.parametrize("name", ["fig2-recip-gain", "fig3-amplifier"])
def test_signal_power_bound(name):
    frame = _sweep(name)
    assert np.all(frame["S"].to_numpy() <= frame["S_bound_recip"].to_numpy() + 1e-12)


def test_amplifier_peak_signal_matches_ep_sensor():
    ep = _sweep("fig2-recip-gain", nbar_tot=1.0)["S"].max()
    amplifier = _sweep("fig3-amplifier", nbar_tot=1.0)["S"].max()
    assert 0.5 <= amplifier / ep <= 2.0


def test_fixed_photon_number():
    frame = _sweep("fig2-recip-nogain", nbar_tot=2.0)
    np.testing.assert_allclose(frame["nbar_tot"].to_numpy(), 2.0, rtol=1e-12)


def test_reoptimized_baths_reach_minimum_noise():
    frame = _sweep("fig2-nonrecip", reoptimize_baths=True)
    np.testing.assert_allclose(frame["Gamma_meas"].to_numpy(), frame["Gamma_opt"].to_numpy(), rtol=1e-8)
    fixed = _sweep("fig2-nonrecip")
    assert np.all(fixed["Gamma_meas"].to_numpy() <= fixed["Gamma_opt"].to_numpy() * (1 + 1e-9))
