import numpy as np
import pytest

from nhsense.catalog import (
    TwoModeParams,
    chiral_waveguide,
    directional_eigenvalues_closed_form,
    directional_two_mode,
    eigenvalues,
    ep_condition,
    ep_two_mode_frequency_sensor,
    get_preset,
    jordan_eigenvalue_estimate,
    jordan_transform,
    list_presets,
    reciprocal_two_mode,
    single_mode,
    splitting,
)
from nhsense.core.config import DEFAULT_CONFIG
from nhsense.core.errors import InvalidRate, NotAtEP, Unstable, UnstableEP, WrongDimension
from nhsense.core.model import validate
from nhsense.sensing.metrics import photon_number
from nhsense.sensing.response import susceptibility

EP_PARAMS = TwoModeParams(kappa=1.0, gamma1=-0.25, gamma2=0.25, J=0.125)


def test_preset_registry():
    names = [p.name for p in list_presets()]
    assert names == [
        "fig2-recip-nogain",
        "fig2-recip-gain",
        "fig2-nonrecip",
        "fig3-amplifier",
        "fig5-splitting",
        "chiral",
    ]


@pytest.mark.parametrize("preset", list_presets(), ids=lambda p: p.name)
def test_presets_are_normalized(preset):
    assert photon_number(preset.build()) == pytest.approx(1.0, rel=1e-12)


DIRECTIONAL_PARAMS = TwoModeParams(gamma1=1.0, gamma2=0.5, J=1.5)


@pytest.mark.parametrize(
    "build",
    [
        lambda: single_mode(gamma1=0.3),
        lambda: reciprocal_two_mode(TwoModeParams(gamma2=0.2, J=0.2)),
        lambda: reciprocal_two_mode(TwoModeParams(gamma2=-0.3, J=0.325), perturbation="frequency"),
        lambda: directional_two_mode(DIRECTIONAL_PARAMS, min_noise=True),
        lambda: directional_two_mode(DIRECTIONAL_PARAMS, min_noise=False),
        lambda: chiral_waveguide(),
        lambda: ep_two_mode_frequency_sensor(),
    ],
    ids=[
        "single_mode",
        "reciprocal",
        "reciprocal_frequency",
        "directional_min_noise",
        "directional_naive",
        "chiral",
        "ep_frequency_sensor",
    ],
)
def test_constructors_pass_validation(build):
    report = validate(build())
    assert report.ok, report.messages
    assert report.decomposition_residual <= DEFAULT_CONFIG.decomposition_tol


@pytest.mark.parametrize("preset", list_presets(), ids=lambda p: p.name)
def test_presets_pass_validation(preset):
    report = validate(preset.build())
    assert report.ok, report.messages
    assert report.decomposition_residual <= DEFAULT_CONFIG.decomposition_tol


def test_preset_errors():
    with pytest.raises(ValueError, match="unknown preset"):
        get_preset("fig9")
    with pytest.raises(ValueError, match="no parameter"):
        get_preset("chiral", J=1.0)


def test_preset_override():
    model = get_preset("fig5-splitting", J=50.0)
    assert model.H[0, 1] != get_preset("fig5-splitting").H[0, 1]


@pytest.mark.parametrize(
    "name, expected",
    [
        ("fig2-recip-nogain", [[10 / 9, -20j / 9], [-20j / 9, 50 / 9]]),
        ("fig2-nonrecip", [[1.0, -6j], [0.0, 4.0]]),
        ("chiral", [[1.0, -2 / np.sqrt(0.1)], [0.0, 2 / 0.1]]),
    ],
)
def test_preset_susceptibilities(name, expected):
    np.testing.assert_allclose(susceptibility(get_preset(name)).chi, expected, atol=1e-8)


def test_reciprocal_family_needs_real_coupling():
    with pytest.raises(ValueError, match="real J"):
        reciprocal_two_mode(TwoModeParams(gamma2=0.2, J=0.2 + 0.1j))


def test_single_mode_stability():
    with pytest.raises(Unstable):
        single_mode(kappa=1.0, gamma1=-1.5)


def test_chiral_rates_must_be_positive():
    with pytest.raises(InvalidRate):
        chiral_waveguide(gamma2=0.0)


def test_chiral_waveguide_is_passive():
    model = chiral_waveguide(gamma1=1.0, gamma2=0.3)
    assert model.n_gain == 0
    assert model.n_loss == 1
    assert susceptibility(model).chi[1, 0] == pytest.approx(0.0, abs=1e-12)


def test_ep_condition():
    assert ep_condition(1.0, 0.0, -0.3) == pytest.approx(0.325)
    with pytest.raises(UnstableEP):
        ep_condition(1.0, -1.0, -0.5)


def test_ep_sensor_eigenvalues_coalesce():
    values = eigenvalues(ep_two_mode_frequency_sensor())
    assert abs(values[0] - values[1]) < 1e-6
    np.testing.assert_allclose(values, [-0.25j, -0.25j], atol=1e-6)


def test_splitting_requires_two_modes():
    with pytest.raises(WrongDimension):
        splitting(single_mode())


def test_splitting_at_large_coupling():
    p = TwoModeParams(gamma1=0.5, gamma2=1.0, J=1e4, nu2=4.0)
    model = directional_two_mode(p, min_noise=False)
    # Unperturbed, the directional pair keeps its diagonal spectrum.
    assert splitting(model) == pytest.approx(4.0 + 0.25j, abs=1e-9)
    eps = 0.3
    ratio = abs(splitting(model, eps)) / np.sqrt(2 * 1e4 * eps)
    assert 0.99 <= ratio <= 1.01


@pytest.mark.parametrize("eps", [0.0, 0.05, 0.3])
def test_directional_closed_form(eps):
    p = TwoModeParams(gamma1=0.5, gamma2=1.0, J=2.0, nu2=0.3)
    model = directional_two_mode(p, min_noise=False)
    np.testing.assert_allclose(eigenvalues(model, eps), directional_eigenvalues_closed_form(p, eps), atol=1e-12)


@pytest.mark.parametrize("J", [0.0, 1.5, 20.0, 50.0])
def test_directional_spectrum_ignores_coupling(J):
    p = TwoModeParams(gamma1=0.5, gamma2=1.0, J=J, nu2=4.0)
    values = eigenvalues(directional_two_mode(p, min_noise=False))
    expected = directional_eigenvalues_closed_form(p)
    np.testing.assert_allclose(np.sort_complex(values), np.sort_complex(expected), atol=1e-12)
    np.testing.assert_allclose(np.sort_complex(values), [-0.75j, 4.0 - 0.5j], atol=1e-12)


def test_jordan_transform():
    form = jordan_transform(EP_PARAMS)
    omega = -0.25j * (EP_PARAMS.kappa + EP_PARAMS.gamma1 + EP_PARAMS.gamma2)
    np.testing.assert_allclose(form.HJ, [[omega, 2 * 0.125], [0.0, omega]], atol=1e-12)
    np.testing.assert_allclose(form.VJ, [[0.5, 0.5j], [-0.5j, 0.5]], atol=1e-15)


def test_jordan_form_keeps_spectrum():
    form = jordan_transform(EP_PARAMS)
    model = ep_two_mode_frequency_sensor()
    eps = 0.1
    np.testing.assert_allclose(
        np.sort_complex(np.linalg.eigvals(form.HJ + eps * form.VJ)),
        np.sort_complex(eigenvalues(model, eps)),
        atol=1e-10,
    )


def test_jordan_transform_off_ep():
    with pytest.raises(NotAtEP):
        jordan_transform(EP_PARAMS.model_copy(update={"J": 0.2}))


def test_square_root_splitting_near_ep():
    eps = 1e-6
    model = ep_two_mode_frequency_sensor()
    error = np.abs(eigenvalues(model, eps) - jordan_eigenvalue_estimate(EP_PARAMS, eps))
    assert np.all(error < 10 * eps)
