import numpy as np
import pytest

from nhsense.catalog import get_preset, single_mode
from nhsense.core.errors import DuplicateTones, InvalidRate
from nhsense.sensing.fisher import (
    GaussianMoments,
    Tone,
    ToneSet,
    output_moments,
    per_tone_rate,
    qfi_multitone,
    qfi_single,
)
from nhsense.sensing.metrics import optimal_rate, snr


@pytest.mark.parametrize("name", ["fig2-recip-nogain", "fig2-nonrecip", "fig3-amplifier", "chiral"])
def test_fisher_matches_snr(name):
    model = get_preset(name)
    eps, tau = 1e-3, 4.0
    assert eps**2 * qfi_single(model, tau) == pytest.approx(snr(model, eps, tau), rel=1e-11)


def test_fisher_matches_snr_on_random_models(rng, random_model):
    eps, tau = 1e-3, 2.0
    for _ in range(1000):
        model = random_model(rng, int(rng.integers(1, 5)))
        assert eps**2 * qfi_single(model, tau) == pytest.approx(snr(model, eps, tau), rel=1e-11)


def test_fisher_matches_finite_difference(rng, random_model):
    h, tau = 1e-6, 2.0
    for _ in range(10):
        model = random_model(rng, 2)
        plus = output_moments(model, h, tau)
        minus = output_moments(model, -h, tau)
        du = (plus.u - minus.u) / (2 * h)
        expected = du @ np.linalg.inv(plus.W) @ du
        assert qfi_single(model, tau) == pytest.approx(expected, rel=1e-6)


def test_output_moments():
    model = single_mode(kappa=1.0, beta=2.0)
    moments = output_moments(model, 0.0, tau=3.0)
    # chi_11 = 2, so the output field is -beta.
    np.testing.assert_allclose(moments.u, [-np.sqrt(6.0) * 2.0, 0.0], atol=1e-12)
    np.testing.assert_allclose(moments.W, 0.5 * np.eye(2))
    with pytest.raises(InvalidRate):
        output_moments(model, 0.0, tau=0.0)


def test_moments_require_symmetric_covariance():
    with pytest.raises(ValueError):
        GaussianMoments(u=np.zeros(2), W=np.array([[1.0, 0.5], [0.0, 1.0]]), tau=1.0)


def test_tone_validation():
    with pytest.raises(ValueError):
        Tone(Delta=0.0, beta=-1.0)
    with pytest.raises(ValueError):
        ToneSet(tones=[])


def test_duplicate_tones():
    model = get_preset("fig2-nonrecip")
    tones = ToneSet.from_pairs([(0.0, 1.0), (0.0, 0.5)])
    with pytest.raises(DuplicateTones):
        qfi_multitone(model, tones, 1.0)


def test_single_tone_set_matches_single_tone():
    model = get_preset("fig2-nonrecip")
    tones = ToneSet.from_pairs([(model.Delta, model.beta)])
    assert qfi_multitone(model, tones, 2.0) == pytest.approx(qfi_single(model, 2.0), rel=1e-12)


def test_normalized_tones():
    model = get_preset("fig2-recip-nogain")
    tones = ToneSet.from_pairs([(-0.5, 1.0), (0.0, 2.0), (0.7, 0.3)]).normalized(model, 3.0)
    assert np.sum(tones.photon_numbers(model)) == pytest.approx(3.0, rel=1e-12)
    with pytest.raises(InvalidRate):
        ToneSet.from_pairs([(0.0, 0.0)]).normalized(model, 1.0)


@pytest.mark.parametrize("name", ["fig2-nonrecip", "fig2-recip-gain"])
def test_multitone_bound(rng, name):
    model = get_preset(name)
    tau = 5.0
    for _ in range(100):
        count = int(rng.integers(1, 6))
        detunings = np.sort(rng.uniform(-2.0, 2.0, count))
        pairs = [(float(d), float(b)) for d, b in zip(detunings, rng.uniform(0.1, 2.0, count), strict=True)]
        tones = ToneSet.from_pairs(pairs).normalized(model, 1.0)
        best = max(per_tone_rate(model, t.Delta)[1] for t in tones.tones)
        total = qfi_multitone(model, tones, tau)
        assert total <= tau / model.kappa**2 * best * (1 + 1e-12) + 1e-9


def test_per_tone_rate():
    model = get_preset("fig2-recip-gain")
    for delta in (-1.0, 0.0, 0.5):
        actual, optimal = per_tone_rate(model, delta)
        assert actual <= optimal * (1 + 1e-12)
    # At the model's own detuning with nbar = 1 the rate per photon is Gamma_opt.
    _, optimal = per_tone_rate(model, 0.0)
    assert optimal == pytest.approx(optimal_rate(model), rel=1e-9)
