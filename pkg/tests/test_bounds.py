"""
Tests for the capacity lower and upper bounds.
"""

import inspect
import math

import numpy as np
import pytest

from src.modules import bounds, spectra
from src.modules.errors import DomainError, InvalidParameterError
from src.modules.highsnr import worst_case_spectrum
from src.modules.prediction import noisy_past_prediction_variance


def _random_spectrum(rng, alpha=0.0):
    """Random unit-power piecewise spectrum vanishing on |w| <= alpha/2."""
    start = alpha / 2.0
    edges = np.sort(rng.uniform(start, math.pi, int(rng.integers(1, 4))))
    cuts = [start, *edges, math.pi]
    levels = rng.uniform(0.0, 4.0, len(cuts) - 1)
    if alpha == 0.0:
        levels[rng.random(levels.size) < 0.3] = 0.0
        levels[-1] = max(levels[-1], 0.5)
    mass = sum((hi - lo) * lv for lo, hi, lv in zip(cuts[:-1], cuts[1:], levels)) / math.pi
    segments = [(lo, hi, lv / mass) for lo, hi, lv in zip(cuts[:-1], cuts[1:], levels)]
    if start > 0.0:
        segments.insert(0, (0.0, start, 0.0))
    return spectra.piecewise_spectrum(segments)


def test_memoryless_term():
    assert bounds.memoryless_term(1.0) == pytest.approx(math.e * 0.21938393439552029, rel=1e-12)
    # Laguerre branch against the small-SNR series S - S^2 + 2 S^3.
    assert bounds.memoryless_term(1e-3) == pytest.approx(1e-3 - 1e-6 + 2e-9, abs=1e-10)
    with pytest.raises(InvalidParameterError):
        bounds.memoryless_term(0.0)


def test_annulus_rate_domain():
    with pytest.raises(DomainError):
        bounds.annulus_rate_lower(10.0, 1.0)
    with pytest.raises(DomainError):
        bounds.annulus_rate_lower(0.0, 0.5)


def test_iid_fading_bounds():
    model = spectra.scalar_model(spectra.flat_spectrum())
    point = bounds.capacity_bound_point(model, 100.0)
    assert point.lower == 0.0
    assert "iid-component" in point.flags
    assert "relaxed-upper" in point.flags
    assert point.upper == pytest.approx(bounds.memoryless_term(100.0), abs=1e-12)


def test_lower_below_upper_on_random_models():
    rng = np.random.default_rng(11)
    for _ in range(50):
        model = spectra.scalar_model(_random_spectrum(rng, alpha=float(rng.choice([0.0, math.pi / 2.0, math.pi]))))
        snr = 10.0 ** rng.uniform(0.0, 8.0)
        assert bounds.capacity_lower(model, snr) <= bounds.capacity_upper(model, snr) + 1e-9


@pytest.mark.parametrize("alpha", [math.pi / 2.0, math.pi])
def test_universal_lower_holds_for_class(alpha):
    rng = np.random.default_rng(int(alpha * 1000))
    for _ in range(10):
        model = spectra.scalar_model(_random_spectrum(rng, alpha))
        for snr in (1e2, 1e4, 1e6):
            assert bounds.universal_lower(alpha, snr) <= bounds.capacity_lower(model, snr) + 1e-12


def test_worst_case_spectrum_attains_universal_lower(half_zero_model):
    for snr in (1e3, 1e6):
        assert bounds.capacity_lower(half_zero_model, snr) == pytest.approx(
            bounds.universal_lower(math.pi, snr), rel=1e-9
        )


def test_upper_side_information_grows_like_half_log_snr(half_zero_model):
    snr = 1e12
    side = bounds.capacity_upper(half_zero_model, snr) - bounds.memoryless_term(snr)
    assert side / math.log(snr) == pytest.approx(0.5, abs=0.02)


def test_lower_bound_ratio_increases_towards_prelog():
    ratios = [bounds.universal_lower(math.pi, snr) / math.log(snr) for snr in (1e4, 1e6, 1e8, 1e10)]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] < 0.5
    assert ratios[0] > 0.2


def test_flags_and_distribution(gauss_markov):
    point = bounds.capacity_bound_point(gauss_markov, 100.0, x_min=10.0)
    assert "x_min-above-annulus" in point.flags

    point = bounds.capacity_bound_point(gauss_markov, 1e6, distribution="log-uniform")
    assert "asymptotic-estimate" in point.flags
    assert point.lower > 0.0

    with pytest.raises(InvalidParameterError):
        bounds.capacity_lower(gauss_markov, 100.0, distribution="gaussian")


def test_x_min_beyond_peak_amplitude_rejected(gauss_markov):
    with pytest.raises(InvalidParameterError):
        bounds.capacity_lower(gauss_markov, 100.0, x_min=10.5)
    with pytest.raises(InvalidParameterError):
        bounds.capacity_bound_point(gauss_markov, 100.0, x_min=10.5)
    with pytest.raises(InvalidParameterError):
        bounds.universal_lower(math.pi, 100.0, x_min=11.0)
    with pytest.raises(InvalidParameterError):
        bounds.capacity_lower(gauss_markov, -1.0)


def test_upper_bound_takes_no_history(block_gauss_markov):
    assert "history_len" not in inspect.signature(bounds.capacity_upper).parameters
    point = bounds.capacity_bound_point(block_gauss_markov, 1e4, history_len=4)
    assert point.upper == bounds.capacity_upper(block_gauss_markov, 1e4)


def test_bound_point_carries_quadrature_error(gauss_markov, half_zero_model):
    point = bounds.capacity_bound_point(gauss_markov, 1e4)
    assert 0.0 <= point.quadrature_error < 1e-6
    assert bounds.capacity_bound_point(half_zero_model, 1e4).quadrature_error == 0.0


def test_strongly_correlated_gauss_markov_lower_bound_saturates():
    # Regular spectrum: the pilot variance tends to a floor, so the ratio to log SNR stays well below 1/2.
    snr, rho = 1e4, 0.99
    model = spectra.scalar_gauss_markov(rho)
    x_min = math.sqrt(snr) / 2.0
    q, noise = 1.0 - rho * rho, 1.0 / (x_min * x_min)
    riccati = 0.5 * (-q * (noise - 1.0) + math.sqrt(q * q * (noise - 1.0) ** 2 + 4.0 * q * noise))
    assert noisy_past_prediction_variance(model, x_min) == pytest.approx(riccati, rel=1e-6)

    ratio = bounds.capacity_lower(model, snr) / math.log(snr)
    assert ratio == pytest.approx(bounds.annulus_rate_lower(snr, riccati) / math.log(snr), rel=1e-6)
    assert ratio == pytest.approx(0.2687, abs=1e-3)


def test_low_snr_lower_bound_is_vacuous(gauss_markov):
    point = bounds.capacity_bound_point(gauss_markov, 1.0)
    assert point.lower == 0.0
    assert "vacuous" in point.flags


def test_block_model_bounds(block_gauss_markov):
    point = bounds.capacity_bound_point(block_gauss_markov, 1e4, history_len=64)
    assert len(point.per_symbol_lower) == 2
    assert len(point.side_information_terms) == 2
    assert 0.0 <= point.lower <= point.upper


def test_worst_case_lower_bound_value():
    snr = 1e4
    model = spectra.scalar_model(worst_case_spectrum(math.pi))
    variance = math.sqrt(2.0 + 4.0 / snr) * math.sqrt(4.0 / snr) - 4.0 / snr
    expected = -math.log(variance + 8.0 / (5.0 * snr)) + math.log1p(-variance) - bounds.ANNULUS_CONSTANT
    assert bounds.capacity_lower(model, snr) == pytest.approx(expected, rel=1e-12)
