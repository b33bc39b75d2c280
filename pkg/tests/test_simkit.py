"""
Tests for Monte Carlo fading paths and empirical prediction errors.
"""

import math

import numpy as np
import pytest

from src.modules import spectra
from src.modules.errors import InvalidParameterError
from src.modules.prediction import conditional_mmse_variance
from src.modules.simkit import (
    SimConfig,
    empirical_interpolation_variance,
    empirical_prediction_variance,
    generate_paths,
)


def test_paths_do_not_depend_on_workers(gauss_markov):
    cfg = SimConfig(model=gauss_markov, num_paths=600, path_len=6, seed=3)
    serial = generate_paths(cfg, jobs=1)
    threaded = generate_paths(cfg, jobs=4)
    np.testing.assert_array_equal(serial.fading, threaded.fading)
    np.testing.assert_array_equal(serial.noise, threaded.noise)
    assert serial.regularization == 0.0

    prefix = generate_paths(SimConfig(model=gauss_markov, num_paths=100, path_len=6, seed=3), jobs=1)
    np.testing.assert_allclose(prefix.fading, serial.fading[:100], rtol=1e-12, atol=1e-14)


def test_seed_changes_paths(gauss_markov):
    first = generate_paths(SimConfig(model=gauss_markov, num_paths=10, path_len=4, seed=1))
    second = generate_paths(SimConfig(model=gauss_markov, num_paths=10, path_len=4, seed=2))
    assert not np.allclose(first.fading, second.fading)


def test_sample_covariance(gauss_markov):
    batch = generate_paths(SimConfig(model=gauss_markov, num_paths=20000, path_len=2, seed=9))
    h = batch.fading
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.03)
    assert abs(np.mean(h[:, 1] * h[:, 0].conj()) - 0.9) < 0.03


def test_invalid_configurations(gauss_markov, block_gauss_markov):
    with pytest.raises(InvalidParameterError):
        SimConfig(model=gauss_markov, num_paths=0, path_len=4)
    with pytest.raises(InvalidParameterError):
        SimConfig(model=block_gauss_markov, num_paths=10, path_len=3)
    with pytest.raises(InvalidParameterError):
        SimConfig(model=gauss_markov, num_paths=10, path_len=4, snr=0.0)
    with pytest.raises(InvalidParameterError, match="insufficient samples"):
        empirical_prediction_variance(SimConfig(model=gauss_markov, num_paths=50, path_len=8), history_len=2)
    with pytest.raises(InvalidParameterError):
        empirical_prediction_variance(SimConfig(model=gauss_markov, num_paths=200, path_len=4), history_len=4)
    with pytest.raises(InvalidParameterError):
        empirical_interpolation_variance(SimConfig(model=gauss_markov, num_paths=200, path_len=4), 1, [0, 4])


def test_analytic_rows_match_markov_variances(block_gauss_markov):
    cfg = SimConfig(model=block_gauss_markov, num_paths=200, path_len=4, seed=1)
    rows = empirical_prediction_variance(cfg, history_len=1)
    assert [row.position for row in rows] == [0, 1]
    assert [row.analytic for row in rows] == pytest.approx([0.91, 0.36], rel=1e-12)


def test_analytic_rows_include_noise(gauss_markov):
    cfg = SimConfig(model=gauss_markov, num_paths=200, path_len=4, seed=1, snr=10.0)
    (row,) = empirical_prediction_variance(cfg, history_len=0)
    assert row.analytic == pytest.approx(1.1)


@pytest.mark.slow
@pytest.mark.parametrize("model", [
    spectra.scalar_gauss_markov(0.5),
    spectra.scalar_gauss_markov(0.9),
    spectra.block_gauss_markov_model(2, 0.3, 0.8),
])
@pytest.mark.parametrize("snr", [math.inf, 10.0])
def test_empirical_prediction_agrees_with_analytic(model, snr):
    cfg = SimConfig(model=model, num_paths=10_000, path_len=8, seed=17, snr=snr)
    for row in empirical_prediction_variance(cfg, history_len=4, jobs=2):
        assert abs(row.empirical - row.analytic) < 3.0 * row.stderr


def test_empirical_interpolation_agrees_with_analytic(gauss_markov):
    cfg = SimConfig(model=gauss_markov, num_paths=10_000, path_len=3, seed=4, snr=10.0)
    row = empirical_interpolation_variance(cfg, 1, [0, 2])
    assert row.analytic == pytest.approx(conditional_mmse_variance(gauss_markov, 1, [0, 2], 10.0))
    assert row.analytic < conditional_mmse_variance(gauss_markov, 1, [0], 10.0)
    assert abs(row.empirical - row.analytic) < 3.0 * row.stderr


@pytest.mark.parametrize("rho", [0.3, 0.8])
def test_empirical_pilot_error_scales_as_inverse_snr(rho):
    model = spectra.paired_block_model(rho)
    snrs = [1e2, 1e3, 1e4, 1e5]
    rows = [
        empirical_interpolation_variance(SimConfig(model=model, num_paths=10_000, path_len=3, seed=9, snr=snr), 1, [0, 2])
        for snr in snrs
    ]
    slope, _ = np.polyfit(np.log(snrs), np.log([row.empirical for row in rows]), 1)
    assert slope == pytest.approx(-1.0, abs=0.05)
