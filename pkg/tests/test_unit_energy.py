"""
Tests for capacity per unit energy: subset scans, closed forms, crossovers
and the small- and large-SNR approximations.
"""

import math

import pytest

from src.modules import spectra, unit_energy
from src.modules.errors import InvalidParameterError


@pytest.mark.parametrize("T", [1, 2, 4])
@pytest.mark.parametrize("snr", [0.1, 1.0, 10.0, 100.0])
def test_independent_constant_blocks(T, snr):
    model = spectra.constant_within_block(T, spectra.flat_spectrum())
    scan = unit_energy.cp_scan(model, snr)
    assert scan.cp == pytest.approx(unit_energy.cp_block_indep_constant(T, snr), abs=1e-6)
    assert scan.argmin == [(1 << T) - 1]
    assert scan.advisories


@pytest.mark.parametrize("T", [1, 2, 4])
@pytest.mark.parametrize("rho", [0.0, 0.5, 0.9])
@pytest.mark.parametrize("snr", [0.5, 5.0, 50.0])
def test_gauss_markov_blocks_match_jensen_form(T, rho, snr):
    model = spectra.constant_within_block(T, spectra.scalar_gauss_markov(rho))
    scan = unit_energy.cp_scan(model, snr)
    assert scan.cp == pytest.approx(unit_energy.cp_block_gauss_markov(T, snr, rho), abs=1e-6)


def test_closed_forms_agree_at_zero_correlation():
    for T in (1, 3):
        assert unit_energy.cp_block_gauss_markov(T, 2.0, 0.0) == pytest.approx(
            unit_energy.cp_block_indep_constant(T, 2.0), rel=1e-14
        )


def test_closed_form_dispatch(paired_block):
    iid = unit_energy.closed_form_cp(spectra.constant_within_block(3, spectra.flat_spectrum()), 2.0)
    assert iid.formula == "block-independent-constant"
    assert iid.cp == unit_energy.cp_block_indep_constant(3, 2.0)
    markov = unit_energy.closed_form_cp(spectra.constant_within_block(2, spectra.scalar_gauss_markov(0.7)), 2.0)
    assert markov.formula == "block-gauss-markov"
    assert markov.cp == unit_energy.cp_block_gauss_markov(2, 2.0, 0.7)
    half_band = spectra.piecewise_spectrum([(0.0, math.pi / 2.0, 2.0), (math.pi / 2.0, math.pi, 0.0)])
    half_band = spectra.constant_within_block(2, half_band)
    assert unit_energy.closed_form_cp(half_band, 2.0) is None
    assert unit_energy.closed_form_cp(paired_block[1], 2.0) is None


def test_scan_and_crossover_report_quadrature_error(gauss_markov):
    scan = unit_energy.cp_scan(spectra.constant_within_block(2, gauss_markov), 1.0)
    assert 0.0 <= scan.quadrature_error < 1e-6
    crossover = unit_energy.crossover_snr(spectra.paired_block_model(0.8), [1, 2], [1, 2, 3])
    assert crossover.quadrature_error is not None


def test_paired_block_scan_matches_closed_forms(paired_block):
    rho, model = paired_block
    scan = unit_energy.cp_scan(model, 2.0)
    closed = unit_energy.paired_block_closed_forms(rho, 2.0)
    assert len(scan.entries) == 7
    for entry in scan.entries:
        assert entry.psi == pytest.approx(closed[entry.label], abs=1e-9)


@pytest.mark.parametrize("rho, expected", [(0.6, 0.625), (0.8, 7.5), (0.9, 40.0)])
def test_paired_block_crossover(rho, expected):
    model = spectra.paired_block_model(rho)
    result = unit_energy.crossover_snr(model, [1, 2], [1, 2, 3])
    assert unit_energy.paired_block_crossover(rho) == pytest.approx(expected)
    assert result.snr == pytest.approx(expected, rel=1e-6)
    assert (result.first, result.second) == ("{1,2}", "{1,2,3}")


def test_paired_block_tie_at_crossover():
    scan = unit_energy.cp_scan(spectra.paired_block_model(0.8), 7.5)
    assert set(scan.argmin_labels) == {"{1,2}", "{1,2,3}"}


@pytest.mark.parametrize("snr", [0.01, 1.0, 100.0, 1e4])
def test_paired_block_weak_correlation_prefers_identical_pair(snr):
    scan = unit_energy.cp_scan(spectra.paired_block_model(0.3), snr)
    assert scan.argmin_labels == ["{1,2}"]


@pytest.mark.parametrize("snr", [0.1, 1.0, 10.0])
def test_paired_block_full_correlation_prefers_full_set(snr):
    scan = unit_energy.cp_scan(spectra.paired_block_model(1.0), snr)
    assert scan.argmin_labels == ["{1,2,3}"]


def test_crossover_without_sign_change_raises():
    with pytest.raises(InvalidParameterError):
        unit_energy.crossover_snr(spectra.paired_block_model(0.3), [1, 2], [1, 2, 3])


def test_crossover_with_explicit_bracket():
    result = unit_energy.crossover_snr(spectra.paired_block_model(0.8), [1, 2], [1, 2, 3], lo=1.0, hi=100.0)
    assert result.snr == pytest.approx(7.5, rel=1e-6)
    with pytest.raises(InvalidParameterError):
        unit_energy.crossover_snr(spectra.paired_block_model(0.8), [1, 2], [1, 2, 3], lo=10.0, hi=100.0)


def test_low_snr_asymptote(paired_block):
    rho, model = paired_block
    snr = 1e-3
    approx = unit_energy.cp_low_asymptote(model, snr)
    exact = unit_energy.cp_scan(model, snr)
    assert approx.cp == pytest.approx(exact.cp, rel=0.05)
    expected_argmax = ["{1,2,3}"] if rho == 0.8 else ["{1,2}"]
    assert approx.argmin_labels == expected_argmax


def test_low_snr_criterion_values():
    approx = unit_energy.cp_low_asymptote(spectra.paired_block_model(0.8), 1e-3)
    assert approx.criterion["{1,2,3}"] == pytest.approx(2.0 * math.pi * 7.56 / 3.0)
    assert approx.cp == pytest.approx(1.26e-3)


def test_high_snr_asymptote_matches_scan(paired_block):
    _, model = paired_block
    snr = 1e4
    approx = unit_energy.cp_high_asymptote(model, snr, grid_size=256)
    exact = unit_energy.cp_scan(model, snr)
    assert approx.argmin_labels == exact.argmin_labels == ["{1,2}"]
    assert approx.criterion["{1,2}"] == pytest.approx(0.5)


def test_subset_helpers():
    assert unit_energy.subset_label(0b101, 3) == "{1,3}"
    assert unit_energy.subset_mask([1, 3], 3) == 0b101
    with pytest.raises(InvalidParameterError):
        unit_energy.subset_mask([4], 3)
    with pytest.raises(InvalidParameterError):
        unit_energy.subset_mask([], 3)


def test_subset_logdet_integral():
    model = spectra.paired_block_model(0.8)
    assert unit_energy.subset_logdet_integral(model, [1, 2], 3.0) == pytest.approx(math.pi * math.log(7.0))


def test_scan_size_limit():
    with pytest.raises(InvalidParameterError):
        unit_energy.cp_scan(spectra.constant_within_block(21, spectra.flat_spectrum()), 1.0)


def test_cp_curve_is_increasing():
    model = spectra.constant_within_block(2, spectra.flat_spectrum())
    curve = unit_energy.cp_curve(model, [0.1, 1.0, 10.0])
    values = [cp for _, cp in curve]
    assert all(a < b for a, b in zip(values, values[1:]))
