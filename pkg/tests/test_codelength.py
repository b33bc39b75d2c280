"""
Tests for arc supports, Fekete points, prediction-error decay and the
random-coding exponents.
"""

import math

import numpy as np
import pytest

from src.modules import codelength, spectra
from src.modules.errors import ConditionViolationError, InvalidModelError, InvalidParameterError
from src.modules.highsnr import worst_case_spectrum


@pytest.fixture
def half_band():
    return spectra.piecewise_spectrum([(0.0, math.pi / 2.0, 2.0), (math.pi / 2.0, math.pi, 0.0)])


def test_arc_parsing_and_validation():
    arcs = codelength.ArcSet.parse("0:1.5,3.14159:1")
    assert arcs.arcs == ((0.0, 0.75), (3.14159, 0.5))
    assert arcs.measure() == pytest.approx(2.5)
    with pytest.raises(InvalidParameterError):
        codelength.ArcSet.parse("north")
    with pytest.raises(InvalidParameterError):
        codelength.ArcSet.parse("0:1:2")
    with pytest.raises(InvalidModelError):
        codelength.ArcSet(arcs=((0.0, 1.0), (1.5, 1.0)))
    with pytest.raises(InvalidModelError):
        codelength.ArcSet(arcs=())


def test_support_arcs(half_band):
    assert codelength.support_arcs(half_band).arcs == ((0.0, math.pi / 2.0),)
    assert codelength.support_arcs(worst_case_spectrum(math.pi)).arcs == ((math.pi, math.pi / 2.0),)
    assert codelength.support_arcs(spectra.flat_spectrum()).is_full_circle

    band = spectra.piecewise_spectrum([(0.0, 0.5, 0.0), (0.5, 1.5, math.pi), (1.5, math.pi, 0.0)])
    arcs = codelength.support_arcs(band)
    assert arcs.arcs == ((1.0, 0.5), (-1.0, 0.5))


def test_closed_form_and_scaling_bound():
    tau = codelength.arc_transfinite_diameter(math.pi)
    assert tau == pytest.approx(0.7071068, abs=1e-7)
    assert codelength.blocklength_scaling_bound(1.0, 0.1, tau) == pytest.approx(2.5968, abs=1e-4)
    with pytest.raises(ConditionViolationError):
        codelength.blocklength_scaling_bound(1.0, 0.1, 1.0)
    with pytest.raises(InvalidParameterError):
        codelength.blocklength_scaling_bound(1.0, 1.0, tau)


def test_default_ladder():
    assert codelength.default_ladder(40) == [8, 14, 21, 27, 34, 40]
    assert codelength.default_ladder(5) == [2, 3, 4, 5]


def test_full_circle_fekete_points():
    result = codelength.fekete_transfinite_diameter(codelength.ArcSet(arcs=((0.0, math.pi),)), 10)
    assert result.tau_n == pytest.approx(10.0 ** (1.0 / 9.0), rel=1e-10)
    assert result.tau_extrapolated == pytest.approx(1.0, abs=1e-6)
    taus = [p.tau_n for p in result.ladder]
    assert all(a >= b for a, b in zip(taus, taus[1:]))
    assert not result.monotone_repaired


def test_single_arc_fekete_points():
    arcs = codelength.ArcSet(arcs=((0.0, math.pi / 2.0),))
    first = codelength.fekete_transfinite_diameter(arcs, 12, restarts=2, seed=5, ladder=[6, 9])
    second = codelength.fekete_transfinite_diameter(arcs, 12, restarts=2, seed=5, ladder=[6, 9])
    assert first.tau_n == second.tau_n
    assert len(first.points) == 12
    assert all(abs(phi) <= math.pi / 2.0 + 1e-9 for phi in first.points)
    assert first.tau_n > codelength.arc_transfinite_diameter(math.pi)
    assert [p.n for p in first.ladder] == [6, 9, 12]
    with pytest.raises(InvalidParameterError):
        codelength.fekete_transfinite_diameter(arcs, 1)


@pytest.mark.slow
@pytest.mark.parametrize("theta", [math.pi / 2.0, math.pi, 1.5 * math.pi])
def test_fekete_matches_single_arc_closed_form(theta):
    tau = codelength.arc_transfinite_diameter(theta)
    result = codelength.fekete_transfinite_diameter(codelength.ArcSet(arcs=((0.0, theta / 2.0),)), 40, restarts=8)
    assert result.tau_extrapolated == pytest.approx(tau, rel=0.02)
    assert 0.98 * tau <= result.tau_n <= 1.15 * tau
    taus = [p.tau_n for p in result.ladder]
    assert all(a >= b for a, b in zip(taus, taus[1:]))


@pytest.mark.parametrize("centers", [(0.0, math.pi), (1.0, -1.0)])
def test_two_arc_tau_between_contained_and_containing_sets(centers):
    # Each arc spans pi/2: the union contains one such arc and sits inside the circle.
    arcs = codelength.ArcSet(arcs=tuple((c, math.pi / 4.0) for c in centers))
    result = codelength.fekete_transfinite_diameter(arcs, 16, restarts=2, seed=3)
    single = codelength.arc_transfinite_diameter(math.pi / 2.0)
    assert single == pytest.approx(math.sin(math.pi / 8.0))
    assert single < result.tau_extrapolated < 1.0
    assert result.tau_n > single


@pytest.mark.parametrize("wider, narrower", [(1.5 * math.pi, math.pi), (math.pi, 0.5 * math.pi)])
def test_prediction_decay_rate_shrinks_with_arc(wider, narrower):
    # worst_case_spectrum(alpha) is supported on one arc of angle 2 pi - alpha.
    wide = codelength.prediction_decay_rate(worst_case_spectrum(2.0 * math.pi - wider))
    narrow = codelength.prediction_decay_rate(worst_case_spectrum(2.0 * math.pi - narrower))
    assert narrow.tau_estimate < wide.tau_estimate
    assert wide.tau_estimate == pytest.approx(math.sin(wider / 4.0), rel=0.1)
    assert narrow.tau_estimate == pytest.approx(math.sin(narrower / 4.0), rel=0.1)


def test_prediction_decay_rate(half_band):
    result = codelength.prediction_decay_rate(half_band)
    assert result.tau_estimate == pytest.approx(math.sin(math.pi / 4.0), rel=0.05)
    assert result.extended_precision
    assert result.n_used == list(range(20, 51))
    with pytest.raises(InvalidParameterError):
        codelength.prediction_decay_rate(half_band, orders=[10, 11, 12])


@pytest.mark.parametrize("eta", [1.2, 1.5, 1.9])
def test_awgn_exponent_large_snr_limit(eta):
    snr = 1e8
    value = codelength.awgn_exponent(math.log(snr) - math.log(eta), snr)
    assert value == pytest.approx(eta - 1.0 - math.log(eta), abs=1e-3)


def test_awgn_exponent_branches():
    snr = 10.0
    critical = math.log(0.5 + snr / 4.0 + 0.5 * math.sqrt(1.0 + snr * snr / 4.0))
    above = codelength.awgn_exponent(critical, snr)
    below = codelength.awgn_exponent(critical * (1.0 - 1e-9), snr)
    assert above == pytest.approx(0.30225, abs=1e-5)
    assert below == pytest.approx(above, abs=1e-6)
    assert codelength.awgn_branch(critical, snr) == "sphere-packing"
    assert codelength.awgn_branch(0.5 * critical, snr) == "straight-line"
    assert codelength.awgn_branch(math.log1p(snr), snr) == "above-capacity"
    assert codelength.awgn_exponent(math.log1p(snr), snr) == 0.0
    assert codelength.awgn_exponent(0.0, snr) > above


@pytest.mark.parametrize("snr", [1.0, 10.0, 1e4])
def test_rayleigh_unit_rho_closed_form(snr):
    assert codelength.rayleigh_gallager_function(1.0, snr) == pytest.approx(
        codelength.rayleigh_unit_rho_check(snr), rel=1e-8
    )


def test_rayleigh_exponent():
    snr = 1e8
    rate = math.log(snr) - math.log(math.log(snr)) - 1.0
    assert codelength.rayleigh_exponent(rate, snr) >= 0.29
    assert codelength.rayleigh_exponent(math.log1p(snr), snr) == 0.0


@pytest.mark.parametrize("rate, snr", [(0.5, 10.0), (1.5, 10.0), (3.0, 100.0)])
def test_rayleigh_exponent_matches_rho_grid(rate, snr):
    grid = max(
        codelength.rayleigh_gallager_function(rho, snr) - rho * rate for rho in np.linspace(0.0, 1.0, 101)
    )
    value = codelength.rayleigh_exponent(rate, snr)
    assert value >= grid - 1e-9
    assert value == pytest.approx(grid, abs=1e-4)


def test_exponent_report():
    report = codelength.exponent_report("awgn", 5.0, 10.0)
    assert report.flags == ["rate-above-capacity", "zero-exponent"]
    assert report.branch == "above-capacity"
    report = codelength.exponent_report("rayleigh", 0.5, 10.0)
    assert report.exponent > 0.0
    assert report.flags == []
    with pytest.raises(InvalidParameterError):
        codelength.exponent_report("rician", 0.5, 10.0)
