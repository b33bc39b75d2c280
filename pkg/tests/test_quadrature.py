"""
Tests for adaptive Gauss-Legendre quadrature and spectral integrals.
"""

import math

import numpy as np
import pytest

from src.modules import spectra
from src.modules.errors import ToleranceNotMetError
from src.modules.highsnr import worst_case_spectrum
from src.modules.quadrature import (
    adaptive_integrate,
    hermitian_logdet,
    merge_breakpoints,
    midpoint_grid,
    spectral_integral,
)


def test_smooth_integrand():
    result = adaptive_integrate(lambda x: np.sin(x) ** 2, 0.0, math.pi)
    assert result.value == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert result.error <= 1e-9 * math.pi


def test_step_with_breakpoint():
    result = adaptive_integrate(lambda x: np.where(x < 1.3, 1.0, 3.0), 0.0, 2.0, breakpoints=[1.3])
    assert result.value == pytest.approx(1.3 + 3.0 * 0.7, rel=1e-12)


def test_panel_cap_raises_with_estimate():
    with pytest.raises(ToleranceNotMetError) as info:
        adaptive_integrate(lambda x: np.abs(x) ** -0.5, -1.0, 1.0, panel_cap=64)
    assert info.value.estimate == pytest.approx(4.0, rel=0.05)
    assert info.value.achieved > 0


def test_piecewise_models_are_summed_exactly():
    model = spectra.scalar_model(worst_case_spectrum(math.pi))
    result = spectral_integral(model, lambda m: np.log(np.real(m[:, 0, 0]) + 1.0))
    assert result.exact
    assert result.value == pytest.approx(0.5 * math.log(3.0), rel=1e-14)


def test_spectral_integral_recovers_unit_power():
    model = spectra.scalar_gauss_markov(0.5)
    result = spectral_integral(model, lambda m: np.real(m[:, 0, 0]))
    assert not result.exact
    assert result.value == pytest.approx(1.0, rel=1e-9)


def test_hermitian_logdet():
    stack = np.array([np.diag([2.0, 3.0]), [[2.0, 1.0], [1.0, 2.0]]], dtype=complex)
    np.testing.assert_allclose(hermitian_logdet(stack), [math.log(6.0), math.log(3.0)])


def test_grids():
    np.testing.assert_allclose(midpoint_grid(4), [-0.75 * math.pi, -0.25 * math.pi, 0.25 * math.pi, 0.75 * math.pi])
    assert merge_breakpoints([0.5, -4.0], [0.5, 1.0]) == [0.5, 1.0]
