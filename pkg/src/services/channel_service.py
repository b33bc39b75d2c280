"""
Channel service for the blockfade toolkit.

Handles spectrum evaluation, prediction summaries, pre-log and fading
number estimates, and capacity-bound sweeps.
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from src.models.response_models import (
    BoundPoint,
    FadingNumberResult,
    PredictionSummary,
    PrelogReport,
    SpectrumPoint,
    TwoLevelRow,
)
from src.modules import bounds, highsnr, prediction
from src.modules.spectra import SpectralModel
from src.services.sweep import parallel_map

logger = logging.getLogger(__name__)


class ChannelService:
    """Service for prediction, high-SNR and capacity-bound computations."""

    def __init__(self):
        """Initialize ChannelService."""
        logger.info("ChannelService initialized")

    def evaluate_spectrum(self, model: SpectralModel, omegas: Sequence[float]) -> List[SpectrumPoint]:
        """
        Evaluate S(e^{jw}) on a list of frequencies.

        Args:
            model: Spectral model
            omegas: Frequencies in radians

        Returns:
            One SpectrumPoint per frequency
        """
        values = model.evaluate(np.asarray(omegas, dtype=float))
        eigenvalues = np.linalg.eigvalsh(values)
        return [
            SpectrumPoint(
                omega=float(w),
                real=np.real(v).tolist(),
                imag=np.imag(v).tolist(),
                min_eigenvalue=float(e[0]),
            )
            for w, v, e in zip(omegas, values, eigenvalues)
        ]

    def prediction_summary(
        self, model: SpectralModel, snr: float, history_len: Optional[int] = None, extrapolate: bool = False
    ) -> PredictionSummary:
        """Finite-history innovation variances with the determinant comparison."""
        try:
            summary = prediction.innovation_variances(model, snr, history_len, extrapolate=extrapolate)
            for warning in summary.warnings:
                logger.warning(f"Prediction summary at SNR={snr}: {warning}")
            return summary
        except Exception as e:
            logger.error(f"Error computing prediction summary: {e}", exc_info=True)
            raise

    def prelog(
        self,
        model: SpectralModel,
        snr_grid: Optional[Sequence[float]] = None,
        grid_size: Optional[int] = None,
        eig_threshold: Optional[float] = None,
    ) -> PrelogReport:
        """Rank-functional and slope estimates of the pre-log."""
        snr_grid = list(snr_grid) if snr_grid else list(highsnr.DEFAULT_SLOPE_GRID)
        logger.info(f"Estimating pre-log for {model.kind} model over {len(snr_grid)} SNR points")
        return highsnr.prelog_report(model, snr_grid, grid_size, eig_threshold)

    def fading_number(self, model: SpectralModel) -> FadingNumberResult:
        """Fading number of a regular model."""
        try:
            result = prediction.prediction_logdet_detailed(model, math.inf)
            value = highsnr.fading_number(model)
            return FadingNumberResult(
                fading_number=value, logdet_sigma_inf=result.value, quadrature_error=result.error
            )
        except Exception as e:
            logger.error(f"Error computing fading number: {e}", exc_info=True)
            raise

    def bounds_sweep(
        self,
        model: SpectralModel,
        snrs: Sequence[float],
        x_min: Optional[float] = None,
        history_len: Optional[int] = None,
        distribution: str = "annulus-uniform",
        jobs: Optional[int] = None,
    ) -> List[BoundPoint]:
        """
        Capacity lower and upper bounds over an SNR grid.

        Args:
            model: Spectral model
            snrs: SNR points (linear)
            x_min: Fixed annulus radius; sqrt(SNR)/2 per point when None
            history_len: Predictor history for T > 1
            distribution: Input distribution of the lower bound
            jobs: Worker threads

        Returns:
            BoundPoint per SNR, in input order
        """
        logger.info(f"Computing capacity bounds at {len(snrs)} SNR points")

        def point(snr: float) -> BoundPoint:
            result = bounds.capacity_bound_point(model, snr, x_min, history_len, distribution)
            degraded = [f for f in result.flags if f != "relaxed-upper"]
            if degraded:
                logger.warning(f"Bound point SNR={snr} flagged: {degraded}")
            return result

        return parallel_map(point, list(snrs), jobs)

    def two_level(
        self, eps1: float, eps2: float, alpha1: float, alpha2: float, snrs: Sequence[float]
    ) -> List[TwoLevelRow]:
        """Bounds for the two-level spectrum family."""
        return highsnr.two_level_bounds(eps1, eps2, alpha1, alpha2, list(snrs))
