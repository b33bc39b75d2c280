"""
Simulation service for the blockfade toolkit.

Runs the Monte Carlo oracle against the analytic prediction variances.
"""

import logging
from typing import List, Optional

from src.models.response_models import SimulationRow
from src.modules.simkit import SimConfig, empirical_prediction_variance
from src.modules.spectra import SpectralModel

logger = logging.getLogger(__name__)

_Z_WARNING = 3.0


class SimulationService:
    """Service for Monte Carlo checks of prediction variances."""

    def __init__(self):
        """Initialize SimulationService."""
        logger.info("SimulationService initialized")

    def simulate(
        self,
        model: SpectralModel,
        num_paths: int,
        path_len: int,
        seed: int,
        snr: float,
        history_len: int,
        jobs: Optional[int] = None,
    ) -> List[SimulationRow]:
        """
        Empirical vs analytic one-step prediction variance per block position.

        Args:
            model: Spectral model
            num_paths: Number of independent paths
            path_len: Symbols per path (multiple of T)
            seed: Base seed
            snr: Observation SNR
            history_len: Predictor history

        Returns:
            One SimulationRow per block position
        """
        cfg = SimConfig(model=model, num_paths=num_paths, path_len=path_len, seed=seed, snr=snr)
        logger.info(f"Simulating {num_paths} paths of length {path_len} (seed={seed}, SNR={snr})")
        rows = empirical_prediction_variance(cfg, history_len, jobs)
        for row in rows:
            if abs(row.z_score) > _Z_WARNING:
                logger.warning(f"Position {row.position}: empirical variance {row.z_score:.2f} stderr from analytic")
        return rows
