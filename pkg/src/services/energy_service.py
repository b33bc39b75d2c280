"""
Energy service for the blockfade toolkit.

Handles capacity per unit energy: subset scans, closed forms, crossover
location and the small/large-SNR approximations.
"""

import logging
from typing import List, Optional, Sequence, Union

from src.models.response_models import AsymptoteResult, ClosedFormCp, CrossoverResult, SubsetScan
from src.modules import unit_energy
from src.modules.spectra import SpectralModel
from src.services.sweep import parallel_map

logger = logging.getLogger(__name__)


class EnergyService:
    """Service for capacity-per-unit-energy computations."""

    def __init__(self):
        """Initialize EnergyService."""
        logger.info("EnergyService initialized")

    def cp(
        self, model: SpectralModel, snrs: Sequence[float], jobs: Optional[int] = None, method: str = "scan"
    ) -> List[Union[SubsetScan, ClosedFormCp]]:
        """
        Capacity per unit energy at each SNR.

        Args:
            model: Spectral model with T <= the subset-scan limit
            snrs: SNR points
            jobs: Worker threads, spread over SNR points
            method: "scan", or "auto" to use a closed form when the model has one

        Returns:
            SubsetScan or ClosedFormCp per SNR in input order
        """
        if method == "auto":
            closed = [unit_energy.closed_form_cp(model, snr) for snr in snrs]
            if closed and all(c is not None for c in closed):
                logger.info(f"Using closed form {closed[0].formula} at {len(snrs)} SNR points")
                return closed
            logger.info(f"No closed form for {model.kind}; falling back to the subset scan")
        logger.info(f"Scanning {2 ** model.T - 1} subsets at {len(snrs)} SNR points")
        scans = parallel_map(lambda snr: unit_energy.cp_scan(model, snr, jobs=1), list(snrs), jobs)
        for scan in scans:
            for advisory in scan.advisories:
                logger.info(f"SNR={scan.snr}: {advisory}")
        return scans

    def crossover(
        self,
        model: SpectralModel,
        first: Sequence[int],
        second: Sequence[int],
        lo: Optional[float] = None,
        hi: Optional[float] = None,
    ) -> CrossoverResult:
        """SNR at which two subsets exchange optimality."""
        try:
            return unit_energy.crossover_snr(model, first, second, lo, hi)
        except Exception as e:
            logger.error(f"Error locating crossover between {first} and {second}: {e}", exc_info=True)
            raise

    def asymptotes(self, model: SpectralModel, snr: float) -> List[AsymptoteResult]:
        """Small- and large-SNR approximations at one SNR."""
        return [unit_energy.cp_low_asymptote(model, snr), unit_energy.cp_high_asymptote(model, snr)]
