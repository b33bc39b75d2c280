"""
Energy controller for the blockfade toolkit.

Handles HTTP requests for capacity per unit energy.
"""

import logging
from typing import List

from starlette.concurrency import run_in_threadpool

from src.adapters.model_adapter import ModelAdapter
from src.models.request_models import CpRequest, CrossoverRequest
from src.models.response_models import CrossoverResult, SubsetScan
from src.services.energy_service import EnergyService

logger = logging.getLogger(__name__)


class EnergyController:
    """Controller for capacity-per-unit-energy HTTP requests."""

    def __init__(self, energy_service: EnergyService, model_adapter: ModelAdapter):
        """Initialize EnergyController with its service and model adapter."""
        self.energy_service = energy_service
        self.model_adapter = model_adapter
        logger.info("EnergyController initialized")

    async def cp(self, request: CpRequest) -> List[SubsetScan]:
        """Subset scans at each requested SNR."""
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(self.energy_service.cp, model, request.snr)
        except Exception as e:
            logger.error(f"Error in energy controller scanning subsets: {e}", exc_info=True)
            raise

    async def crossover(self, request: CrossoverRequest) -> CrossoverResult:
        """SNR where two subsets exchange optimality."""
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(
                self.energy_service.crossover, model, request.m1, request.m2, request.lo, request.hi
            )
        except Exception as e:
            logger.error(f"Error in energy controller locating crossover: {e}", exc_info=True)
            raise
