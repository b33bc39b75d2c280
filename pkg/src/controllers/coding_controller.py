"""
Coding controller for the blockfade toolkit.

Handles HTTP requests for transfinite diameters and error exponents.
"""

import logging

from starlette.concurrency import run_in_threadpool

from src.models.request_models import ExponentRequest, TauRequest
from src.models.response_models import ExponentResult, TauResult
from src.modules.codelength import ArcSet
from src.services.coding_service import CodingService

logger = logging.getLogger(__name__)


class CodingController:
    """Controller for codeword-length and exponent HTTP requests."""

    def __init__(self, coding_service: CodingService):
        """Initialize CodingController with CodingService dependency."""
        self.coding_service = coding_service
        logger.info("CodingController initialized")

    async def tau(self, request: TauRequest) -> TauResult:
        try:
            arcs = ArcSet(arcs=tuple((arc.center, arc.angle / 2.0) for arc in request.arcs))
            return await run_in_threadpool(self.coding_service.tau, arcs, request.n, request.restarts)
        except Exception as e:
            logger.error(f"Error in coding controller computing tau: {e}", exc_info=True)
            raise

    async def exponent(self, request: ExponentRequest) -> ExponentResult:
        try:
            return await run_in_threadpool(
                self.coding_service.exponent, request.channel, request.snr, request.rate, request.rate_offset
            )
        except Exception as e:
            logger.error(f"Error in coding controller computing {request.channel} exponent: {e}", exc_info=True)
            raise
