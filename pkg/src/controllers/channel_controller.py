"""
Channel controller for the blockfade toolkit.

Handles HTTP requests for spectrum evaluation, prediction summaries,
pre-log and fading-number estimates, and capacity bounds.
"""

import logging
from typing import List

from starlette.concurrency import run_in_threadpool

from src.adapters.model_adapter import ModelAdapter
from src.models.request_models import (
    BoundsRequest,
    ModelRequest,
    PredictionRequest,
    PrelogRequest,
    SpectrumEvalRequest,
)
from src.models.response_models import (
    BoundPoint,
    FadingNumberResult,
    PredictionSummary,
    PrelogReport,
    SpectrumPoint,
)
from src.services.channel_service import ChannelService

logger = logging.getLogger(__name__)


class ChannelController:
    """Controller for channel-model HTTP requests."""

    def __init__(self, channel_service: ChannelService, model_adapter: ModelAdapter):
        """Initialize ChannelController with its service and model adapter."""
        self.channel_service = channel_service
        self.model_adapter = model_adapter
        logger.info("ChannelController initialized")

    async def evaluate_spectrum(self, request: SpectrumEvalRequest) -> List[SpectrumPoint]:
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(self.channel_service.evaluate_spectrum, model, request.omega)
        except Exception as e:
            logger.error(f"Error in channel controller evaluating spectrum: {e}", exc_info=True)
            raise

    async def prediction_summary(self, request: PredictionRequest) -> PredictionSummary:
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(
                self.channel_service.prediction_summary, model, request.snr, request.history_len, request.extrapolate
            )
        except Exception as e:
            logger.error(f"Error in channel controller computing prediction summary: {e}", exc_info=True)
            raise

    async def prelog(self, request: PrelogRequest) -> PrelogReport:
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(
                self.channel_service.prelog, model, request.snr_grid, request.grid_size, request.eig_threshold
            )
        except Exception as e:
            logger.error(f"Error in channel controller estimating pre-log: {e}", exc_info=True)
            raise

    async def fading_number(self, request: ModelRequest) -> FadingNumberResult:
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(self.channel_service.fading_number, model)
        except Exception as e:
            logger.error(f"Error in channel controller computing fading number: {e}", exc_info=True)
            raise

    async def bounds(self, request: BoundsRequest) -> List[BoundPoint]:
        """Capacity bounds at every requested SNR."""
        try:
            model = self.model_adapter.build(request.model)
            return await run_in_threadpool(
                self.channel_service.bounds_sweep,
                model,
                request.snr,
                request.x_min,
                request.history_len,
                request.distribution,
            )
        except Exception as e:
            logger.error(f"Error in channel controller computing bounds: {e}", exc_info=True)
            raise
