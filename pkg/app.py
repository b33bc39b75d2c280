"""
blockfade API - Main Application Entry Point

FastAPI application exposing the block-fading channel toolkit: spectra,
prediction variances, capacity bounds, capacity per unit energy,
transfinite diameters and error exponents.
"""

import logging
from datetime import datetime

from fastapi import Depends, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from src.adapters.output_adapter import to_jsonable
from src.config import config
from src.controllers.channel_controller import ChannelController
from src.controllers.coding_controller import CodingController
from src.controllers.energy_controller import EnergyController
from src.models.request_models import (
    BoundsRequest,
    CpRequest,
    CrossoverRequest,
    ExponentRequest,
    ModelRequest,
    PredictionRequest,
    PrelogRequest,
    SpectrumEvalRequest,
    TauRequest,
)
from src.modules.errors import BlockfadeError
from src.services.dependency_injection import (
    get_channel_controller,
    get_coding_controller,
    get_energy_controller,
)

logging.basicConfig(level=getattr(logging, config.log_level, "INFO"))
logger = logging.getLogger(__name__)

app = FastAPI(
    title="blockfade API",
    description="Capacity bounds, unit-energy capacity and coding limits for block-stationary fading channels",
    version=config.version,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)


def _respond(result) -> JSONResponse:
    # Starlette refuses non-finite floats; log-determinants of singular models are -inf.
    return JSONResponse(content=to_jsonable(result))


def _fail(endpoint: str, e: Exception) -> HTTPException:
    if isinstance(e, BlockfadeError):
        logger.warning(f"Rejected {endpoint} request: {e}")
        return HTTPException(status_code=400, detail=str(e))
    logger.error(f"Error in {endpoint} endpoint: {e}", exc_info=True)
    return HTTPException(status_code=500, detail="Internal error processing request")


@app.get("/", summary="Root Endpoint")
async def root():
    """Root endpoint with welcome message."""
    return {"message": f"blockfade API v{config.version}"}


@app.get("/health", summary="Health Check")
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "timestamp": datetime.utcnow()}


@app.post("/spectrum/evaluate", summary="Evaluate Spectral Density")
async def evaluate_spectrum(
    request: SpectrumEvalRequest,
    channel_controller: ChannelController = Depends(get_channel_controller),
):
    """Evaluate S(e^{jw}) of a model at the given frequencies."""
    try:
        return _respond(await channel_controller.evaluate_spectrum(request))
    except Exception as e:
        raise _fail("spectrum/evaluate", e)


@app.post("/prediction/summary", summary="Innovation Variances")
async def prediction_summary(
    request: PredictionRequest,
    channel_controller: ChannelController = Depends(get_channel_controller),
):
    """Finite-history per-symbol prediction variances and the log-det comparison."""
    try:
        return _respond(await channel_controller.prediction_summary(request))
    except Exception as e:
        raise _fail("prediction/summary", e)


@app.post("/prelog", summary="Pre-log Estimate")
async def prelog(
    request: PrelogRequest,
    channel_controller: ChannelController = Depends(get_channel_controller),
):
    try:
        return _respond(await channel_controller.prelog(request))
    except Exception as e:
        raise _fail("prelog", e)


@app.post("/fading-number", summary="Fading Number")
async def fading_number(
    request: ModelRequest,
    channel_controller: ChannelController = Depends(get_channel_controller),
):
    """Fading number of a regular model; 400 for nonregular input."""
    try:
        return _respond(await channel_controller.fading_number(request))
    except Exception as e:
        raise _fail("fading-number", e)


@app.post("/bounds", summary="Capacity Bounds")
async def capacity_bounds(
    request: BoundsRequest,
    channel_controller: ChannelController = Depends(get_channel_controller),
):
    try:
        return _respond(await channel_controller.bounds(request))
    except Exception as e:
        raise _fail("bounds", e)


@app.post("/cp", summary="Capacity per Unit Energy")
async def capacity_per_unit_energy(
    request: CpRequest,
    energy_controller: EnergyController = Depends(get_energy_controller),
):
    """Exhaustive subset scan at every requested SNR."""
    try:
        return _respond(await energy_controller.cp(request))
    except Exception as e:
        raise _fail("cp", e)


@app.post("/cp/crossover", summary="Subset Crossover SNR")
async def cp_crossover(
    request: CrossoverRequest,
    energy_controller: EnergyController = Depends(get_energy_controller),
):
    try:
        return _respond(await energy_controller.crossover(request))
    except Exception as e:
        raise _fail("cp/crossover", e)


@app.post("/exponent", summary="Random-Coding Exponent")
async def exponent(
    request: ExponentRequest,
    coding_controller: CodingController = Depends(get_coding_controller),
):
    try:
        return _respond(await coding_controller.exponent(request))
    except Exception as e:
        raise _fail("exponent", e)


@app.post("/tau", summary="Transfinite Diameter")
async def transfinite_diameter(
    request: TauRequest,
    coding_controller: CodingController = Depends(get_coding_controller),
):
    """Transfinite diameter of a union of arcs."""
    try:
        return _respond(await coding_controller.tau(request))
    except Exception as e:
        raise _fail("tau", e)
