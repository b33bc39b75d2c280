"""
Dependency injection for the blockfade toolkit.

Provides cached service, adapter and controller instances for the FastAPI
endpoints and the CLI.
"""

from functools import lru_cache

from src.adapters.model_adapter import ModelAdapter
from src.controllers.channel_controller import ChannelController
from src.controllers.coding_controller import CodingController
from src.controllers.energy_controller import EnergyController
from src.services.channel_service import ChannelService
from src.services.coding_service import CodingService
from src.services.energy_service import EnergyService
from src.services.simulation_service import SimulationService
from src.services.validation_service import ValidationService


@lru_cache()
def get_model_adapter() -> ModelAdapter:
    """Get cached ModelAdapter instance."""
    return ModelAdapter()


@lru_cache()
def get_channel_service() -> ChannelService:
    """Get cached ChannelService instance."""
    return ChannelService()


@lru_cache()
def get_energy_service() -> EnergyService:
    """Get cached EnergyService instance."""
    return EnergyService()


@lru_cache()
def get_coding_service() -> CodingService:
    """Get cached CodingService instance."""
    return CodingService()


@lru_cache()
def get_simulation_service() -> SimulationService:
    """Get cached SimulationService instance."""
    return SimulationService()


@lru_cache()
def get_validation_service() -> ValidationService:
    """Get cached ValidationService instance."""
    return ValidationService()


@lru_cache()
def get_channel_controller() -> ChannelController:
    """Get cached ChannelController instance."""
    return ChannelController(get_channel_service(), get_model_adapter())


@lru_cache()
def get_energy_controller() -> EnergyController:
    """Get cached EnergyController instance."""
    return EnergyController(get_energy_service(), get_model_adapter())


@lru_cache()
def get_coding_controller() -> CodingController:
    """Get cached CodingController instance."""
    return CodingController(get_coding_service())
