"""
Configuration module for the blockfade toolkit.

Manages numerical defaults and environment variables shared by the CLI,
the HTTP API and the library modules.
"""

import os
from dotenv import load_dotenv

load_dotenv()


class Config:
    """Configuration class for all project settings."""

    def __init__(self):
        """Initialize configuration with environment variables."""
        # Quadrature
        self.quadrature_tol = float(os.getenv("BLOCKFADE_TOL", "1e-9"))
        self.quadrature_abs_tol = float(os.getenv("BLOCKFADE_ABS_TOL", "1e-13"))
        self.panel_cap = int(os.getenv("BLOCKFADE_PANEL_CAP", "4096"))

        # Model validation
        self.psd_tol = float(os.getenv("BLOCKFADE_PSD_TOL", "1e-8"))
        self.validation_grid = int(os.getenv("BLOCKFADE_VALIDATION_GRID", "2048"))
        self.default_max_lag = int(os.getenv("BLOCKFADE_MAX_LAG", "400"))

        # High-SNR rank machinery
        self.rank_grid = int(os.getenv("BLOCKFADE_RANK_GRID", "4096"))
        self.eig_threshold = float(os.getenv("BLOCKFADE_EIG_THRESHOLD", "1e-10"))

        # Finite-history prediction
        self.history_len = int(os.getenv("BLOCKFADE_HISTORY", "1024"))
        self.condition_cap = float(os.getenv("BLOCKFADE_CONDITION_CAP", "1e14"))

        # Capacity per unit energy
        self.max_subset_T = int(os.getenv("BLOCKFADE_MAX_SUBSET_T", "20"))
        self.tie_tol = float(os.getenv("BLOCKFADE_TIE_TOL", "1e-9"))

        # Transfinite diameter
        self.fekete_restarts = int(os.getenv("BLOCKFADE_FEKETE_RESTARTS", "8"))

        # Sweeps and simulation
        self.jobs = int(os.getenv("BLOCKFADE_JOBS", "1"))
        self.seed = int(os.getenv("BLOCKFADE_SEED", "20240101"))

        # Logging Configuration
        self.log_level = os.getenv("LOG_LEVEL", "INFO")

        self.version = "1.0.0"

    def validate(self) -> bool:
        """Validate that configuration values are usable."""
        positive_fields = [
            "quadrature_tol", "quadrature_abs_tol", "panel_cap", "psd_tol",
            "validation_grid", "rank_grid", "eig_threshold", "condition_cap",
            "max_subset_T", "tie_tol", "fekete_restarts", "jobs",
        ]
        invalid_fields = [field for field in positive_fields if not getattr(self, field) > 0]
        if invalid_fields:
            raise ValueError(f"Invalid configuration (must be positive): {invalid_fields}")
        if self.history_len < 0:
            raise ValueError(f"Invalid configuration: history_len={self.history_len}")
        return True


# Global configuration instance
config = Config()
