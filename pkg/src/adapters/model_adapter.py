"""
Model adapter for the blockfade toolkit.

Turns JSON channel-model descriptions (files or already-parsed payloads)
into validated SpectralModel instances.
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

import numpy as np
from pydantic import TypeAdapter, ValidationError

from src.config import config
from src.models.request_models import (
    BlockGaussMarkovSpec,
    ConstantWithinBlockSpec,
    CorrelationSpec,
    ExplicitGridSpec,
    FlatSpec,
    ModelSpec,
    PiecewiseSpec,
    ScalarGaussMarkovSpec,
    TwoLevelSpec,
    VanishingSpec,
    WorstCaseSpec,
    as_complex,
)
from src.modules import spectra
from src.modules.errors import ModelParseError
from src.modules.highsnr import worst_case_spectrum
from src.modules.spectra import ScalarPiecewiseSpectrum, SpectralModel

logger = logging.getLogger(__name__)

_BOUNDARY_TOLERANCE = 1e-6
_model_schema = TypeAdapter(ModelSpec)


def _matrix(rows) -> np.ndarray:
    return np.array([[as_complex(v) for v in row] for row in rows], dtype=complex)


class ModelAdapter:
    """Adapter between the JSON model schema and spectral models."""

    def __init__(self):
        logger.info("ModelAdapter initialized successfully")

    def load(self, path: Union[str, Path]) -> SpectralModel:
        """
        Read and build a model from a JSON file.

        Args:
            path: Model file path

        Returns:
            Validated SpectralModel

        Raises:
            ModelParseError: on unreadable files, invalid JSON or schema errors
        """
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ModelParseError(f"cannot read model file {path}: {e}") from e
        try:
            payload = json.loads(text)
        except json.JSONDecodeError as e:
            raise ModelParseError(f"invalid JSON in {path}: {e.msg}", e.lineno, e.colno) from e
        logger.info(f"Loaded model description from {path}")
        return self.build(payload)

    def parse(self, payload: Any):
        """Validate a parsed payload against the model schema."""
        try:
            return _model_schema.validate_python(payload)
        except ValidationError as e:
            first = e.errors()[0]
            location = ".".join(str(part) for part in first["loc"])
            raise ModelParseError(f"model schema error at '{location}': {first['msg']}") from e

    def build(self, payload: Any) -> SpectralModel:
        """Build a SpectralModel from a payload dict or an already-validated spec."""
        spec = payload if not isinstance(payload, dict) else self.parse(payload)
        return self._build_spec(spec)

    def _scalar_spectrum(self, spec) -> ScalarPiecewiseSpectrum:
        if isinstance(spec, PiecewiseSpec):
            return ScalarPiecewiseSpectrum.from_segments(
                [(s.lo, s.hi, s.level) for s in spec.segments], renormalize_within=_BOUNDARY_TOLERANCE
            )
        if isinstance(spec, FlatSpec):
            return spectra.flat_spectrum()
        if isinstance(spec, VanishingSpec):
            return spectra.vanishing_spectrum(spec.alpha, spec.theta)
        if isinstance(spec, WorstCaseSpec):
            return worst_case_spectrum(spec.alpha)
        if isinstance(spec, TwoLevelSpec):
            return spectra.two_level_spectrum(spec.eps1, spec.eps2, spec.alpha1, spec.alpha2)
        raise ModelParseError(f"model kind {spec.kind!r} is not a piecewise scalar spectrum")

    def _build_spec(self, spec) -> SpectralModel:
        if isinstance(spec, ScalarGaussMarkovSpec):
            return spectra.scalar_gauss_markov(as_complex(spec.rho))
        if isinstance(spec, BlockGaussMarkovSpec):
            return spectra.block_gauss_markov_model(spec.T, as_complex(spec.rho1), as_complex(spec.rho2))
        if isinstance(spec, ConstantWithinBlockSpec):
            inner = self._build_spec(spec.scalar)
            return spectra.constant_within_block(spec.T, inner)
        if isinstance(spec, CorrelationSpec):
            mapping = {}
            for lag in spec.lags:
                matrix = _matrix(lag.matrix)
                if matrix.shape != (spec.T, spec.T):
                    raise ModelParseError(f"lag {lag.i} matrix has shape {matrix.shape}, expected ({spec.T}, {spec.T})")
                mapping[lag.i] = matrix
            corr = spectra.CorrelationSequence.from_mapping(spec.T, mapping, tolerance=config.psd_tol)
            return spectra.from_correlation(corr)
        if isinstance(spec, ExplicitGridSpec):
            nodes = [(node.omega, _matrix(node.matrix)) for node in spec.nodes]
            for omega, matrix in nodes:
                if matrix.shape != (spec.T, spec.T):
                    raise ModelParseError(f"grid node at omega={omega} has shape {matrix.shape}")
            return spectra.explicit_grid(nodes)
        return spectra.scalar_model(self._scalar_spectrum(spec))

    def scalar_spectrum(self, payload: Any) -> ScalarPiecewiseSpectrum:
        """Piecewise scalar spectrum behind a payload, for routines that need exact segments."""
        model = self.build(payload)
        spectrum = model.scalar_spectrum()
        if spectrum is None:
            raise ModelParseError(f"model kind {model.kind!r} is not a piecewise scalar spectrum")
        return spectrum
