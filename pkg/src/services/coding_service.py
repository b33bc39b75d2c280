"""
Coding service for the blockfade toolkit.

Handles transfinite diameters of spectral supports, the blocklength
scaling bound, prediction-error decay and random-coding exponents.
"""

import logging
import math
from typing import Optional, Sequence

from src.models.response_models import DecayRateResult, ExponentResult, ScalingResult, TauResult
from src.modules import codelength
from src.modules.codelength import ArcSet
from src.modules.errors import InvalidParameterError
from src.modules.spectra import ScalarPiecewiseSpectrum

logger = logging.getLogger(__name__)


class CodingService:
    """Service for codeword-length and error-exponent computations."""

    def __init__(self):
        """Initialize CodingService."""
        logger.info("CodingService initialized")

    def tau(
        self,
        arcs: ArcSet,
        n: Optional[int] = None,
        restarts: Optional[int] = None,
        jobs: Optional[int] = None,
    ) -> TauResult:
        """
        Transfinite diameter of an arc union.

        A single arc uses the closed form unless a Fekete size is requested;
        arc unions always go through the Fekete solver (default n = 40).
        """
        if len(arcs.arcs) == 1 and n is None:
            theta = 2.0 * arcs.arcs[0][1]
            return TauResult(arcs=arcs.as_angles(), tau=codelength.arc_transfinite_diameter(theta), method="closed-form")

        n = n or 40
        logger.info(f"Solving Fekete problem on {len(arcs.arcs)} arc(s) with n={n}")
        result = codelength.fekete_transfinite_diameter(arcs, n, restarts=restarts, jobs=jobs)
        if not result.converged:
            logger.warning(f"Fekete ascent did not converge for every ladder size; tau_n={result.tau_n}")
        tau = result.tau_extrapolated if result.tau_extrapolated is not None else result.tau_n
        return TauResult(arcs=arcs.as_angles(), tau=tau, method="fekete", fekete=result)

    def scaling(
        self,
        rate: float,
        error_probability: float,
        tau: Optional[float] = None,
        arcs: Optional[ArcSet] = None,
        spectrum: Optional[ScalarPiecewiseSpectrum] = None,
    ) -> ScalingResult:
        """
        Blocklength scaling bound from tau given directly, from an arc set,
        or from the prediction-error decay of a spectrum.
        """
        if tau is not None:
            source = "given"
        elif arcs is not None:
            tau = self.tau(arcs).tau
            source = "arcs"
        elif spectrum is not None:
            tau = self.decay_rate(spectrum).tau_estimate
            source = "prediction-decay"
        else:
            raise InvalidParameterError("scaling bound needs tau, arcs or a spectrum")
        value = codelength.blocklength_scaling_bound(rate, error_probability, tau)
        return ScalingResult(
            rate=rate,
            error_probability=error_probability,
            tau=tau,
            min_blocklength_over_log_inverse_energy=value,
            tau_source=source,
        )

    def decay_rate(self, spectrum: ScalarPiecewiseSpectrum, orders: Optional[Sequence[int]] = None) -> DecayRateResult:
        """Prediction-error decay rate of a piecewise spectrum."""
        try:
            return codelength.prediction_decay_rate(spectrum, orders)
        except Exception as e:
            logger.error(f"Error fitting prediction-error decay: {e}", exc_info=True)
            raise

    def exponent(
        self, channel: str, snr: float, rate: Optional[float] = None, rate_offset: Optional[float] = None
    ) -> ExponentResult:
        """
        Random-coding exponent at a rate given directly or as log SNR - offset.
        """
        if rate is None:
            if rate_offset is None:
                raise InvalidParameterError("exponent needs a rate or a rate offset")
            rate = math.log(snr) - rate_offset
        if rate < 0:
            raise InvalidParameterError(f"rate must be non-negative, got {rate}")
        result = codelength.exponent_report(channel, rate, snr)
        if result.flags:
            logger.warning(f"{channel} exponent at R={rate:.6f}, SNR={snr}: {result.flags}")
        return result
