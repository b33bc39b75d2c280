"""
Capacity bounds for noncoherent block fading.

The lower bound sends a pilot-free annulus-uniform input and decodes with
a predictor fed by the noisy past; the upper bound gives the receiver the
past fading as side information and adds the memoryless channel term.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
import scipy.special

from src.models.response_models import BoundPoint
from src.modules.errors import DomainError, InvalidParameterError
from src.modules.highsnr import EULER_GAMMA, worst_case_variance
from src.modules.prediction import (
    innovation_variances,
    noisy_past_prediction_variance_detailed,
    prediction_logdet,
    prediction_logdet_detailed,
)
from src.modules.spectra import SpectralModel

logger = logging.getLogger(__name__)

ANNULUS_CONSTANT = EULER_GAMMA + math.log(5.0 * math.e / 6.0)
DISTRIBUTIONS = ("annulus-uniform", "log-uniform")
_IID_LIMIT = 1.0 - 1e-12
_EXP1_SWITCH = 500.0
_LAGUERRE_NODES, _LAGUERRE_WEIGHTS = np.polynomial.laguerre.laggauss(64)


def annulus_rate_lower(snr: float, var_tilde: float) -> float:
    """
    Achievable rate of one symbol with annulus-uniform input and pilot
    variance var_tilde:
    -log(var + 8/(5 SNR)) + log(1 - var) - gamma - log(5e/6).

    Raises:
        DomainError: unless 0 <= var_tilde < 1 and snr > 0
    """
    if not snr > 0:
        raise DomainError(f"SNR must be positive, got {snr}")
    if not 0.0 <= var_tilde < 1.0:
        raise DomainError(f"prediction variance must lie in [0, 1), got {var_tilde}")
    return -math.log(var_tilde + 8.0 / (5.0 * snr)) + math.log1p(-var_tilde) - ANNULUS_CONSTANT


def memoryless_term(snr: float) -> float:
    """Coherent Rayleigh rate E[log(1 + SNR |h|^2)] = e^{1/SNR} E1(1/SNR)."""
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    inv = 1.0 / snr
    if inv < _EXP1_SWITCH:
        return float(math.exp(inv) * scipy.special.exp1(inv))
    return float(np.sum(_LAGUERRE_WEIGHTS * np.log1p(snr * _LAGUERRE_NODES)))


def _pilot_variances(
    model: SpectralModel, x_min: float, history_len: Optional[int]
) -> Tuple[List[float], float]:
    """Noisy-past prediction variances of the fading itself, pilots at power x_min^2, and their quadrature error."""
    if model.T == 1:
        variance, error = noisy_past_prediction_variance_detailed(model, x_min)
        return [variance], error
    noise = 1.0 / (x_min * x_min)
    summary = innovation_variances(model, x_min * x_min, history_len)
    return [min(max(s - noise, 0.0), 1.0) for s in summary.sigmas], 0.0


def _clamped_term(snr: float, var_tilde: float, flags: List[str]) -> float:
    if var_tilde >= _IID_LIMIT:
        if "iid-component" not in flags:
            flags.append("iid-component")
        return 0.0
    term = annulus_rate_lower(snr, var_tilde)
    if term < 0.0:
        if "vacuous" not in flags:
            flags.append("vacuous")
        return 0.0
    return term


def _check_x_min(snr: float, x_min: float, flags: List[str]) -> None:
    if not 0 < x_min:
        raise InvalidParameterError(f"x_min must be positive, got {x_min}")
    if x_min > math.sqrt(snr):
        raise InvalidParameterError(f"x_min={x_min} exceeds the peak amplitude sqrt(SNR)={math.sqrt(snr)}")
    if x_min > math.sqrt(snr) / 2.0:
        flags.append("x_min-above-annulus")


def _lower_terms(
    model: SpectralModel, snr: float, x_min: Optional[float], history_len: Optional[int], distribution: str
) -> Tuple[List[float], List[str], float, float]:
    if distribution not in DISTRIBUTIONS:
        raise InvalidParameterError(f"unknown input distribution {distribution!r}; choose from {DISTRIBUTIONS}")
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    flags: List[str] = []
    x_min = math.sqrt(snr) / 2.0 if x_min is None else x_min
    _check_x_min(snr, x_min, flags)

    variances, error = _pilot_variances(model, x_min, history_len)
    terms = []
    for var_tilde in variances:
        if distribution == "annulus-uniform":
            terms.append(_clamped_term(snr, var_tilde, flags))
            continue
        spread = math.log(snr) - math.log(x_min * x_min)
        if spread <= 1.0 or var_tilde <= 0.0:
            terms.append(0.0)
            continue
        estimate = math.log(spread) - 1.0 - EULER_GAMMA - math.log(var_tilde)
        terms.append(max(estimate, 0.0))
    if distribution == "log-uniform":
        flags.append("asymptotic-estimate")
    # |d term / dv| = 1/(v + 8/(5 SNR)) + 1/(1 - v)
    term_error = max(
        (error * (1.0 / (v + 8.0 / (5.0 * snr)) + 1.0 / (1.0 - v)) for v in variances if v < _IID_LIMIT),
        default=0.0,
    )
    return terms, flags, term_error, x_min


def capacity_lower(
    model: SpectralModel,
    snr: float,
    x_min: Optional[float] = None,
    history_len: Optional[int] = None,
    distribution: str = "annulus-uniform",
) -> float:
    """
    Lower bound on capacity in nats per channel use.

    Args:
        model: Spectral model
        snr: Signal-to-noise ratio
        x_min: Inner radius of the input annulus (default sqrt(SNR)/2)
        history_len: Predictor history for T > 1
        distribution: "annulus-uniform" or the asymptotic "log-uniform" estimate

    Returns:
        Average of the clamped per-symbol rates

    Raises:
        InvalidParameterError: if x_min is not in (0, sqrt(SNR)]
    """
    terms, _, _, _ = _lower_terms(model, snr, x_min, history_len, distribution)
    return float(np.mean(terms))


def side_information_terms(model: SpectralModel, snr: float, history_len: Optional[int] = None) -> List[float]:
    """Per-symbol log[(1 + SNR)/(SNR sigma_k)] from finite-history predictors."""
    if model.T == 1:
        log_sigma = [prediction_logdet(model, snr)]
    else:
        log_sigma = [math.log(s) for s in innovation_variances(model, snr, history_len).sigmas]
    return [math.log1p(snr) - math.log(snr) - ls for ls in log_sigma]


def _upper_detailed(model: SpectralModel, snr: float) -> Tuple[float, float]:
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    logdet = prediction_logdet_detailed(model, snr)
    side_information = math.log1p(snr) - math.log(snr) - logdet.value / model.T
    return side_information + memoryless_term(snr), logdet.error / model.T


def capacity_upper(model: SpectralModel, snr: float) -> float:
    """
    Upper bound (1/T) sum_k log[(1 + SNR)/(SNR sigma_k)] + e^{1/SNR} E1(1/SNR).

    The sum of log sigma_k is taken as log det Sigma(SNR), which the
    per-symbol variances multiply to with infinite history.
    """
    return _upper_detailed(model, snr)[0]


def universal_lower(alpha: float, snr: float, x_min: Optional[float] = None) -> float:
    """Lower bound valid for every scalar spectrum vanishing on a set of measure alpha."""
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    x_min = math.sqrt(snr) / 2.0 if x_min is None else x_min
    flags: List[str] = []
    _check_x_min(snr, x_min, flags)
    term = _clamped_term(snr, worst_case_variance(alpha, x_min), flags)
    if flags:
        logger.info(f"universal_lower alpha={alpha} snr={snr}: {flags}")
    return term


def capacity_bound_point(
    model: SpectralModel,
    snr: float,
    x_min: Optional[float] = None,
    history_len: Optional[int] = None,
    distribution: str = "annulus-uniform",
) -> BoundPoint:
    """Lower and upper bound at one SNR with per-symbol breakdown and flags."""
    terms, flags, lower_error, x_min = _lower_terms(model, snr, x_min, history_len, distribution)
    lower = float(np.mean(terms))
    upper, upper_error = _upper_detailed(model, snr)
    flags.append("relaxed-upper")
    return BoundPoint(
        snr=snr,
        lower=lower,
        upper=upper,
        x_min=x_min,
        per_symbol_lower=terms,
        side_information_terms=side_information_terms(model, snr, history_len),
        memoryless_term=memoryless_term(snr),
        distribution=distribution,
        flags=flags,
        quadrature_error=max(lower_error, upper_error),
    )
