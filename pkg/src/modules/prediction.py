"""
Linear prediction of block fading from noisy or noiseless observations.

Covers the determinant of the block innovation covariance Sigma(SNR) via
Szego-Kolmogorov integrals, the finite-history per-symbol innovation
variances whose product matches it, and conditional MMSE variances for
arbitrary pilot sets.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from src.config import config
from src.models.response_models import PredictionSummary
from src.modules.errors import InvalidParameterError
from src.modules.quadrature import QuadratureResult, hermitian_logdet, midpoint_grid, spectral_integral
from src.modules.spectra import CorrelationSequence, ScalarPiecewiseSpectrum, SpectralModel

logger = logging.getLogger(__name__)

_SINGULAR_REL = 1e-12
_REGULARIZATION = 1e-12


def _noise_variance(snr: float) -> float:
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    return 0.0 if math.isinf(snr) else 1.0 / snr


def _singular_logdet(matrices: np.ndarray) -> np.ndarray:
    """log det allowing exact singularity (-inf) for noiseless spectra."""
    eigenvalues = np.linalg.eigvalsh(matrices)
    scale = np.max(np.abs(eigenvalues), axis=-1, keepdims=True)
    zeroed = np.where(eigenvalues <= _SINGULAR_REL * scale, 0.0, eigenvalues)
    with np.errstate(divide="ignore"):
        return np.sum(np.log(zeroed), axis=-1)


def prediction_logdet_detailed(model: SpectralModel, snr: float, rel_tol: Optional[float] = None) -> QuadratureResult:
    """
    log det Sigma(SNR) = (1/2pi) int log det[S(e^{jw}) + I/SNR] dw.

    At snr = inf the noiseless value is returned; it is -inf whenever S is
    singular on a set of positive measure.

    Args:
        model: Spectral model
        snr: Signal-to-noise ratio, > 0 (math.inf for noiseless)
        rel_tol: Relative quadrature tolerance

    Returns:
        QuadratureResult with the value and achieved error
    """
    noise = _noise_variance(snr)
    T = model.T
    if noise > 0:
        identity = noise * np.eye(T)

        def integrand(matrices: np.ndarray) -> np.ndarray:
            return hermitian_logdet(matrices + identity)

        return spectral_integral(model, integrand, rel_tol=rel_tol)

    if model.pieces() is not None:
        return spectral_integral(model, _singular_logdet, rel_tol=rel_tol)

    grid = midpoint_grid(config.rank_grid)
    singular = np.isneginf(_singular_logdet(model.evaluate(grid)))
    if int(np.count_nonzero(singular)) >= 2:
        fraction = float(np.mean(singular))
        logger.info(f"Noiseless spectrum singular on {fraction:.4f} of the circle; log det Sigma(inf) = -inf")
        return QuadratureResult(value=float("-inf"), error=0.0, panels=0)

    def clamped(matrices: np.ndarray) -> np.ndarray:
        return hermitian_logdet(matrices)

    return spectral_integral(model, clamped, rel_tol=rel_tol)


def prediction_logdet(model: SpectralModel, snr: float, rel_tol: Optional[float] = None) -> float:
    """log det Sigma(SNR) of the block innovation covariance."""
    return prediction_logdet_detailed(model, snr, rel_tol).value


def _conditional_variance(cov: np.ndarray) -> Tuple[float, bool]:
    """
    Variance of the last coordinate given all the others.

    The last diagonal entry of the Cholesky factor is the conditional
    standard deviation.
    """
    try:
        chol = scipy.linalg.cholesky(cov, lower=True)
        return float(np.real(chol[-1, -1]) ** 2), False
    except np.linalg.LinAlgError:
        delta = _REGULARIZATION * max(1.0, float(np.mean(np.real(np.diag(cov)))))
        logger.warning(f"Covariance not positive definite; regularizing with {delta:.1e} * I")
        chol = scipy.linalg.cholesky(cov + delta * np.eye(cov.shape[0]), lower=True)
        return float(np.real(chol[-1, -1]) ** 2), True


def finite_history_variance(
    corr: CorrelationSequence, target: int, history_len: int, noise_var: float
) -> Tuple[float, bool]:
    """
    One-step prediction error variance of y_target from its history_len
    predecessors y_t = h_t + z_t, with E|z_t|^2 = noise_var.

    Returns:
        (variance of h_target given the noisy past, regularized flag)
    """
    indices = np.arange(target - history_len, target + 1)
    cov = corr.covariance(indices)
    if noise_var > 0 and history_len > 0:
        cov[np.arange(history_len), np.arange(history_len)] += noise_var
    fading_var, regularized = _conditional_variance(cov)
    return max(fading_var, 0.0), regularized


def _lags_needed(T: int, history_len: int) -> int:
    return (history_len + T) // T + 1


def _resolve_correlation(source: Union[SpectralModel, CorrelationSequence], history_len: int) -> CorrelationSequence:
    if isinstance(source, CorrelationSequence):
        return source
    return source.correlation(_lags_needed(source.T, history_len))


def innovation_variances(
    source: Union[SpectralModel, CorrelationSequence],
    snr: float,
    history_len: Optional[int] = None,
    extrapolate: bool = False,
    rel_tol: Optional[float] = None,
) -> PredictionSummary:
    """
    Per-symbol one-step prediction error variances sigma_i(SNR) of the
    noisy output, each from the history_len preceding symbols.

    Args:
        source: Spectral model or correlation sequence
        snr: Signal-to-noise ratio, > 0
        history_len: Number of past symbols per predictor (config default)
        extrapolate: Also report the two-point extrapolation 2 sigma(2n) - sigma(n)
        rel_tol: Quadrature tolerance for the determinant comparison

    Returns:
        PredictionSummary with sigmas, the determinant and their log gap
    """
    history_len = config.history_len if history_len is None else history_len
    if history_len < 0:
        raise InvalidParameterError(f"history length must be non-negative, got {history_len}")
    noise = _noise_variance(snr)
    T = source.T
    corr = _resolve_correlation(source, 2 * history_len if extrapolate else history_len)

    warnings: List[str] = []
    regularized = False

    def sweep(n: int) -> List[float]:
        nonlocal regularized
        values = []
        for position in range(T):
            fading_var, reg = finite_history_variance(corr, position, n, noise)
            regularized = regularized or reg
            values.append(fading_var + noise)
        return values

    sigmas = sweep(history_len)
    extrapolated = None
    if extrapolate:
        doubled = sweep(2 * history_len)
        extrapolated = [max(2.0 * b - a, noise) for a, b in zip(sigmas, doubled)]
    if regularized:
        warnings.append("regularized")

    with np.errstate(divide="ignore"):
        ldl_logdet = float(np.sum(np.log(sigmas)))

    logdet_snr = None
    logdet_inf = None
    logdet_gap = None
    achieved = None
    if isinstance(source, SpectralModel):
        result = prediction_logdet_detailed(source, snr, rel_tol)
        logdet_snr = result.value
        achieved = result.error
        logdet_gap = ldl_logdet - logdet_snr
        tolerance = 10.0 * max(config.quadrature_tol if rel_tol is None else rel_tol, achieved)
        if abs(logdet_gap) > tolerance * max(1.0, abs(logdet_snr)):
            warnings.append(
                f"sum log sigma_i exceeds log det Sigma by {logdet_gap:.3e}; increase history_len"
            )
        logdet_inf = prediction_logdet(source, math.inf, rel_tol)

    logger.debug(f"innovation_variances T={T} snr={snr} n={history_len} sigmas={sigmas}")
    return PredictionSummary(
        snr=snr,
        T=T,
        history_len=history_len,
        sigmas=sigmas,
        sigmas_extrapolated=extrapolated,
        logdet_sigma_snr=logdet_snr,
        logdet_sigma_inf=logdet_inf,
        logdet_ldl=ldl_logdet,
        logdet_gap=logdet_gap,
        quadrature_error=achieved,
        warnings=warnings,
    )


def conditional_mmse_variance(
    source: Union[SpectralModel, CorrelationSequence],
    target: int,
    pilots: Sequence[int],
    snr: float,
) -> float:
    """
    Variance of h_target given noisy observations of the pilot symbols.

    Args:
        source: Spectral model or correlation sequence
        target: Global symbol index to estimate
        pilots: Global symbol indices observed in noise 1/snr
        snr: Pilot signal-to-noise ratio (> 0, math.inf for noiseless)

    Returns:
        Conditional variance in [0, 1]
    """
    noise = _noise_variance(snr)
    pilots = [int(p) for p in pilots]
    if target in pilots and noise == 0.0:
        return 0.0
    if not pilots:
        return 1.0
    indices = pilots + [int(target)]
    span = (max(indices) // source.T) - (min(indices) // source.T)
    corr = source if isinstance(source, CorrelationSequence) else source.correlation(span + 1)
    cov = corr.covariance(indices)
    cov[np.arange(len(pilots)), np.arange(len(pilots))] += noise
    variance, _ = _conditional_variance(cov)
    return min(max(variance, 0.0), 1.0)


def noisy_past_prediction_variance_detailed(
    spectrum: Union[ScalarPiecewiseSpectrum, SpectralModel], x_min: float
) -> Tuple[float, float]:
    """
    Variance of h_0 given the infinite past observed in noise 1/x_min^2,
    with the quadrature error of the log integral behind it.

    Uses var = exp((1/2pi) int log(s + 1/x_min^2) dw) - 1/x_min^2, exact for
    piecewise spectra and by quadrature for other scalar models.
    """
    if not x_min > 0:
        raise InvalidParameterError(f"x_min must be positive, got {x_min}")
    noise = 1.0 / (x_min * x_min)
    if isinstance(spectrum, ScalarPiecewiseSpectrum):
        log_total, error = spectrum.log_integral(noise), 0.0
    else:
        if spectrum.T != 1:
            raise InvalidParameterError("noisy-past prediction variance is defined for scalar (T=1) models")
        result = prediction_logdet_detailed(spectrum, x_min * x_min)
        log_total, error = result.value, result.error
    return min(max(math.exp(log_total) - noise, 0.0), 1.0), math.exp(log_total) * error


def noisy_past_prediction_variance(spectrum: Union[ScalarPiecewiseSpectrum, SpectralModel], x_min: float) -> float:
    """Variance of h_0 given the infinite past observed in noise 1/x_min^2."""
    return noisy_past_prediction_variance_detailed(spectrum, x_min)[0]


def prediction_sandwich(model: SpectralModel, snr: float, rel_tol: Optional[float] = None) -> Tuple[Optional[float], float, float]:
    """
    log det of the three sides of det[Sigma(inf) + I/SNR] <= det Sigma(SNR) <= det[R(0) + I/SNR].

    The left side is only available for scalar models, where Sigma(inf) is
    the noiseless innovation variance.
    """
    noise = _noise_variance(snr)
    middle = prediction_logdet(model, snr, rel_tol)
    r0 = model.correlation(0).matrix(0)
    upper = float(hermitian_logdet((r0 + noise * np.eye(model.T))[np.newaxis])[0])
    lower = None
    if model.T == 1:
        noiseless = prediction_logdet(model, math.inf, rel_tol)
        lower = math.log(math.exp(noiseless) + noise)
    return lower, middle, upper
