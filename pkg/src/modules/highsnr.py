"""
High-SNR behaviour of noncoherent block fading.

Pre-log from the rank profile of the spectral density, fading numbers of
regular processes, the worst-case scalar spectrum with a given zero set,
and the vanishing-spectrum and two-level families whose capacity grows
like a fractional power of log SNR.
"""

import logging
import math
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.config import config
from src.models.response_models import PrelogReport, TwoLevelRow
from src.modules.errors import InvalidParameterError, RegularityError
from src.modules.prediction import prediction_logdet_detailed
from src.modules.quadrature import midpoint_grid
from src.modules.spectra import (
    ScalarPiecewiseSpectrum,
    SpectralModel,
    flat_spectrum,
    scalar_model,
    two_level_spectrum,
)

logger = logging.getLogger(__name__)

EULER_GAMMA = 0.5772156649015329
DEFAULT_SLOPE_GRID = tuple(10.0 ** k for k in range(4, 13))
_EVAL_BATCH = 1024


class RateConstants(NamedTuple):
    """var ~ e^{c/2pi} / SNR^kappa for the vanishing-spectrum family."""

    kappa: float
    c: Optional[float]


# --- Pre-log ---------------------------------------------------------------


def _rank_counts(model: SpectralModel, grid_size: int, eig_threshold: float) -> Tuple[np.ndarray, int]:
    omega = midpoint_grid(grid_size)
    eigenvalues = np.concatenate(
        [np.linalg.eigvalsh(model.evaluate(omega[k:k + _EVAL_BATCH])) for k in range(0, grid_size, _EVAL_BATCH)]
    )
    lam_max = float(np.max(eigenvalues))
    if lam_max <= 0:
        raise InvalidParameterError("spectral density vanishes identically")
    threshold = eig_threshold * lam_max
    ranks = np.sum(eigenvalues > threshold, axis=1)
    near = (eigenvalues > threshold / 10.0) & (eigenvalues <= threshold * 10.0)
    ambiguous = int(np.count_nonzero(np.any(near, axis=1)))
    counts = np.bincount(ranks, minlength=model.T + 1)
    return counts, ambiguous


def rank_profile_measure(
    model: SpectralModel, grid_size: Optional[int] = None, eig_threshold: Optional[float] = None
) -> List[float]:
    """mu_i = Lebesgue measure of {w : rank S(e^{jw}) = i} for i = 0..T."""
    grid_size = grid_size or config.rank_grid
    eig_threshold = config.eig_threshold if eig_threshold is None else eig_threshold
    counts, _ = _rank_counts(model, grid_size, eig_threshold)
    return (counts * (2.0 * math.pi / grid_size)).tolist()


def rank_prelog(
    model: SpectralModel, grid_size: Optional[int] = None, eig_threshold: Optional[float] = None
) -> PrelogReport:
    """
    Pre-log from the rank profile: sum_i (T - i) mu_i / (2 pi T).

    Args:
        model: Spectral model
        grid_size: Midpoint grid resolution
        eig_threshold: Eigenvalues below this fraction of the global maximum
            count as zero

    Returns:
        PrelogReport with the rank measures and ambiguous grid count
    """
    grid_size = grid_size or config.rank_grid
    eig_threshold = config.eig_threshold if eig_threshold is None else eig_threshold
    counts, ambiguous = _rank_counts(model, grid_size, eig_threshold)
    T = model.T
    measures = counts * (2.0 * math.pi / grid_size)
    functional = float(sum((T - i) * measures[i] for i in range(T + 1)) / (2.0 * math.pi * T))
    if ambiguous:
        logger.warning(f"{ambiguous} grid points have eigenvalues within a decade of the rank threshold")
    return PrelogReport(
        prelog_rank=functional,
        rank_measures=measures.tolist(),
        ambiguous_points=ambiguous,
        flagged=ambiguous > 0,
    )


def slope_prelog(model: SpectralModel, snr_grid: Sequence[float] = DEFAULT_SLOPE_GRID, rel_tol: Optional[float] = None) -> float:
    """Least-squares slope of -log det Sigma(SNR) against T log SNR."""
    return _slope_prelog_detailed(model, snr_grid, rel_tol)[0]


def _slope_prelog_detailed(
    model: SpectralModel, snr_grid: Sequence[float], rel_tol: Optional[float]
) -> Tuple[float, float]:
    snr_grid = [float(s) for s in snr_grid]
    if len(snr_grid) < 2:
        raise InvalidParameterError("slope estimate needs at least two SNR values")
    x = np.array([model.T * math.log(s) for s in snr_grid])
    results = [prediction_logdet_detailed(model, s, rel_tol) for s in snr_grid]
    y = np.array([-r.value for r in results])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope), max(r.error for r in results)


def prelog_report(
    model: SpectralModel,
    snr_grid: Sequence[float] = DEFAULT_SLOPE_GRID,
    grid_size: Optional[int] = None,
    eig_threshold: Optional[float] = None,
    rel_tol: Optional[float] = None,
) -> PrelogReport:
    """Rank functional and slope estimate side by side, flagged when they disagree by more than 0.05."""
    report = rank_prelog(model, grid_size, eig_threshold)
    slope, error = _slope_prelog_detailed(model, snr_grid, rel_tol)
    disagree = abs(slope - report.prelog_rank) > 0.05
    if disagree:
        logger.warning(f"Pre-log estimates disagree: rank={report.prelog_rank:.4f} slope={slope:.4f}")
    return report.model_copy(update={
        "prelog_slope": slope,
        "snr_grid": list(snr_grid),
        "flagged": report.flagged or disagree,
        "quadrature_error": error,
    })


def epsilon_logdet_slope(pieces: Sequence[Tuple[float, np.ndarray]], eps_grid: Sequence[float]) -> float:
    """
    Slope of int log det(A + eps I) against log eps for a piecewise-constant
    PSD family; equals sum_i (M - i) mu(rank A = i) as eps -> 0.
    """
    x = np.log(np.asarray(eps_grid, dtype=float))
    y = []
    for eps in eps_grid:
        total = 0.0
        for measure, matrix in pieces:
            eigenvalues = np.linalg.eigvalsh(matrix)
            total += measure * float(np.sum(np.log(np.maximum(eigenvalues, 0.0) + eps)))
        y.append(total)
    slope, _ = np.polyfit(x, np.array(y), 1)
    return float(slope)


def rank_profile_of_pieces(pieces: Sequence[Tuple[float, np.ndarray]], eig_threshold: float = 1e-10) -> float:
    """sum_i (M - i) mu(rank = i) for a piecewise-constant family."""
    total = 0.0
    for measure, matrix in pieces:
        eigenvalues = np.linalg.eigvalsh(matrix)
        rank = int(np.sum(eigenvalues > eig_threshold * max(1.0, float(np.max(eigenvalues)))))
        total += measure * (matrix.shape[0] - rank)
    return total


def random_rank_family(rng: np.random.Generator, M: int, n_pieces: int) -> List[Tuple[float, np.ndarray]]:
    """Random piecewise-constant family of M x M PSD matrices with random ranks."""
    family = []
    for _ in range(n_pieces):
        rank = int(rng.integers(0, M + 1))
        b = rng.standard_normal((M, rank)) + 1j * rng.standard_normal((M, rank))
        family.append((float(rng.uniform(0.1, 1.0)), b @ b.conj().T))
    return family


# --- Fading number ---------------------------------------------------------


def fading_number(model: SpectralModel, rel_tol: Optional[float] = None) -> float:
    """
    Fading number -1 - gamma - (1/T) log det Sigma(inf) of a regular process.

    Raises:
        RegularityError: if det Sigma(inf) = 0
    """
    result = prediction_logdet_detailed(model, math.inf, rel_tol)
    if not math.isfinite(result.value):
        raise RegularityError("fading number requires a regular process: det Sigma(inf) > 0")
    return -1.0 - EULER_GAMMA - result.value / model.T


def block_gauss_markov_fading_number(T: int, rho1: complex, rho2: complex) -> float:
    """Closed form for the block Gauss-Markov process."""
    a = 1.0 - abs(rho1) ** 2
    b = 1.0 - abs(rho2) ** 2
    if a <= 0 or b <= 0:
        raise RegularityError("fading number requires a regular process: det Sigma(inf) > 0")
    return -1.0 - EULER_GAMMA - math.log(b) - (math.log(a) - math.log(b)) / T


# --- Worst-case spectrum ---------------------------------------------------


def worst_case_spectrum(alpha: float) -> ScalarPiecewiseSpectrum:
    """
    Spectrum maximizing the noisy-past prediction variance among unit-power
    spectra vanishing on a set of measure alpha: 0 on |w| <= alpha/2 and
    2pi/(2pi - alpha) elsewhere.
    """
    if not 0.0 <= alpha < 2.0 * math.pi:
        raise InvalidParameterError(f"alpha must lie in [0, 2pi), got {alpha}")
    if alpha == 0.0:
        return flat_spectrum()
    level = 2.0 * math.pi / (2.0 * math.pi - alpha)
    return ScalarPiecewiseSpectrum(segments=((0.0, alpha / 2.0, 0.0), (alpha / 2.0, math.pi, level)))


def worst_case_variance(alpha: float, x_min: float) -> float:
    """Largest noisy-past prediction variance over spectra vanishing on measure alpha."""
    if not 0.0 <= alpha < 2.0 * math.pi:
        raise InvalidParameterError(f"alpha must lie in [0, 2pi), got {alpha}")
    if not x_min > 0:
        raise InvalidParameterError(f"x_min must be positive, got {x_min}")
    noise = 1.0 / (x_min * x_min)
    level = 2.0 * math.pi / (2.0 * math.pi - alpha)
    weight = (2.0 * math.pi - alpha) / (2.0 * math.pi)
    log_value = weight * math.log(level + noise) + (1.0 - weight) * math.log(noise)
    return math.exp(log_value) - noise


# --- Vanishing spectrum and two-level family --------------------------------


def vanishing_spectrum_rate(alpha: float, r: float) -> RateConstants:
    """
    Decay exponent kappa and constant c of the noisy-past variance of
    vanishing_spectrum(alpha, SNR^r) observed in noise 4/SNR.

    c is None for r = 0, where the family does not vanish.
    """
    if not 0.0 <= alpha < 2.0 * math.pi:
        raise InvalidParameterError(f"alpha must lie in [0, 2pi), got {alpha}")
    if r < 0:
        raise InvalidParameterError(f"r must be non-negative, got {r}")
    kappa = (alpha + min(r, 1.0) * (2.0 * math.pi - alpha)) / (2.0 * math.pi)
    if r == 0:
        return RateConstants(kappa=kappa, c=None)
    if math.isclose(r, 1.0):
        c = alpha * math.log(4.0) + (2.0 * math.pi - alpha) * math.log(5.0)
    elif r < 1.0:
        c = alpha * math.log(4.0)
    else:
        c = 2.0 * math.pi * math.log(4.0)
    return RateConstants(kappa=kappa, c=c)


def two_level_variance(eps1: float, eps2: float, alpha1: float, alpha2: float, noise_var: float) -> float:
    """Closed-form noisy-past variance of the two-level spectrum."""
    top = (1.0 - alpha1 * eps1 - (alpha2 - alpha1) * eps2) / (1.0 - alpha2)
    log_value = (alpha1 * math.log(eps1 + noise_var) + (alpha2 - alpha1) * math.log(eps2 + noise_var)
                 + (1.0 - alpha2) * math.log(top + noise_var))
    return math.exp(log_value) - noise_var


def two_level_bounds(
    eps1: float, eps2: float, alpha1: float, alpha2: float, snr_grid: Sequence[float]
) -> List[TwoLevelRow]:
    """
    Capacity lower and upper bounds of the scalar two-level spectrum over an
    SNR grid, pilots at x_min = sqrt(SNR)/2.

    Returns:
        One TwoLevelRow per SNR
    """
    from src.modules.bounds import capacity_bound_point

    model = scalar_model(two_level_spectrum(eps1, eps2, alpha1, alpha2))
    rows = []
    for snr in snr_grid:
        point = capacity_bound_point(model, snr)
        rows.append(TwoLevelRow(
            snr=snr,
            lower=point.lower,
            upper=point.upper,
            variance_lower=two_level_variance(eps1, eps2, alpha1, alpha2, 4.0 / snr),
            variance_upper=two_level_variance(eps1, eps2, alpha1, alpha2, 1.0 / snr),
            flags=point.flags,
        ))
    return rows
