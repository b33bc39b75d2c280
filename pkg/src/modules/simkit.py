"""
Monte Carlo sample paths of block-stationary fading.

Paths are drawn from the exact window covariance through its Cholesky
factor. Each path owns a Philox generator keyed by (seed, path index), so
results do not depend on how paths are spread over workers.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
import scipy.linalg

from src.config import config
from src.models.response_models import SimulationRow
from src.modules.errors import InvalidParameterError
from src.modules.prediction import conditional_mmse_variance
from src.modules.spectra import SpectralModel

logger = logging.getLogger(__name__)

MIN_PATHS = 100
_CHUNK = 256


@dataclass(frozen=True)
class SimConfig:
    model: SpectralModel
    num_paths: int
    path_len: int
    seed: int = 0
    snr: float = math.inf

    def __post_init__(self):
        if self.num_paths < 1:
            raise InvalidParameterError(f"num_paths must be positive, got {self.num_paths}")
        if self.path_len < 1 or self.path_len % self.model.T:
            raise InvalidParameterError(f"path_len must be a positive multiple of T={self.model.T}")
        if not self.snr > 0:
            raise InvalidParameterError(f"SNR must be positive, got {self.snr}")


@dataclass(frozen=True)
class PathBatch:
    """Fading samples, unit-variance noise samples and the regularization used."""

    fading: np.ndarray
    noise: np.ndarray
    regularization: float

    def observations(self, snr: float) -> np.ndarray:
        return self.fading if math.isinf(snr) else self.fading + self.noise / math.sqrt(snr)


def _standard_complex(rng: np.random.Generator, size: int) -> np.ndarray:
    draws = rng.standard_normal((2, size))
    return (draws[0] + 1j * draws[1]) / math.sqrt(2.0)


def _window_factor(model: SpectralModel, path_len: int):
    corr = model.correlation(path_len // model.T + 1)
    cov = corr.covariance(np.arange(path_len))
    try:
        return scipy.linalg.cholesky(cov, lower=True), 0.0
    except np.linalg.LinAlgError:
        eigenvalues = np.linalg.eigvalsh(cov)
        delta = max(-float(eigenvalues[0]), 0.0) + 1e-10
        logger.warning(f"Window covariance not positive definite; adding {delta:.2e} * I")
        return scipy.linalg.cholesky(cov + delta * np.eye(path_len), lower=True), delta


def generate_paths(cfg: SimConfig, jobs: Optional[int] = None) -> PathBatch:
    """
    Draw cfg.num_paths fading paths of length cfg.path_len.

    Args:
        cfg: Simulation configuration
        jobs: Worker threads; the output is identical for any value

    Returns:
        PathBatch with (num_paths, path_len) fading and noise arrays
    """
    factor, delta = _window_factor(cfg.model, cfg.path_len)
    white = np.empty((cfg.num_paths, cfg.path_len), dtype=complex)
    noise = np.empty_like(white)

    def draw(start: int, stop: int) -> None:
        for p in range(start, stop):
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, p])))
            white[p] = _standard_complex(rng, cfg.path_len)
            noise[p] = _standard_complex(rng, cfg.path_len)

    chunks = [(s, min(s + _CHUNK, cfg.num_paths)) for s in range(0, cfg.num_paths, _CHUNK)]
    jobs = jobs or config.jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            futures = [executor.submit(draw, s, e) for s, e in chunks]
            for future in as_completed(futures):
                future.result()
    else:
        for s, e in chunks:
            draw(s, e)

    return PathBatch(fading=white @ factor.T, noise=noise, regularization=delta)


def _estimate(errors: np.ndarray) -> tuple:
    power = np.abs(errors) ** 2
    return float(np.mean(power)), float(np.std(power, ddof=1) / math.sqrt(power.size))


def _linear_estimator(cov_pp: np.ndarray, cross: np.ndarray) -> np.ndarray:
    factor = scipy.linalg.cho_factor(cov_pp, lower=True)
    return scipy.linalg.cho_solve(factor, cross)


def empirical_prediction_variance(cfg: SimConfig, history_len: int, jobs: Optional[int] = None) -> List[SimulationRow]:
    """
    Empirical one-step prediction error of the noisy output at each block
    position, using the analytic finite-history Wiener weights.

    Returns:
        One SimulationRow per block position with mean and standard error
    """
    T = cfg.model.T
    if cfg.num_paths < MIN_PATHS:
        raise InvalidParameterError(f"insufficient samples: need at least {MIN_PATHS} paths, got {cfg.num_paths}")
    if cfg.path_len < history_len + T:
        raise InvalidParameterError(f"path_len must be at least history_len + T = {history_len + T}")

    batch = generate_paths(cfg, jobs)
    observed = batch.observations(cfg.snr)
    noise = 0.0 if math.isinf(cfg.snr) else 1.0 / cfg.snr
    corr = cfg.model.correlation(cfg.path_len // T + 1)

    rows = []
    for position in range(T):
        target = history_len + (position - history_len) % T
        past = np.arange(target - history_len, target)
        cov = corr.covariance(np.append(past, target))
        cov_pp = cov[:-1, :-1] + noise * np.eye(history_len)
        cross = cov[:-1, -1]
        if history_len:
            weights = _linear_estimator(cov_pp, cross)
            prediction = observed[:, past] @ weights.conj()
            analytic = float(np.real(cov[-1, -1] - cross.conj() @ weights)) + noise
        else:
            prediction = np.zeros(cfg.num_paths, dtype=complex)
            analytic = 1.0 + noise
        mean, stderr = _estimate(observed[:, target] - prediction)
        rows.append(SimulationRow(
            position=position, snr=cfg.snr, analytic=analytic, empirical=mean, stderr=stderr,
            z_score=(mean - analytic) / stderr if stderr > 0 else 0.0,
        ))
    return rows


def empirical_interpolation_variance(
    cfg: SimConfig, target: int, pilots: Sequence[int], jobs: Optional[int] = None
) -> SimulationRow:
    """Empirical MMSE of h_target from noisy pilots against the analytic conditional variance."""
    if cfg.num_paths < MIN_PATHS:
        raise InvalidParameterError(f"insufficient samples: need at least {MIN_PATHS} paths, got {cfg.num_paths}")
    pilots = [int(p) for p in pilots]
    if not all(0 <= i < cfg.path_len for i in pilots + [target]):
        raise InvalidParameterError("target and pilots must lie inside the path")

    batch = generate_paths(cfg, jobs)
    observed = batch.observations(cfg.snr)
    noise = 0.0 if math.isinf(cfg.snr) else 1.0 / cfg.snr
    corr = cfg.model.correlation(cfg.path_len // cfg.model.T + 1)
    cov = corr.covariance(pilots + [target])
    cov_pp = cov[:-1, :-1] + noise * np.eye(len(pilots))
    weights = _linear_estimator(cov_pp, cov[:-1, -1])
    estimate = observed[:, pilots] @ weights.conj()

    mean, stderr = _estimate(batch.fading[:, target] - estimate)
    analytic = conditional_mmse_variance(corr, target, pilots, cfg.snr)
    return SimulationRow(
        position=target % cfg.model.T, snr=cfg.snr, analytic=analytic, empirical=mean, stderr=stderr,
        z_score=(mean - analytic) / stderr if stderr > 0 else 0.0,
    )
