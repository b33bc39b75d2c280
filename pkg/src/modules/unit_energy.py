"""
Capacity per unit energy of noncoherent block fading.

Peak-constrained capacity per unit energy equals
1 - min_M Psi(M) / (2 pi SNR), where the minimum runs over non-empty
subsets M of the block positions and
Psi(M) = (1/|M|) int log det[I + SNR S_M(e^{jw})] dw.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from src.config import config
from src.models.response_models import AsymptoteResult, ClosedFormCp, CrossoverResult, SubsetEntry, SubsetScan
from src.modules.errors import ConditionViolationError, InvalidParameterError
from src.modules.quadrature import hermitian_logdet, midpoint_grid, spectral_integral
from src.modules.spectra import (
    ConstantWithinBlockModel,
    ScalarGaussMarkovModel,
    ScalarModel,
    SpectralModel,
    flat_spectrum,
    has_szasz_symmetry,
)

logger = logging.getLogger(__name__)

_CROSSOVER_SCAN = np.logspace(-4, 8, 49)


def subset_label(mask: int, T: int) -> str:
    """'{1,3}' style label with 1-based positions."""
    return "{" + ",".join(str(k + 1) for k in range(T) if mask >> k & 1) + "}"


def subset_mask(subset: Iterable[int], T: int) -> int:
    """Bitmask of a collection of 1-based positions."""
    mask = 0
    for k in subset:
        if not 1 <= int(k) <= T:
            raise InvalidParameterError(f"subset position {k} outside 1..{T}")
        mask |= 1 << (int(k) - 1)
    if mask == 0:
        raise InvalidParameterError("subset must be non-empty")
    return mask


def _positions(mask: int, T: int) -> np.ndarray:
    return np.array([k for k in range(T) if mask >> k & 1])


class _SubModel:
    """Principal submatrix view of a spectral model."""

    def __init__(self, model: SpectralModel, positions: np.ndarray):
        self.model = model
        self.index = np.ix_(positions, positions)
        self.T = len(positions)

    def evaluate(self, omega):
        values = self.model.evaluate(omega)
        return values[(slice(None),) + self.index]

    def pieces(self):
        pieces = self.model.pieces()
        if pieces is None:
            return None
        return [(measure, matrix[self.index]) for measure, matrix in pieces]

    def breakpoints(self):
        return self.model.breakpoints()


def subset_logdet_integral(
    model: SpectralModel, subset: Iterable[int], snr: float, rel_tol: Optional[float] = None
) -> float:
    """
    Psi(M) for a subset of 1-based block positions.

    Args:
        model: Spectral model
        subset: Non-empty collection of positions in 1..T
        snr: Signal-to-noise ratio, > 0
        rel_tol: Quadrature tolerance

    Returns:
        (1/|M|) int_{-pi}^{pi} log det[I + SNR S_M] dw
    """
    return _psi(model, subset_mask(subset, model.T), snr, rel_tol)


def _psi(model: SpectralModel, mask: int, snr: float, rel_tol: Optional[float]) -> float:
    return _psi_detailed(model, mask, snr, rel_tol)[0]


def _psi_detailed(model: SpectralModel, mask: int, snr: float, rel_tol: Optional[float]) -> Tuple[float, float]:
    """Psi and its quadrature error estimate."""
    if not snr > 0:
        raise InvalidParameterError(f"SNR must be positive, got {snr}")
    positions = _positions(mask, model.T)
    size = len(positions)
    identity = np.eye(size)

    def integrand(matrices: np.ndarray) -> np.ndarray:
        return hermitian_logdet(identity + snr * matrices)

    result = spectral_integral(_SubModel(model, positions), integrand, rel_tol=rel_tol)
    return 2.0 * math.pi * result.value / size, 2.0 * math.pi * result.error / size


def cp_scan(model: SpectralModel, snr: float, rel_tol: Optional[float] = None, jobs: Optional[int] = None) -> SubsetScan:
    """
    Capacity per unit energy by exhaustive scan of the 2^T - 1 subsets.

    Subsets whose Psi lies within the tie tolerance of the minimum are all
    reported as minimizers.

    Raises:
        InvalidParameterError: if T exceeds the scan limit
    """
    T = model.T
    if T > config.max_subset_T:
        raise InvalidParameterError(
            f"subset scan limited to T <= {config.max_subset_T} (got T={T}); for equicorrelated blocks the full "
            "set is optimal, use cp_block_indep_constant or cp_block_gauss_markov"
        )
    masks = list(range(1, 1 << T))
    jobs = jobs or config.jobs
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            detailed = list(executor.map(lambda m: _psi_detailed(model, m, snr, rel_tol), masks))
    else:
        detailed = [_psi_detailed(model, m, snr, rel_tol) for m in masks]
    psis = [value for value, _ in detailed]

    min_psi = min(psis)
    cutoff = min_psi + config.tie_tol * max(abs(min_psi), 1e-300)
    argmin = [m for m, p in zip(masks, psis) if p <= cutoff]
    advisories = []
    if has_szasz_symmetry(model):
        advisories.append("equicorrelated structure: the full set is expected to minimize Psi")
    if len(argmin) > 1:
        logger.info(f"Tie between subsets {[subset_label(m, T) for m in argmin]} at SNR={snr}")
    return SubsetScan(
        snr=snr,
        cp=1.0 - min_psi / (2.0 * math.pi * snr),
        min_psi=min_psi,
        argmin=argmin,
        argmin_labels=[subset_label(m, T) for m in argmin],
        entries=[SubsetEntry(mask=m, label=subset_label(m, T), psi=p) for m, p in zip(masks, psis)],
        advisories=advisories,
        quadrature_error=max(error for _, error in detailed),
    )


def cp_block_indep_constant(T: int, snr: float) -> float:
    """Independent blocks with constant fading inside: 1 - log(1 + T SNR)/(T SNR)."""
    if T < 1 or not snr > 0:
        raise InvalidParameterError(f"need T >= 1 and SNR > 0, got T={T}, SNR={snr}")
    x = T * snr
    return 1.0 - math.log1p(x) / x


def cp_block_gauss_markov(T: int, snr: float, rho: complex) -> float:
    """
    Blocks constant inside, Gauss-Markov across blocks with coefficient rho:
    1 - log(gamma0)/(T SNR), gamma0 the larger root of g^2 - b g + |rho|^2.
    """
    if T < 1 or not snr > 0:
        raise InvalidParameterError(f"need T >= 1 and SNR > 0, got T={T}, SNR={snr}")
    r2 = abs(rho) ** 2
    if r2 >= 1.0:
        raise InvalidParameterError(f"|rho| must be < 1, got {abs(rho)}")
    x = T * snr
    b = 1.0 + x + r2 * (1.0 - x)
    gamma0 = 0.5 * (b + math.sqrt(b * b - 4.0 * r2))
    return 1.0 - math.log(gamma0) / x


def closed_form_cp(model: SpectralModel, snr: float) -> Optional[ClosedFormCp]:
    """
    Closed-form capacity per unit energy when the model is constant within
    blocks with iid or Gauss-Markov block fading; None for any other model.
    """
    if not isinstance(model, ConstantWithinBlockModel):
        return None
    inner = model.inner
    if isinstance(inner, ScalarModel) and inner.spectrum.segments == flat_spectrum().segments:
        return ClosedFormCp(snr=snr, cp=cp_block_indep_constant(model.T, snr), formula="block-independent-constant")
    if isinstance(inner, ScalarGaussMarkovModel):
        return ClosedFormCp(
            snr=snr, cp=cp_block_gauss_markov(model.T, snr, inner.rho), formula="block-gauss-markov"
        )
    return None


def paired_block_closed_forms(rho: complex, snr: float) -> Dict[str, float]:
    """Psi of every subset of the paired-block model."""
    r2 = abs(rho) ** 2
    s = snr
    return {
        "{1}": 2.0 * math.pi * math.log1p(s),
        "{2}": 2.0 * math.pi * math.log1p(s),
        "{3}": 2.0 * math.pi * math.log1p(s),
        "{1,2}": math.pi * math.log1p(2.0 * s),
        "{1,3}": math.pi * math.log(1.0 + 2.0 * s + s * s - r2 * s * s),
        "{2,3}": math.pi * math.log(1.0 + 2.0 * s + s * s - r2 * s * s),
        "{1,2,3}": (2.0 * math.pi / 3.0) * math.log(1.0 + 3.0 * s + 2.0 * s * s - 2.0 * r2 * s * s),
    }


def paired_block_crossover(rho: float) -> Optional[float]:
    """SNR where {1,2} and {1,2,3} tie, None when one dominates everywhere."""
    if rho <= 0.5 or rho >= 1.0:
        return None
    return (2.0 * rho - 1.0) / (2.0 * (1.0 - rho) ** 2)


def crossover_snr(
    model: SpectralModel,
    first: Sequence[int],
    second: Sequence[int],
    lo: Optional[float] = None,
    hi: Optional[float] = None,
    rel_tol: float = 1e-9,
) -> CrossoverResult:
    """
    SNR where Psi(first) = Psi(second), by bisection in log SNR.

    Without an explicit bracket the SNR range 1e-4..1e8 is scanned for a
    sign change.
    """
    m1 = subset_mask(first, model.T)
    m2 = subset_mask(second, model.T)

    def gap(snr: float) -> float:
        return _psi(model, m1, snr, None) - _psi(model, m2, snr, None)

    if lo is None or hi is None:
        values = [gap(s) for s in _CROSSOVER_SCAN]
        bracket = next(
            ((a, b) for a, b, fa, fb in zip(_CROSSOVER_SCAN[:-1], _CROSSOVER_SCAN[1:], values[:-1], values[1:])
             if fa == 0.0 or fa * fb < 0.0),
            None,
        )
        if bracket is None:
            raise InvalidParameterError(
                f"no crossover between {subset_label(m1, model.T)} and {subset_label(m2, model.T)} in 1e-4..1e8"
            )
        lo, hi = float(bracket[0]), float(bracket[1])

    f_lo = gap(lo)
    if f_lo == 0.0:
        hi = lo
    elif f_lo * gap(hi) > 0.0:
        raise InvalidParameterError(f"bracket [{lo}, {hi}] does not contain a crossover")
    a, b = math.log(lo), math.log(hi)
    while b - a > rel_tol:
        mid = 0.5 * (a + b)
        f_mid = gap(math.exp(mid))
        if f_mid == 0.0:
            a = b = mid
            break
        if f_mid * f_lo < 0.0:
            b = mid
        else:
            a, f_lo = mid, f_mid
    snr = math.exp(0.5 * (a + b))
    psi, error = _psi_detailed(model, m1, snr, None)
    error = max(error, _psi_detailed(model, m2, snr, None)[1])
    return CrossoverResult(
        snr=snr,
        first=subset_label(m1, model.T),
        second=subset_label(m2, model.T),
        psi=psi,
        quadrature_error=error,
    )


def _subset_eigenvalues(model: SpectralModel, positions: np.ndarray, grid_size: int) -> np.ndarray:
    omega = midpoint_grid(grid_size)
    values = model.evaluate(omega)[(slice(None),) + np.ix_(positions, positions)]
    return np.linalg.eigvalsh(values)


def cp_high_asymptote(
    model: SpectralModel,
    snr: float,
    grid_size: Optional[int] = None,
    eig_threshold: Optional[float] = None,
) -> AsymptoteResult:
    """
    Large-SNR approximation 1 - min_M sum_i i mu(rank S_M = i) log SNR / (2 pi |M| SNR).
    """
    grid_size = grid_size or config.rank_grid
    eig_threshold = config.eig_threshold if eig_threshold is None else eig_threshold
    T = model.T
    _check_scan_size(T)
    criterion: Dict[str, float] = {}
    lam_max = float(np.max(np.linalg.eigvalsh(model.evaluate(midpoint_grid(grid_size)))))
    for mask in range(1, 1 << T):
        positions = _positions(mask, T)
        eigenvalues = _subset_eigenvalues(model, positions, grid_size)
        ranks = np.sum(eigenvalues > eig_threshold * lam_max, axis=1)
        mean_rank = float(np.mean(ranks))
        criterion[subset_label(mask, T)] = mean_rank / len(positions)
    best = min(criterion.values())
    argmin = [label for label, value in criterion.items() if value <= best + config.tie_tol]
    return AsymptoteResult(
        regime="high-snr",
        snr=snr,
        cp=1.0 - best * math.log(snr) / snr,
        argmin_labels=argmin,
        criterion=criterion,
    )


def cp_low_asymptote(model: SpectralModel, snr: float, rel_tol: Optional[float] = None) -> AsymptoteResult:
    """
    Small-SNR approximation (SNR / 4 pi) max_M (1/|M|) int tr S_M^2 dw.

    Raises:
        ConditionViolationError: if the trace integral is not finite
    """
    T = model.T
    _check_scan_size(T)
    criterion: Dict[str, float] = {}
    error = 0.0
    for mask in range(1, 1 << T):
        positions = _positions(mask, T)

        def integrand(matrices: np.ndarray) -> np.ndarray:
            return np.real(np.einsum("nab,nba->n", matrices, matrices))

        result = spectral_integral(_SubModel(model, positions), integrand, rel_tol=rel_tol)
        value = 2.0 * math.pi * result.value / len(positions)
        if not math.isfinite(value):
            raise ConditionViolationError("small-SNR asymptote needs int tr S^2 to be finite")
        criterion[subset_label(mask, T)] = value
        error = max(error, 2.0 * math.pi * result.error / len(positions))
    best = max(criterion.values())
    argmax = [label for label, value in criterion.items() if value >= best - config.tie_tol * abs(best)]
    return AsymptoteResult(
        regime="low-snr",
        snr=snr,
        cp=snr * best / (4.0 * math.pi),
        argmin_labels=argmax,
        criterion=criterion,
        quadrature_error=error,
    )


def _check_scan_size(T: int) -> None:
    if T > config.max_subset_T:
        raise InvalidParameterError(f"subset scan limited to T <= {config.max_subset_T} (got T={T})")


def cp_curve(model: SpectralModel, snr_grid: Sequence[float], rel_tol: Optional[float] = None) -> List[Tuple[float, float]]:
    """(SNR, Cp) pairs from repeated subset scans."""
    return [(snr, cp_scan(model, snr, rel_tol).cp) for snr in snr_grid]
