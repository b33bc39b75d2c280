"""
Channel models for block-stationary Gaussian fading.

Provides correlation sequences R(i) = E h_k h_{k-i}^H of the length-T block
process, matrix spectral densities S(e^{jw}) = sum_i R(i) e^{-jwi}, and the
parametric spectrum families used throughout the toolkit. All objects are
immutable after construction and validated on creation.
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np

from src.config import config
from src.modules.errors import InvalidModelError, InvalidParameterError
from src.modules.quadrature import midpoint_grid

logger = logging.getLogger(__name__)

_NORMALIZATION_TOL = 1e-12
_GRID_NORMALIZATION_TOL = 1e-6
_EVAL_CHUNK = 1 << 22


def _ipow(z: complex, n: int) -> complex:
    """z**n with 0**0 == 1 for complex z."""
    return complex(1.0) if n == 0 else complex(z) ** n


def _as_omega(omega) -> np.ndarray:
    return np.atleast_1d(np.asarray(omega, dtype=float)).ravel()


# --- Correlation sequences -------------------------------------------------


@dataclass(frozen=True)
class CorrelationSequence:
    """
    Block correlation sequence of a vector-stationary fading process.

    lags[i] holds the T x T matrix R(i) for i = 0..max_lag; negative lags are
    implied by R(-i) = R(i)^H. Lags beyond max_lag are outside the window and
    requesting them is an error.
    """

    T: int
    lags: Tuple[np.ndarray, ...]
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.T < 1:
            raise InvalidParameterError(f"block length T must be positive, got {self.T}")
        if not self.lags:
            raise InvalidModelError("correlation sequence needs at least R(0)")

        frozen = []
        for i, matrix in enumerate(self.lags):
            arr = np.array(matrix, dtype=complex).reshape(self.T, self.T)
            arr.setflags(write=False)
            frozen.append(arr)
        object.__setattr__(self, "lags", tuple(frozen))
        object.__setattr__(self, "_stack", np.stack(frozen))

        r0 = frozen[0]
        if np.max(np.abs(r0 - r0.conj().T)) > self.tolerance:
            raise InvalidModelError("R(0) is not Hermitian")
        diag = np.real(np.diag(r0))
        if np.max(np.abs(diag - 1.0)) > self.tolerance:
            raise InvalidModelError(f"R(0) must have unit diagonal (unit-variance fading), got {diag.tolist()}")
        min_eig = float(np.min(np.linalg.eigvalsh(r0)))
        if min_eig < -self.tolerance:
            raise InvalidModelError(f"R(0) is not positive semidefinite (min eigenvalue {min_eig:.3e})")
        # Entrywise: R(0) = J_T of constant-within-block fading has spectral norm T.
        for i, matrix in enumerate(frozen):
            largest = float(np.max(np.abs(matrix)))
            if largest > 1.0 + self.tolerance:
                raise InvalidModelError(f"R({i}) has an entry of modulus {largest:.6f} > 1")

    @classmethod
    def from_mapping(cls, T: int, mapping: Mapping[int, Any], tolerance: float = 1e-8) -> "CorrelationSequence":
        """Build from a sparse {lag: matrix} mapping; missing lags are zero."""
        if any(i < 0 for i in mapping):
            raise InvalidModelError("only lags i >= 0 are stored; R(-i) = R(i)^H is implied")
        if 0 not in mapping:
            raise InvalidModelError("R(0) is required")
        max_lag = max(mapping)
        lags = [np.asarray(mapping[i], dtype=complex) if i in mapping else np.zeros((T, T), dtype=complex)
                for i in range(max_lag + 1)]
        return cls(T=T, lags=tuple(lags), tolerance=tolerance)

    @property
    def max_lag(self) -> int:
        return len(self.lags) - 1

    def matrix(self, i: int) -> np.ndarray:
        """R(i) for any integer lag inside the window."""
        if abs(i) > self.max_lag:
            raise InvalidParameterError(f"lag {i} outside the correlation window (max_lag={self.max_lag})")
        return self.lags[i] if i >= 0 else self.lags[-i].conj().T

    def truncated(self, max_lag: int) -> "CorrelationSequence":
        """Same process restricted to lags 0..max_lag."""
        return CorrelationSequence(T=self.T, lags=self.lags[: max_lag + 1], tolerance=self.tolerance)

    def covariance(self, indices: Sequence[int]) -> np.ndarray:
        """
        Covariance E[h_t h_s^*] of the symbols at the given global indices.

        Symbol t sits in block floor(t/T) at position t mod T.

        Args:
            indices: Global symbol indices (may be negative)

        Returns:
            Hermitian (n, n) complex matrix
        """
        t = np.asarray(indices, dtype=np.int64)
        blocks = np.floor_divide(t, self.T)
        positions = np.mod(t, self.T)
        d = blocks[:, None] - blocks[None, :]
        if d.size and int(np.max(np.abs(d))) > self.max_lag:
            raise InvalidParameterError(
                f"symbol indices span {int(np.max(np.abs(d)))} blocks but the window holds {self.max_lag}"
            )
        pos_a = np.broadcast_to(positions[:, None], d.shape)
        pos_b = np.broadcast_to(positions[None, :], d.shape)
        lag = np.abs(d)
        forward = self._stack[lag, pos_a, pos_b]
        backward = np.conj(self._stack[lag, pos_b, pos_a])
        return np.where(d >= 0, forward, backward)

    def describe(self) -> Dict[str, Any]:
        return {"kind": "correlation", "T": self.T, "max_lag": self.max_lag}


# --- Scalar piecewise spectra ----------------------------------------------


@dataclass(frozen=True)
class ScalarPiecewiseSpectrum:
    """
    Scalar spectrum, constant on finitely many intervals of [0, pi].

    Only w >= 0 is stored; the spectrum is mirrored to [-pi, 0]. Integrals of
    any function of the level are exact segment sums.
    """

    segments: Tuple[Tuple[float, float, float], ...]

    def __post_init__(self):
        segs = tuple((float(lo), float(hi), float(level)) for lo, hi, level in self.segments)
        if not segs:
            raise InvalidModelError("piecewise spectrum needs at least one segment")
        if abs(segs[0][0]) > _NORMALIZATION_TOL:
            raise InvalidModelError(f"segments must start at 0, got {segs[0][0]}")
        if abs(segs[-1][1] - math.pi) > _NORMALIZATION_TOL:
            raise InvalidModelError(f"segments must end at pi, got {segs[-1][1]}")
        for k, (lo, hi, level) in enumerate(segs):
            if hi < lo:
                raise InvalidModelError(f"segment {k} has hi < lo")
            if level < 0:
                raise InvalidModelError(f"segment {k} has negative level {level}")
            if k and abs(lo - segs[k - 1][1]) > _NORMALIZATION_TOL:
                raise InvalidModelError(f"segment {k} does not start where segment {k - 1} ends")
        object.__setattr__(self, "segments", segs)
        mass = self.total_mass()
        if abs(mass - 1.0) > _NORMALIZATION_TOL:
            raise InvalidModelError(f"spectrum must satisfy (1/2pi) int s = 1, got {mass!r}")

    @classmethod
    def from_segments(
        cls, segments: Sequence[Tuple[float, float, float]], renormalize_within: float = 0.0
    ) -> "ScalarPiecewiseSpectrum":
        """
        Build a spectrum, optionally absorbing small rounding in the boundaries.

        Args:
            segments: (lo, hi, level) triples tiling [0, pi]
            renormalize_within: If the normalization error is below this
                value the levels are rescaled and the last boundary snapped
                to pi instead of rejecting the input
        """
        segs = [(float(lo), float(hi), float(level)) for lo, hi, level in segments if hi > lo]
        if renormalize_within > 0 and segs:
            if abs(segs[-1][1] - math.pi) <= renormalize_within:
                lo, _, level = segs[-1]
                segs[-1] = (lo, math.pi, level)
            mass = sum((hi - lo) * level for lo, hi, level in segs) / math.pi
            if 0 < abs(mass - 1.0) <= renormalize_within:
                logger.warning(f"Rescaling piecewise spectrum levels by {1.0 / mass!r} (normalization {mass!r})")
                segs = [(lo, hi, level / mass) for lo, hi, level in segs]
        return cls(segments=tuple(segs))

    def total_mass(self) -> float:
        """(1/2pi) * int_{-pi}^{pi} s(e^{jw}) dw."""
        return sum((hi - lo) * level for lo, hi, level in self.segments) / math.pi

    def evaluate(self, omega) -> np.ndarray:
        w = np.abs(np.mod(_as_omega(omega) + math.pi, 2.0 * math.pi) - math.pi)
        his = np.array([hi for _, hi, _ in self.segments])
        levels = np.array([level for _, _, level in self.segments])
        idx = np.minimum(np.searchsorted(his, w, side="left"), len(levels) - 1)
        return levels[idx]

    def log_integral(self, offset: float) -> float:
        """(1/2pi) * int log(s + offset) dw, -inf if s + offset vanishes on positive measure."""
        total = 0.0
        for lo, hi, level in self.segments:
            width = hi - lo
            if width <= 0:
                continue
            value = level + offset
            if value <= 0:
                return float("-inf")
            total += width * math.log(value)
        return total / math.pi

    def zero_measure(self) -> float:
        """Lebesgue measure of {w in [-pi, pi] : s = 0}."""
        return 2.0 * sum(hi - lo for lo, hi, level in self.segments if level == 0.0)

    def correlation_value(self, i: int) -> float:
        """r(i) = (1/2pi) int s e^{jwi} dw, real because s is even."""
        if i == 0:
            return self.total_mass()
        i = abs(i)
        return sum(level * (math.sin(i * hi) - math.sin(i * lo)) for lo, hi, level in self.segments) / (i * math.pi)

    def correlation_mp(self, i: int):
        """r(i) in mpmath precision (uses the current mp context)."""
        i = abs(i)
        if i == 0:
            return mpmath.fsum(mpmath.mpf(hi - lo) * level for lo, hi, level in self.segments) / mpmath.pi
        terms = []
        for lo, hi, level in self.segments:
            lo_mp = mpmath.pi if lo == math.pi else mpmath.mpf(lo)
            hi_mp = mpmath.pi if hi == math.pi else mpmath.mpf(hi)
            terms.append(mpmath.mpf(level) * (mpmath.sin(i * hi_mp) - mpmath.sin(i * lo_mp)))
        return mpmath.fsum(terms) / (i * mpmath.pi)

    def breakpoints(self) -> List[float]:
        inner = [lo for lo, _, _ in self.segments[1:]]
        return sorted({p for b in inner for p in (b, -b) if 0 < abs(p) < math.pi})

    def pieces(self) -> List[Tuple[float, np.ndarray]]:
        return [(2.0 * (hi - lo), np.array([[level]], dtype=complex)) for lo, hi, level in self.segments if hi > lo]

    def describe(self) -> Dict[str, Any]:
        return {"kind": "piecewise", "segments": [list(s) for s in self.segments]}


# --- Spectral models -------------------------------------------------------


class SpectralModel(ABC):
    """Evaluator of a T x T Hermitian PSD matrix spectral density S(e^{jw})."""

    kind: str = "abstract"

    def __init__(self, T: int):
        if T < 1:
            raise InvalidParameterError(f"block length T must be positive, got {T}")
        self.T = T

    @abstractmethod
    def evaluate(self, omega) -> np.ndarray:
        """S(e^{jw}) at each frequency, shape (n, T, T)."""

    @abstractmethod
    def correlation(self, max_lag: int) -> CorrelationSequence:
        """Correlation sequence R(0..max_lag) of the model."""

    @property
    def max_lag(self) -> Optional[int]:
        """Truncation lag for truncated-Fourier models, None for analytic ones."""
        return None

    def pieces(self) -> Optional[List[Tuple[float, np.ndarray]]]:
        """Exact (measure, matrix) decomposition if S is piecewise constant."""
        return None

    def breakpoints(self) -> List[float]:
        return []

    def scalar_spectrum(self) -> Optional[ScalarPiecewiseSpectrum]:
        return None

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "T": self.T}

    def validate(self, grid_size: Optional[int] = None, psd_tol: Optional[float] = None) -> None:
        """
        Check Hermitian and PSD structure on a midpoint grid.

        Raises:
            InvalidModelError: on the first violated invariant
        """
        grid_size = grid_size or config.validation_grid
        psd_tol = config.psd_tol if psd_tol is None else psd_tol
        omega = midpoint_grid(grid_size)
        values = self.evaluate(omega)
        asym = float(np.max(np.abs(values - np.conj(np.swapaxes(values, -1, -2)))))
        if asym > psd_tol:
            raise InvalidModelError(f"{self.kind} spectrum is not Hermitian (max asymmetry {asym:.3e})")
        eigenvalues = np.linalg.eigvalsh(values)
        worst = int(np.argmin(eigenvalues[:, 0]))
        min_eig = float(eigenvalues[worst, 0])
        if min_eig < -psd_tol:
            raise InvalidModelError(
                f"{self.kind} spectrum is not PSD: min eigenvalue {min_eig:.3e} at w={omega[worst]:.6f}"
            )


class ScalarModel(SpectralModel):
    """T = 1 model backed by a ScalarPiecewiseSpectrum."""

    kind = "scalar"

    def __init__(self, spectrum: ScalarPiecewiseSpectrum):
        super().__init__(1)
        self.spectrum = spectrum

    def evaluate(self, omega) -> np.ndarray:
        return self.spectrum.evaluate(omega).astype(complex)[:, None, None]

    def correlation(self, max_lag: int) -> CorrelationSequence:
        lags = [np.array([[self.spectrum.correlation_value(i)]]) for i in range(max_lag + 1)]
        return CorrelationSequence(T=1, lags=tuple(lags))

    def pieces(self):
        return self.spectrum.pieces()

    def breakpoints(self) -> List[float]:
        return self.spectrum.breakpoints()

    def scalar_spectrum(self) -> Optional[ScalarPiecewiseSpectrum]:
        return self.spectrum

    def describe(self) -> Dict[str, Any]:
        return self.spectrum.describe()


class ScalarGaussMarkovModel(SpectralModel):
    """s(e^{jw}) = (1-|rho|^2) / (1 - 2 Re(rho e^{-jw}) + |rho|^2)."""

    kind = "scalar_gauss_markov"

    def __init__(self, rho: complex):
        super().__init__(1)
        self.rho = complex(rho)

    def evaluate(self, omega) -> np.ndarray:
        w = _as_omega(omega)
        r2 = abs(self.rho) ** 2
        denom = 1.0 - 2.0 * np.real(self.rho * np.exp(-1j * w)) + r2
        return ((1.0 - r2) / denom).astype(complex)[:, None, None]

    def correlation(self, max_lag: int) -> CorrelationSequence:
        lags = [np.array([[_ipow(self.rho, i)]]) for i in range(max_lag + 1)]
        return CorrelationSequence(T=1, lags=tuple(lags))

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "T": 1, "rho": [self.rho.real, self.rho.imag]}


class BlockGaussMarkovModel(SpectralModel):
    """
    Gauss-Markov symbol process with coefficient rho1 across block
    boundaries and rho2 inside blocks.

    R(i) = q^{i-1} R(1) for i >= 1 with q = rho1 rho2^{T-1}, which sums to
    S = R(0) + A + A^H with A = R(1) e^{-jw} / (1 - q e^{-jw}).
    """

    kind = "block_gauss_markov"

    def __init__(self, T: int, rho1: complex, rho2: complex):
        super().__init__(T)
        self.rho1 = complex(rho1)
        self.rho2 = complex(rho2)
        corr = block_gauss_markov(T, rho1, rho2, max_lag=1)
        self._r0 = corr.matrix(0)
        self._r1 = corr.matrix(1)
        self._q = self.rho1 * _ipow(self.rho2, T - 1)

    def evaluate(self, omega) -> np.ndarray:
        z = np.exp(-1j * _as_omega(omega))
        factor = z / (1.0 - self._q * z)
        a = factor[:, None, None] * self._r1[None, :, :]
        return self._r0[None, :, :] + a + np.conj(np.swapaxes(a, -1, -2))

    def correlation(self, max_lag: int) -> CorrelationSequence:
        return block_gauss_markov(self.T, self.rho1, self.rho2, max_lag=max_lag)

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind, "T": self.T,
            "rho1": [self.rho1.real, self.rho1.imag], "rho2": [self.rho2.real, self.rho2.imag],
        }


class ConstantWithinBlockModel(SpectralModel):
    """Fading constant inside each block: S = s(e^{jw}) J_T."""

    kind = "constant_within_block"

    def __init__(self, T: int, inner: SpectralModel):
        super().__init__(T)
        if inner.T != 1:
            raise InvalidParameterError("constant_within_block needs a scalar (T=1) inner model")
        self.inner = inner
        self._ones = np.ones((T, T), dtype=complex)

    def evaluate(self, omega) -> np.ndarray:
        s = self.inner.evaluate(omega)[:, 0, 0]
        return s[:, None, None] * self._ones[None, :, :]

    def correlation(self, max_lag: int) -> CorrelationSequence:
        inner = self.inner.correlation(max_lag)
        return CorrelationSequence(T=self.T, lags=tuple(m[0, 0] * self._ones for m in inner.lags))

    def pieces(self):
        inner = self.inner.pieces()
        if inner is None:
            return None
        return [(measure, matrix[0, 0] * self._ones) for measure, matrix in inner]

    def breakpoints(self) -> List[float]:
        return self.inner.breakpoints()

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "T": self.T, "scalar": self.inner.describe()}


class TruncatedFourierModel(SpectralModel):
    """S(e^{jw}) = R(0) + sum_{i=1}^{L} (R(i) e^{-jwi} + R(i)^H e^{jwi})."""

    kind = "truncated_fourier"

    def __init__(self, corr: CorrelationSequence):
        super().__init__(corr.T)
        self.corr = corr
        self._stack = np.stack(corr.lags[1:]) if corr.max_lag > 0 else None

    @property
    def max_lag(self) -> Optional[int]:
        return self.corr.max_lag

    def evaluate(self, omega) -> np.ndarray:
        w = _as_omega(omega)
        r0 = self.corr.lags[0]
        out = np.broadcast_to(r0, (w.size, self.T, self.T)).copy()
        if self._stack is None:
            return out
        lags = np.arange(1, self.corr.max_lag + 1)
        chunk = max(1, _EVAL_CHUNK // max(1, lags.size))
        for start in range(0, w.size, chunk):
            phases = np.exp(-1j * np.outer(w[start:start + chunk], lags))
            a = np.einsum("nl,lab->nab", phases, self._stack)
            out[start:start + chunk] += a + np.conj(np.swapaxes(a, -1, -2))
        return out

    def correlation(self, max_lag: int) -> CorrelationSequence:
        if max_lag <= self.corr.max_lag:
            return self.corr.truncated(max_lag)
        padding = [np.zeros((self.T, self.T), dtype=complex)] * (max_lag - self.corr.max_lag)
        return CorrelationSequence(T=self.T, lags=self.corr.lags + tuple(padding), tolerance=self.corr.tolerance)

    def pieces(self):
        if self.corr.max_lag == 0:
            return [(2.0 * math.pi, np.array(self.corr.lags[0]))]
        return None

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "T": self.T, "max_lag": self.corr.max_lag}


class ExplicitGridModel(SpectralModel):
    """Periodic entrywise linear interpolation of S between given nodes."""

    kind = "explicit_grid"

    def __init__(self, nodes: Sequence[Tuple[float, Any]]):
        if not nodes:
            raise InvalidModelError("explicit_grid needs at least one node")
        ordered = sorted(((float(w), np.asarray(m, dtype=complex)) for w, m in nodes), key=lambda n: n[0])
        T = ordered[0][1].shape[0]
        super().__init__(T)
        self._omega = np.array([w for w, _ in ordered])
        if self._omega[0] < -math.pi - 1e-12 or self._omega[-1] > math.pi + 1e-12:
            raise InvalidModelError("explicit_grid frequencies must lie in [-pi, pi]")
        self._values = np.stack([m.reshape(T, T) for _, m in ordered])

        diag_mean = self._periodic_trapezoid(np.real(np.diagonal(self._values, axis1=1, axis2=2)))
        if np.max(np.abs(diag_mean - 1.0)) > _GRID_NORMALIZATION_TOL:
            raise InvalidModelError(
                f"explicit_grid diagonal must integrate to 1, got {diag_mean.tolist()}"
            )

    def _periodic_trapezoid(self, values: np.ndarray) -> np.ndarray:
        w = np.append(self._omega, self._omega[0] + 2.0 * math.pi)
        v = np.concatenate([values, values[:1]], axis=0)
        widths = np.diff(w)
        return np.sum(0.5 * (v[:-1] + v[1:]) * widths[:, None], axis=0) / (2.0 * math.pi)

    def evaluate(self, omega) -> np.ndarray:
        w = _as_omega(omega)
        out = np.empty((w.size, self.T, self.T), dtype=complex)
        for a in range(self.T):
            for b in range(self.T):
                column = self._values[:, a, b]
                out[:, a, b] = (np.interp(w, self._omega, column.real, period=2.0 * math.pi)
                                + 1j * np.interp(w, self._omega, column.imag, period=2.0 * math.pi))
        return out

    def correlation(self, max_lag: int) -> CorrelationSequence:
        grid = midpoint_grid(8192)
        values = self.evaluate(grid)
        lags = []
        for i in range(max_lag + 1):
            phase = np.exp(1j * grid * i)[:, None, None]
            lags.append(np.mean(values * phase, axis=0))
        lags[0] = 0.5 * (lags[0] + lags[0].conj().T)
        np.fill_diagonal(lags[0], 1.0)
        return CorrelationSequence(T=self.T, lags=tuple(lags), tolerance=max(config.psd_tol, 1e-6))

    def breakpoints(self) -> List[float]:
        return [float(w) for w in self._omega if -math.pi < w < math.pi]

    def describe(self) -> Dict[str, Any]:
        return {"kind": self.kind, "T": self.T, "nodes": int(self._omega.size)}


# --- Constructors ----------------------------------------------------------


def from_correlation(
    corr: CorrelationSequence, psd_tol: Optional[float] = None, grid_size: Optional[int] = None
) -> TruncatedFourierModel:
    """
    Truncated-Fourier spectral model of a correlation sequence.

    Raises:
        InvalidModelError: if the truncated sum is not PSD on the validation grid
    """
    model = TruncatedFourierModel(corr)
    model.validate(grid_size=grid_size, psd_tol=psd_tol)
    logger.debug(f"Built truncated-Fourier model T={corr.T} max_lag={corr.max_lag}")
    return model


def _check_contractive(name: str, rho: complex) -> complex:
    rho = complex(rho)
    if not abs(rho) < 1.0:
        raise InvalidParameterError(f"|{name}| must be < 1, got {abs(rho)}")
    return rho


def scalar_gauss_markov(rho: complex) -> ScalarGaussMarkovModel:
    """Scalar Gauss-Markov fading, E h_{t+1} h_t^* = rho."""
    return ScalarGaussMarkovModel(_check_contractive("rho", rho))


def block_gauss_markov(T: int, rho1: complex, rho2: complex, max_lag: Optional[int] = None) -> CorrelationSequence:
    """
    Correlation sequence of the block Gauss-Markov process.

    The one-step coefficient E h_{t+1} h_t^* is rho1 when t is the last
    symbol of a block and rho2 otherwise; longer correlations are products
    along the path. With 0-based positions a, b:
    R(i)[a, b] = rho1^i rho2^(iT + a - b - i) whenever iT + a - b >= 0.

    Args:
        T: Block length
        rho1: Coefficient across block boundaries
        rho2: Coefficient inside a block
        max_lag: Number of block lags to generate (defaults to config)

    Returns:
        CorrelationSequence with lags 0..max_lag
    """
    if T < 1:
        raise InvalidParameterError(f"block length T must be positive, got {T}")
    rho1 = _check_contractive("rho1", rho1)
    rho2 = _check_contractive("rho2", rho2)
    max_lag = config.default_max_lag if max_lag is None else max_lag

    lags = []
    for i in range(max_lag + 1):
        matrix = np.zeros((T, T), dtype=complex)
        for a in range(T):
            for b in range(T):
                steps = i * T + a - b
                if steps >= 0:
                    matrix[a, b] = _ipow(rho1, i) * _ipow(rho2, steps - i)
        if i == 0:
            lower = np.tril(matrix)
            matrix = lower + np.conj(np.tril(matrix, -1)).T
        lags.append(matrix)
    return CorrelationSequence(T=T, lags=tuple(lags))


def block_gauss_markov_model(T: int, rho1: complex, rho2: complex) -> BlockGaussMarkovModel:
    """Analytic spectral model of block_gauss_markov(T, rho1, rho2)."""
    return BlockGaussMarkovModel(T, _check_contractive("rho1", rho1), _check_contractive("rho2", rho2))


def piecewise_spectrum(segments: Sequence[Tuple[float, float, float]]) -> ScalarPiecewiseSpectrum:
    return ScalarPiecewiseSpectrum.from_segments(segments)


def flat_spectrum() -> ScalarPiecewiseSpectrum:
    """s = 1 on the whole circle (iid fading)."""
    return ScalarPiecewiseSpectrum(segments=((0.0, math.pi, 1.0),))


def scalar_model(spectrum: ScalarPiecewiseSpectrum) -> ScalarModel:
    return ScalarModel(spectrum)


def constant_within_block(T: int, scalar: Union[ScalarPiecewiseSpectrum, SpectralModel]) -> ConstantWithinBlockModel:
    """Every entry of S equals the scalar spectrum of the block-sampled process."""
    inner = ScalarModel(scalar) if isinstance(scalar, ScalarPiecewiseSpectrum) else scalar
    return ConstantWithinBlockModel(T, inner)


def explicit_grid(nodes: Sequence[Tuple[float, Any]], psd_tol: Optional[float] = None) -> ExplicitGridModel:
    model = ExplicitGridModel(nodes)
    model.validate(psd_tol=psd_tol)
    return model


def block_independent(r0: Any) -> TruncatedFourierModel:
    """Blocks independent of each other, within-block correlation R(0)."""
    r0 = np.asarray(r0, dtype=complex)
    return from_correlation(CorrelationSequence(T=r0.shape[0], lags=(r0,)))


def vanishing_threshold(alpha: float) -> float:
    """Smallest admissible theta for vanishing_spectrum(alpha, theta)."""
    width = 2.0 * math.pi - alpha
    if width * width < 8.0 * math.pi:
        return 1.0 / width
    return (width + math.sqrt(width * width - 8.0 * math.pi)) / (4.0 * math.pi)


def vanishing_spectrum(alpha: float, theta: float) -> ScalarPiecewiseSpectrum:
    """
    Three-level spectrum whose noisy prediction error vanishes as theta grows.

    Levels: 0 on |w| <= alpha/2, 1/theta up to pi - 1/(2 theta), and
    (2 pi theta^2 - 2 pi theta + alpha theta + 1)/theta on the remaining
    spike next to pi.

    Raises:
        InvalidParameterError: if alpha is outside [0, 2pi) or theta is
            below the admissible threshold
    """
    if not 0.0 <= alpha < 2.0 * math.pi:
        raise InvalidParameterError(f"alpha must lie in [0, 2pi), got {alpha}")
    theta0 = vanishing_threshold(alpha)
    if theta < theta0:
        raise InvalidParameterError(f"theta={theta} is below the threshold theta0={theta0:.6f} for alpha={alpha}")
    spike = 1.0 / (2.0 * theta)
    if spike < 1e-12 * math.pi:
        raise InvalidParameterError(f"theta={theta} too large to represent the spike width in double precision")
    edge = math.pi - spike
    # Same value as the closed form, but exact against the rounded spike width.
    top = (math.pi - (edge - alpha / 2.0) / theta) / (math.pi - edge)
    segments = [(0.0, alpha / 2.0, 0.0), (alpha / 2.0, edge, 1.0 / theta), (edge, math.pi, top)]
    return ScalarPiecewiseSpectrum(segments=tuple(s for s in segments if s[1] > s[0]))


def two_level_spectrum(eps1: float, eps2: float, alpha1: float, alpha2: float) -> ScalarPiecewiseSpectrum:
    """
    eps1 on |w| <= pi alpha1, eps2 on pi alpha1 < |w| <= pi alpha2, and the
    normalizing level (1 - alpha1 eps1 - (alpha2 - alpha1) eps2)/(1 - alpha2)
    on the rest.
    """
    if not 0.0 < alpha1 < alpha2 < 1.0:
        raise InvalidParameterError(f"need 0 < alpha1 < alpha2 < 1, got {alpha1}, {alpha2}")
    if not 0.0 <= eps1 <= eps2:
        raise InvalidParameterError(f"need 0 <= eps1 <= eps2, got {eps1}, {eps2}")
    top = (1.0 - alpha1 * eps1 - (alpha2 - alpha1) * eps2) / (1.0 - alpha2)
    if top < eps2:
        raise InvalidParameterError(f"invalid level ordering: third level {top} is below eps2={eps2}")
    segments = [(0.0, math.pi * alpha1, eps1), (math.pi * alpha1, math.pi * alpha2, eps2), (math.pi * alpha2, math.pi, top)]
    return ScalarPiecewiseSpectrum(segments=tuple(segments))


def paired_block_model(rho: complex) -> TruncatedFourierModel:
    """
    Block-independent T=3 model whose first two symbols are identical and
    whose third has correlation rho with them.
    """
    rho = complex(rho)
    if abs(rho) > 1.0:
        raise InvalidParameterError(f"|rho| must be <= 1, got {abs(rho)}")
    rc = rho.conjugate()
    return block_independent([[1, 1, rc], [1, 1, rc], [rho, rho, 1]])


def has_szasz_symmetry(model: SpectralModel, tol: float = 1e-12) -> bool:
    """
    True when R(0) has equal off-diagonal entries and each R(i), i != 0, has
    all entries equal; in that case the full set minimizes the subset scan.
    """
    if isinstance(model, ConstantWithinBlockModel):
        return True
    if not isinstance(model, TruncatedFourierModel):
        return False
    r0 = model.corr.lags[0]
    off = r0[~np.eye(model.T, dtype=bool)]
    if off.size and np.max(np.abs(off - off[0])) > tol:
        return False
    return all(np.max(np.abs(m - m.flat[0])) <= tol for m in model.corr.lags[1:])
