"""
Blocklength requirements for low-energy communication over fading with
arc-supported spectra.

Minimum blocklength grows like log(1/energy) / (-log tau), where tau is the
transfinite diameter of the spectral support. Includes closed forms for a
single arc, a Fekete-point solver for arc unions, the decay rate of
noiseless prediction error, and random-coding exponents.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import scipy.integrate
import scipy.linalg
import scipy.optimize
import scipy.special

from src.config import config
from src.models.response_models import DecayRateResult, ExponentResult, FeketeResult, LadderPoint
from src.modules.errors import ConditionViolationError, InvalidModelError, InvalidParameterError
from src.modules.prediction import finite_history_variance
from src.modules.spectra import CorrelationSequence, ScalarPiecewiseSpectrum

logger = logging.getLogger(__name__)

_TWO_PI = 2.0 * math.pi
_FULL_ARC = math.pi - 1e-12
_MP_DPS = 60


# --- Arc sets --------------------------------------------------------------


@dataclass(frozen=True)
class ArcSet:
    """Disjoint closed arcs of the unit circle, each as (center, half_width)."""

    arcs: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        arcs = tuple((float(c), float(h)) for c, h in self.arcs)
        if not arcs:
            raise InvalidModelError("arc set must contain at least one arc")
        for center, half in arcs:
            if not 0.0 < half <= math.pi:
                raise InvalidModelError(f"arc half-width must lie in (0, pi], got {half}")
        total = sum(2.0 * h for _, h in arcs)
        if total > _TWO_PI + 1e-12:
            raise InvalidModelError(f"arcs cover {total} > 2 pi")
        if len(arcs) > 1:
            intervals = sorted(((c - h) % _TWO_PI, (c - h) % _TWO_PI + 2.0 * h) for c, h in arcs)
            for (lo1, hi1), (lo2, _) in zip(intervals, intervals[1:] + [(intervals[0][0] + _TWO_PI, 0.0)]):
                if hi1 >= lo2:
                    raise InvalidModelError("arcs must be disjoint")
        object.__setattr__(self, "arcs", arcs)

    @classmethod
    def parse(cls, text: str) -> "ArcSet":
        """Parse 'center:angle,center:angle' where angle is the full central angle."""
        arcs = []
        for item in text.split(","):
            try:
                center, angle = (float(v) for v in item.split(":"))
            except ValueError as e:
                raise InvalidParameterError(f"cannot parse arc {item!r}; expected center:angle") from e
            arcs.append((center, angle / 2.0))
        return cls(arcs=tuple(arcs))

    @property
    def is_full_circle(self) -> bool:
        return len(self.arcs) == 1 and self.arcs[0][1] >= _FULL_ARC

    def measure(self) -> float:
        return sum(2.0 * h for _, h in self.arcs)

    def as_angles(self) -> List[List[float]]:
        return [[c, 2.0 * h] for c, h in self.arcs]


def support_arcs(spectrum: ScalarPiecewiseSpectrum) -> ArcSet:
    """Closed support of an even piecewise spectrum as an arc set."""
    runs: List[List[float]] = []
    for lo, hi, level in spectrum.segments:
        if level <= 0.0 or hi <= lo:
            continue
        if runs and abs(runs[-1][1] - lo) <= 1e-12:
            runs[-1][1] = hi
        else:
            runs.append([lo, hi])
    arcs = []
    for lo, hi in runs:
        at_zero = lo <= 1e-12
        at_pi = hi >= math.pi - 1e-12
        if at_zero and at_pi:
            return ArcSet(arcs=((0.0, math.pi),))
        if at_zero:
            arcs.append((0.0, hi))
        elif at_pi:
            arcs.append((math.pi, math.pi - lo))
        else:
            arcs.append((0.5 * (lo + hi), 0.5 * (hi - lo)))
            arcs.append((-0.5 * (lo + hi), 0.5 * (hi - lo)))
    return ArcSet(arcs=tuple(arcs))


def arc_transfinite_diameter(theta: float) -> float:
    """Transfinite diameter sin(theta/4) of a single arc with central angle theta."""
    if not 0.0 <= theta <= _TWO_PI:
        raise InvalidParameterError(f"arc angle must lie in [0, 2pi], got {theta}")
    return math.sin(theta / 4.0)


# --- Fekete points ---------------------------------------------------------


def _log_vandermonde(phi: np.ndarray) -> float:
    diff = phi[:, None] - phi[None, :]
    dist = np.abs(2.0 * np.sin(0.5 * diff[np.triu_indices(phi.size, 1)]))
    with np.errstate(divide="ignore"):
        return float(np.sum(np.log(dist)))


def _allocate(n: int, weights: np.ndarray) -> np.ndarray:
    """Largest-remainder allocation of n points proportional to weights."""
    raw = n * weights / np.sum(weights)
    counts = np.floor(raw).astype(int)
    for k in np.argsort(raw - counts)[::-1][: n - int(counts.sum())]:
        counts[k] += 1
    return counts


def _initial_params(count: int, rng: Optional[np.random.Generator]) -> np.ndarray:
    if count == 1:
        return np.zeros(1) if rng is None else rng.uniform(-1.0, 1.0, 1)
    if rng is None:
        return -np.cos(math.pi * np.arange(count) / (count - 1))
    return np.sort(rng.uniform(-1.0, 1.0, count))


def _fekete_single(arcs: ArcSet, n: int, rng: Optional[np.random.Generator], max_sweeps: int, tol: float):
    weights = np.array([h for _, h in arcs.arcs])
    if rng is None:
        counts = _allocate(n, weights)
    else:
        counts = rng.multinomial(n, weights / weights.sum())
    params = [_initial_params(int(c), rng) for c in counts]
    centers = [c for c, _ in arcs.arcs]
    halves = [h for _, h in arcs.arcs]

    def angles() -> np.ndarray:
        return np.concatenate([c + h * t for c, h, t in zip(centers, halves, params)])

    current = _log_vandermonde(angles())
    converged = False
    for _ in range(max_sweeps):
        for arc_index, t in enumerate(params):
            for k in range(t.size):
                others = np.delete(angles(), sum(len(p) for p in params[:arc_index]) + k)
                lo = t[k - 1] if k > 0 else -1.0
                hi = t[k + 1] if k + 1 < t.size else 1.0
                center, half = centers[arc_index], halves[arc_index]

                def negative_energy(x: float) -> float:
                    phi = center + half * x
                    with np.errstate(divide="ignore"):
                        return -float(np.sum(np.log(np.abs(2.0 * np.sin(0.5 * (phi - others))))))

                result = scipy.optimize.minimize_scalar(
                    negative_energy, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}
                )
                if result.fun <= negative_energy(t[k]):
                    t[k] = result.x
        updated = _log_vandermonde(angles())
        improvement = updated - current
        current = updated
        if abs(improvement) <= tol * max(1.0, abs(current)):
            converged = True
            break
    return angles(), current, converged


def _fekete_best(arcs: ArcSet, n: int, restarts: int, seed: int, jobs: int):
    if arcs.is_full_circle:
        phi = arcs.arcs[0][0] + _TWO_PI * np.arange(n) / n
        return phi, _log_vandermonde(phi), True

    def run(restart: int):
        rng = None if restart == 0 else np.random.default_rng(np.random.SeedSequence([seed, n, restart]))
        return _fekete_single(arcs, n, rng, max_sweeps=100, tol=1e-10)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            results = list(executor.map(run, range(restarts)))
    else:
        results = [run(r) for r in range(restarts)]
    return max(results, key=lambda r: r[1])


def default_ladder(n: int) -> List[int]:
    """Fekete sizes used to extrapolate tau, ending at n."""
    if n < 8:
        return list(range(2, n + 1))
    return sorted({int(round(v)) for v in np.linspace(max(4, n // 5), n, 6)})


def _extrapolate(ladder: List[LadderPoint]) -> Optional[float]:
    """
    Fit log V_n = L n(n-1)/2 + n log(n)/2 + b n + d and return e^L.
    """
    usable = [p for p in ladder if p.n >= 4]
    if len(usable) < 3:
        return None
    n = np.array([p.n for p in usable], dtype=float)
    y = np.array([p.log_vandermonde for p in usable]) - 0.5 * n * np.log(n)
    design = np.column_stack([0.5 * n * (n - 1.0), n, np.ones_like(n)])
    coefficients, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(min(math.exp(coefficients[0]), 1.0))


def fekete_transfinite_diameter(
    arcs: ArcSet,
    n: int,
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    ladder: Optional[Sequence[int]] = None,
    jobs: Optional[int] = None,
) -> FeketeResult:
    """
    Approximate n-point Fekete configuration on an arc union and the
    transfinite diameter estimate tau_n = V_n^{2/(n(n-1))}.

    A ladder of smaller sizes is solved as well; it is made monotone
    non-increasing and used to extrapolate tau, since tau_n approaches tau
    from above only like 1 + O(log n / n).

    Args:
        arcs: Disjoint arcs
        n: Number of points, >= 2
        restarts: Optimizer restarts per size; restart 0 is deterministic
        seed: Seed for the random restarts
        ladder: Sizes to solve (defaults to default_ladder(n))
        jobs: Worker threads for the restarts

    Returns:
        FeketeResult with points at size n and the extrapolated tau
    """
    if n < 2:
        raise InvalidParameterError(f"need at least 2 Fekete points, got {n}")
    restarts = restarts or config.fekete_restarts
    seed = config.seed if seed is None else seed
    jobs = jobs or config.jobs
    sizes = sorted(set(default_ladder(n) if ladder is None else ladder) | {n})

    points: List[LadderPoint] = []
    best_phi = None
    for size in sizes:
        phi, log_v, converged = _fekete_best(arcs, size, restarts, seed, jobs)
        tau_n = math.exp(2.0 * log_v / (size * (size - 1)))
        points.append(LadderPoint(n=size, tau_n=tau_n, log_vandermonde=log_v, converged=converged))
        if size == n:
            best_phi = phi
        logger.debug(f"Fekete n={size} tau_n={tau_n:.8f} converged={converged}")

    repaired = False
    for k in range(len(points) - 2, -1, -1):
        if points[k].tau_n < points[k + 1].tau_n:
            points[k] = points[k].model_copy(update={"tau_n": points[k + 1].tau_n})
            repaired = True
    if repaired:
        logger.warning("Fekete ladder was not monotone; smaller sizes raised to the later maximum")

    final = next(p for p in points if p.n == n)
    return FeketeResult(
        n=n,
        tau_n=final.tau_n,
        tau_extrapolated=_extrapolate(points),
        points=np.sort(np.mod(best_phi + math.pi, _TWO_PI) - math.pi).tolist(),
        converged=all(p.converged for p in points),
        ladder=points,
        monotone_repaired=repaired,
    )


def blocklength_scaling_bound(rate: float, error_probability: float, tau: float) -> float:
    """
    Lower bound on lim inf of blocklength / log(1/energy): r (1 - Pe) / (-log tau).

    Raises:
        ConditionViolationError: unless 0 < tau < 1
    """
    if not 0.0 < tau < 1.0:
        raise ConditionViolationError(
            f"scaling bound needs 0 < tau < 1 (got {tau}): the spectral support must be a closed "
            "proper subset of the circle made of finitely many arcs"
        )
    if not rate > 0:
        raise InvalidParameterError(f"rate must be positive, got {rate}")
    if not 0.0 <= error_probability < 1.0:
        raise InvalidParameterError(f"error probability must lie in [0, 1), got {error_probability}")
    return rate * (1.0 - error_probability) / (-math.log(tau))


# --- Prediction-error decay ------------------------------------------------


def _levinson_variances(correlations: Sequence, orders: Sequence[int]) -> List:
    """Noiseless one-step prediction variances var_n for the requested orders (mpmath)."""
    wanted = set(orders)
    out = {}
    energy = correlations[0]
    coefficients: List = []
    if 0 in wanted:
        out[0] = energy
    for m in range(1, max(orders) + 1):
        acc = correlations[m] - mpmath.fsum(coefficients[j] * correlations[m - 1 - j] for j in range(m - 1))
        k = acc / energy
        coefficients = [coefficients[j] - k * coefficients[m - 2 - j] for j in range(m - 1)] + [k]
        energy = energy * (1 - k * k)
        if m in wanted:
            out[m] = energy
    return [out[n] for n in orders]


def prediction_decay_rate(
    spectrum: ScalarPiecewiseSpectrum,
    orders: Optional[Sequence[int]] = None,
    condition_cap: Optional[float] = None,
) -> DecayRateResult:
    """
    Exponential decay of the noiseless n-step prediction error.

    var_n is computed in double precision while the Toeplitz system stays
    below the condition cap, then with a 60-digit Levinson recursion. The
    fit log var_n = c0 + c1 n + c2 log n gives variance_rate = e^{c1},
    which tends to tau^2 for arc-supported spectra.
    """
    orders = list(range(20, 51)) if orders is None else sorted(int(n) for n in orders)
    if len(orders) < 4:
        raise InvalidParameterError("decay fit needs at least four orders")
    condition_cap = config.condition_cap if condition_cap is None else condition_cap

    largest = orders[-1]
    r = np.array([spectrum.correlation_value(i) for i in range(largest + 1)])
    condition = float(np.linalg.cond(scipy.linalg.toeplitz(r[:largest])))
    extended = condition > condition_cap

    if extended:
        logger.info(f"Toeplitz condition {condition:.2e} above cap; using {_MP_DPS}-digit Levinson recursion")
        with mpmath.workdps(_MP_DPS):
            r_mp = [spectrum.correlation_mp(i) for i in range(largest + 1)]
            variances_mp = _levinson_variances(r_mp, orders)
            log_var = [float(mpmath.log(v)) if v > 0 else float("-inf") for v in variances_mp]
            variances = [float(v) for v in variances_mp]
    else:
        corr = CorrelationSequence(T=1, lags=tuple(np.array([[v]]) for v in r))
        variances = [finite_history_variance(corr, 0, n, 0.0)[0] for n in orders]
        log_var = [math.log(v) if v > 0 else float("-inf") for v in variances]

    if not all(math.isfinite(v) for v in log_var):
        raise ConditionViolationError("prediction error vanished numerically; lower the orders")
    n = np.array(orders, dtype=float)
    design = np.column_stack([np.ones_like(n), n, np.log(n)])
    coefficients, *_ = np.linalg.lstsq(design, np.array(log_var), rcond=None)
    rate = min(math.exp(coefficients[1]), 1.0)
    return DecayRateResult(
        variance_rate=rate,
        tau_estimate=math.sqrt(rate),
        n_used=orders,
        variances=variances,
        extended_precision=extended,
        fit_coefficients=coefficients.tolist(),
    )


# --- Error exponents -------------------------------------------------------


def awgn_exponent(rate: float, snr: float) -> float:
    """
    Gallager random-coding exponent of the complex AWGN channel with
    Gaussian inputs, nats. Zero at and above capacity log(1 + SNR).
    """
    if not snr > 0 or rate < 0:
        raise InvalidParameterError(f"need SNR > 0 and rate >= 0, got SNR={snr}, R={rate}")
    if rate >= math.log1p(snr):
        return 0.0
    root = math.sqrt(1.0 + snr * snr / 4.0)
    critical = math.log(0.5 + snr / 4.0 + 0.5 * root)
    if rate >= critical:
        e_r = math.exp(rate)
        x = 4.0 * e_r / (snr * math.expm1(rate))
        sq = math.sqrt(1.0 + x)
        return (snr / (2.0 * e_r)) * (2.0 - 4.0 * e_r / (snr * (sq + 1.0))) + math.log(e_r * x / (sq + 1.0) ** 2)
    denom = root + snr / 2.0
    return 1.0 - 1.0 / denom + math.log(0.5 + 0.5 / denom) + critical - rate


def awgn_branch(rate: float, snr: float) -> str:
    if rate >= math.log1p(snr):
        return "above-capacity"
    root = math.sqrt(1.0 + snr * snr / 4.0)
    return "sphere-packing" if rate >= math.log(0.5 + snr / 4.0 + 0.5 * root) else "straight-line"


def rayleigh_gallager_function(rho: float, snr: float) -> float:
    """E0(rho) = -log E[(1 + SNR |h|^2/(1 + rho))^(-rho)], |h|^2 ~ Exp(1)."""
    if rho == 0.0:
        return 0.0
    b = snr / (1.0 + rho)

    def head(u: float) -> float:
        t = math.exp(u)
        return math.exp(-t - rho * math.log1p(b * t)) * t

    def tail(t: float) -> float:
        return math.exp(-t - rho * math.log1p(b * t))

    low, _ = scipy.integrate.quad(head, -math.inf, 0.0, epsabs=0.0, epsrel=1e-11, limit=200)
    high, _ = scipy.integrate.quad(tail, 1.0, math.inf, epsabs=0.0, epsrel=1e-11, limit=200)
    return -math.log(low + high)


def rayleigh_unit_rho_check(snr: float) -> float:
    """E0(1) by the closed form (1/b) e^{1/b} E1(1/b), b = SNR/2."""
    b = snr / 2.0
    return -math.log((1.0 / b) * math.exp(1.0 / b) * scipy.special.exp1(1.0 / b))


def rayleigh_exponent(rate: float, snr: float) -> float:
    """
    Random-coding exponent max_{0<=rho<=1} E0(rho) - rho R of the coherent
    Rayleigh channel with Gaussian inputs.
    """
    if not snr > 0 or rate < 0:
        raise InvalidParameterError(f"need SNR > 0 and rate >= 0, got SNR={snr}, R={rate}")

    def objective(rho: float) -> float:
        return rayleigh_gallager_function(rho, snr) - rho * rate

    result = scipy.optimize.minimize_scalar(
        lambda rho: -objective(rho), bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10}
    )
    return max(-float(result.fun), objective(1.0), 0.0)


def exponent_report(channel: str, rate: float, snr: float) -> ExponentResult:
    """Random-coding exponent of the named channel with its branch and flags."""
    flags: List[str] = []
    if rate > math.log1p(snr):
        flags.append("rate-above-capacity")
    if channel == "awgn":
        value, branch = awgn_exponent(rate, snr), awgn_branch(rate, snr)
    elif channel == "rayleigh":
        value, branch = rayleigh_exponent(rate, snr), "bounded-search"
    else:
        raise InvalidParameterError(f"unknown channel {channel!r}; choose awgn or rayleigh")
    if value == 0.0:
        flags.append("zero-exponent")
    return ExponentResult(channel=channel, snr=snr, rate=rate, exponent=value, branch=branch, flags=flags)
