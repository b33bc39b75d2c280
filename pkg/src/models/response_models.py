"""
Response models for the blockfade toolkit.

Pydantic models for the results returned by the numerical modules, the
CLI and the HTTP API.
"""

from datetime import datetime
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field


class SpectrumPoint(BaseModel):
    """Spectral density evaluated at one frequency."""

    omega: float = Field(..., description="Frequency in [-pi, pi]")
    real: List[List[float]] = Field(..., description="Real part of S(e^{jw})")
    imag: List[List[float]] = Field(..., description="Imaginary part of S(e^{jw})")
    min_eigenvalue: float = Field(..., description="Smallest eigenvalue of S(e^{jw})")


class PredictionSummary(BaseModel):
    """Finite-history innovation variances and the matching determinant."""

    snr: float
    T: int
    history_len: int
    sigmas: List[float] = Field(..., description="Per-symbol innovation variances sigma_i(SNR)")
    sigmas_extrapolated: Optional[List[float]] = Field(None, description="2 sigma(2n) - sigma(n)")
    logdet_sigma_snr: Optional[float] = Field(None, description="log det Sigma(SNR) by quadrature")
    logdet_sigma_inf: Optional[float] = Field(None, description="log det Sigma(inf), -inf if singular")
    logdet_ldl: float = Field(..., description="sum_i log sigma_i")
    logdet_gap: Optional[float] = Field(None, description="sum_i log sigma_i - log det Sigma(SNR)")
    quadrature_error: Optional[float] = None
    warnings: List[str] = Field(default_factory=list)


class PrelogReport(BaseModel):
    """Pre-log estimates from the rank functional and from SNR sweeps."""

    prelog_rank: float = Field(..., description="sum_i (T - i) mu(rank S = i) / (2 pi T)")
    prelog_slope: Optional[float] = Field(None, description="Slope of -log det Sigma vs T log SNR")
    rank_measures: List[float] = Field(..., description="mu(rank S = i) for i = 0..T")
    snr_grid: List[float] = Field(default_factory=list)
    ambiguous_points: int = Field(0, description="Grid points with an eigenvalue near the threshold")
    flagged: bool = Field(False, description="Rank and slope estimates disagree")
    quadrature_error: Optional[float] = Field(None, description="Largest log-determinant quadrature error of the slope fit")


class FadingNumberResult(BaseModel):
    fading_number: float
    logdet_sigma_inf: float
    quadrature_error: float


class BoundPoint(BaseModel):
    """Capacity bounds at one SNR."""

    snr: float
    lower: float
    upper: float
    x_min: float
    per_symbol_lower: List[float] = Field(default_factory=list)
    side_information_terms: List[float] = Field(default_factory=list)
    memoryless_term: float = 0.0
    distribution: str = "annulus-uniform"
    flags: List[str] = Field(default_factory=list)
    quadrature_error: Optional[float] = None


class TwoLevelRow(BaseModel):
    """Bounds for the two-level spectrum at one SNR."""

    snr: float
    lower: float
    upper: float
    variance_lower: float = Field(..., description="Noisy-past variance at noise 4/SNR")
    variance_upper: float = Field(..., description="Noisy-past variance at noise 1/SNR")
    flags: List[str] = Field(default_factory=list)


class SubsetEntry(BaseModel):
    mask: int
    label: str
    psi: float


class SubsetScan(BaseModel):
    """Capacity per unit energy from a scan over non-empty subsets."""

    snr: float
    cp: float
    min_psi: float
    argmin: List[int] = Field(..., description="Bitmasks of the minimizing subsets")
    argmin_labels: List[str]
    entries: List[SubsetEntry]
    advisories: List[str] = Field(default_factory=list)
    quadrature_error: Optional[float] = Field(None, description="Largest quadrature error over the subsets")


class ClosedFormCp(BaseModel):
    """Capacity per unit energy from a structural closed form."""

    snr: float
    cp: float
    formula: str
    quadrature_error: float = 0.0


class AsymptoteResult(BaseModel):
    """Small- or large-SNR approximation of the capacity per unit energy."""

    regime: str
    snr: float
    cp: float
    argmin_labels: List[str]
    criterion: Dict[str, float] = Field(default_factory=dict)
    quadrature_error: Optional[float] = None


class CrossoverResult(BaseModel):
    snr: float
    first: str
    second: str
    psi: float
    quadrature_error: Optional[float] = None


class LadderPoint(BaseModel):
    n: int
    tau_n: float
    log_vandermonde: float
    converged: bool


class FeketeResult(BaseModel):
    """Approximate Fekete configuration and transfinite diameter."""

    n: int
    tau_n: float
    tau_extrapolated: Optional[float] = None
    points: List[float] = Field(..., description="Angles of the Fekete points")
    converged: bool
    ladder: List[LadderPoint] = Field(default_factory=list)
    monotone_repaired: bool = False


class TauResult(BaseModel):
    arcs: List[List[float]]
    tau: float
    method: str
    fekete: Optional[FeketeResult] = None


class DecayRateResult(BaseModel):
    """Exponential decay of the noiseless n-step prediction error."""

    variance_rate: float = Field(..., description="lim var_n^(1/n)")
    tau_estimate: float = Field(..., description="sqrt of variance_rate")
    n_used: List[int]
    variances: List[float]
    extended_precision: bool
    fit_coefficients: List[float]


class ScalingResult(BaseModel):
    rate: float
    error_probability: float
    tau: float
    min_blocklength_over_log_inverse_energy: float
    tau_source: str


class ExponentResult(BaseModel):
    channel: str
    snr: float
    rate: float
    exponent: float
    branch: str
    flags: List[str] = Field(default_factory=list)


class SimulationRow(BaseModel):
    """Analytic vs empirical prediction variance at one block position."""

    position: int
    snr: float
    analytic: float
    empirical: float
    stderr: float
    z_score: float


class ValidationCheck(BaseModel):
    name: str
    passed: bool
    value: Optional[float] = None
    expected: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""


class ValidationReport(BaseModel):
    passed: bool
    checks: List[ValidationCheck]


class RunManifest(BaseModel):
    """Provenance of a computation, written ahead of every result file."""

    subcommand: str
    model_path: Optional[str] = None
    output_path: Optional[str] = None
    parameters: Dict[str, Any] = Field(default_factory=dict)
    tolerance_requested: float
    tolerance_achieved: Optional[float] = None
    tool_version: str
    started_at: datetime = Field(default_factory=datetime.utcnow)
    wall_time_s: float = 0.0


class ErrorResponse(BaseModel):
    """Model for error responses."""

    error: str = Field(..., description="Error message")
    detail: Optional[str] = Field(None, description="Detailed error information")
    timestamp: datetime = Field(default_factory=datetime.utcnow)
