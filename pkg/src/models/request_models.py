"""
Request models for the blockfade toolkit.

Pydantic models for the JSON channel-model schema read by the CLI and for
the bodies of the HTTP endpoints.
"""

from typing import Annotated, List, Literal, Optional, Union

from pydantic import BaseModel, Field


class ComplexValue(BaseModel):
    """Complex number as a {re, im} pair."""

    re: float = Field(..., description="Real part")
    im: float = Field(0.0, description="Imaginary part")

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


Scalar = Union[float, ComplexValue]


def as_complex(value: Scalar) -> complex:
    return value.to_complex() if isinstance(value, ComplexValue) else complex(value)


class SegmentSpec(BaseModel):
    lo: float = Field(..., description="Segment start in [0, pi]")
    hi: float = Field(..., description="Segment end in [0, pi]")
    level: float = Field(..., ge=0.0, description="Spectral level on the segment")


class LagSpec(BaseModel):
    i: int = Field(..., ge=0, description="Block lag")
    matrix: List[List[Scalar]] = Field(..., description="T x T correlation matrix R(i)")


class GridNodeSpec(BaseModel):
    omega: float = Field(..., description="Frequency in [-pi, pi]")
    matrix: List[List[Scalar]] = Field(..., description="T x T spectral density at omega")


class ScalarGaussMarkovSpec(BaseModel):
    kind: Literal["scalar_gauss_markov"]
    rho: Scalar


class BlockGaussMarkovSpec(BaseModel):
    kind: Literal["block_gauss_markov"]
    T: int = Field(..., ge=1)
    rho1: Scalar
    rho2: Scalar


class PiecewiseSpec(BaseModel):
    kind: Literal["piecewise"]
    segments: List[SegmentSpec] = Field(..., min_length=1)


class FlatSpec(BaseModel):
    kind: Literal["flat"]


class VanishingSpec(BaseModel):
    kind: Literal["vanishing"]
    alpha: float
    theta: float


class WorstCaseSpec(BaseModel):
    kind: Literal["worst_case"]
    alpha: float


class TwoLevelSpec(BaseModel):
    kind: Literal["two_level"]
    eps1: float
    eps2: float
    alpha1: float
    alpha2: float


ScalarSpec = Annotated[
    Union[ScalarGaussMarkovSpec, PiecewiseSpec, FlatSpec, VanishingSpec, WorstCaseSpec, TwoLevelSpec],
    Field(discriminator="kind"),
]


class ConstantWithinBlockSpec(BaseModel):
    kind: Literal["constant_within_block"]
    T: int = Field(..., ge=1)
    scalar: ScalarSpec


class CorrelationSpec(BaseModel):
    kind: Literal["correlation"]
    T: int = Field(..., ge=1)
    lags: List[LagSpec] = Field(..., min_length=1)


class ExplicitGridSpec(BaseModel):
    kind: Literal["explicit_grid"]
    T: int = Field(..., ge=1)
    nodes: List[GridNodeSpec] = Field(..., min_length=1)


ModelSpec = Annotated[
    Union[
        ScalarGaussMarkovSpec, PiecewiseSpec, FlatSpec, VanishingSpec, WorstCaseSpec, TwoLevelSpec,
        BlockGaussMarkovSpec, ConstantWithinBlockSpec, CorrelationSpec, ExplicitGridSpec,
    ],
    Field(discriminator="kind"),
]


class ModelRequest(BaseModel):
    """Base body for endpoints that take a channel model."""

    model: ModelSpec = Field(..., description="Channel model in the JSON model schema")


class SpectrumEvalRequest(ModelRequest):
    omega: List[float] = Field(..., min_length=1, description="Frequencies in radians")


class PredictionRequest(ModelRequest):
    snr: float = Field(..., gt=0)
    history_len: Optional[int] = Field(None, ge=0)
    extrapolate: bool = False


class PrelogRequest(ModelRequest):
    snr_grid: Optional[List[float]] = Field(None, description="SNR points for the slope estimate")
    grid_size: Optional[int] = Field(None, ge=64)
    eig_threshold: Optional[float] = Field(None, gt=0)


class BoundsRequest(ModelRequest):
    snr: List[float] = Field(..., min_length=1)
    x_min: Optional[float] = Field(None, gt=0, description="Annulus inner radius, default sqrt(SNR)/2")
    history_len: Optional[int] = Field(None, ge=0)
    distribution: Literal["annulus-uniform", "log-uniform"] = "annulus-uniform"


class CpRequest(ModelRequest):
    snr: List[float] = Field(..., min_length=1)


class CrossoverRequest(ModelRequest):
    m1: List[int] = Field(..., min_length=1, description="First subset, 1-based positions")
    m2: List[int] = Field(..., min_length=1, description="Second subset, 1-based positions")
    lo: Optional[float] = Field(None, gt=0)
    hi: Optional[float] = Field(None, gt=0)


class ExponentRequest(BaseModel):
    channel: Literal["awgn", "rayleigh"]
    snr: float = Field(..., gt=0)
    rate: Optional[float] = Field(None, ge=0, description="Rate in nats")
    rate_offset: Optional[float] = Field(None, description="Rate given as log SNR - offset")


class ArcSpec(BaseModel):
    center: float = Field(..., description="Arc center in radians")
    angle: float = Field(..., gt=0, description="Full central angle in radians")


class TauRequest(BaseModel):
    arcs: List[ArcSpec] = Field(..., min_length=1)
    n: Optional[int] = Field(None, ge=2, description="Fekete points; closed form is used for a single arc when omitted")
    restarts: Optional[int] = Field(None, ge=1)
