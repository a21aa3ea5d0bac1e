"""Request/response models for the HTTP service.

Images travel as base64-encoded Netpbm bytes (the canonical serialization
of the imageio module). Infinities are not representable in JSON, so the
fields that can legitimately produce them (psnr, fitted slopes) use null in
their place; CSV renderings inside the same responses keep the literal
"inf" / "-inf" spellings.
"""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

__all__ = [
    "KernelRequest",
    "KernelSample",
    "KernelResponse",
    "ResizeRequest",
    "ResizeResponse",
    "MetricsRequest",
    "MetricsResponse",
    "PipelineRequest",
    "PipelineRowModel",
    "PipelineResponse",
    "StudyRequest",
    "StudyResponse",
    "HealthResponse",
    "none_for_inf",
]

MethodName = Literal["nn-ramp", "nn-logistic", "bilinear", "bicubic", "nearest-down"]
FamilyName = Literal["ramp", "logistic"]
ConstantsName = Literal["squared", "paper"]


def none_for_inf(x: float) -> float | None:
    """Map +/-inf to None for JSON transport; finite values pass through."""
    return None if math.isinf(x) else x


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HealthResponse(_Strict):
    status: str
    version: str


class KernelRequest(_Strict):
    family: FamilyName
    epsilon: float = Field(1e-8, gt=0.0)
    sample_count: int = Field(65, ge=0, le=100001)
    sample_radius: float | None = Field(None, gt=0.0)


class KernelSample(_Strict):
    x: float
    phi: float


class KernelResponse(_Strict):
    family: FamilyName
    epsilon: float
    truncation_radius: float
    phi_zero: float
    phi_one: float
    m0_max_deviation: float
    samples: list[KernelSample]
    csv: str


class ResizeRequest(_Strict):
    image: str = Field(description="base64 Netpbm bytes")
    method: MethodName
    n: int = Field(10, ge=1)
    r: float = Field(2.0, gt=0.0)
    factor: int = Field(2, ge=1)
    offset: int = Field(0, ge=0)
    kernel_epsilon: float = Field(1e-8, gt=0.0)
    threads: int | None = Field(None, ge=1)


class ResizeResponse(_Strict):
    image: str
    rows: int
    cols: int
    channels: int
    seconds: float


class MetricsRequest(_Strict):
    image: str
    reference: str
    constants: ConstantsName = "squared"


class MetricsResponse(_Strict):
    mse: float
    psnr: float | None
    s_index: float
    ssim_global: float
    ssim_windowed: float
    csv: str


class PipelineRequest(_Strict):
    image: str
    methods: list[MethodName] = Field(min_length=1)
    n: int = Field(10, ge=1)
    factor: int = Field(2, ge=1)
    offset: int = Field(0, ge=0)
    kernel_epsilon: float = Field(1e-8, gt=0.0)
    constants: ConstantsName = "squared"
    threads: int | None = Field(None, ge=1)


class PipelineRowModel(_Strict):
    method: str
    n: int | None
    psnr: float | None = None
    s_index: float | None = None
    ssim_windowed: float | None = None
    ssim_global: float | None = None
    mse: float | None = None
    seconds: float | None = None
    error: str | None = None


class PipelineResponse(_Strict):
    rows: list[PipelineRowModel]
    csv: str


class StudyRequest(_Strict):
    image: str
    method: MethodName = "nn-ramp"
    n_values: list[int] = Field(min_length=3)
    factor: int = Field(1, ge=1)
    offset: int = Field(0, ge=0)
    kernel_epsilon: float = Field(1e-8, gt=0.0)
    threads: int | None = Field(None, ge=1)
    error_study: bool = False
    p: float = Field(1.0, ge=1.0)


class StudyResponse(_Strict):
    n_values: list[int]
    dissimilarities: list[float]
    slope: float | None
    residual: float
    csv: str
    model_errors: list[float] | None = None
    model_slope: float | None = None
    model_residual: float | None = None
    model_csv: str | None = None
