"""Reconstruction pipelines shared by the command line and the service:
method dispatch, downscale/upscale/score runs, dissimilarity-decay studies,
and their CSV renderings.

A pipeline run reconstructs an image and scores it against the original.
With ``factor`` = 1 the methods resize the image onto its own grid (pure
reconstruction); with ``factor`` >= 2 the image is first reduced by
nearest-neighbor decimation and then scaled back up, which is the
table-style comparison. Per-method failures are captured in their row so
one bad method does not abort the others.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Sequence

from .analysis import RateStudy, convergence_study, rate_study
from .errors import NnscaleError
from .imageio import ImageRaster, merge_channels, split_channels
from .kernels import SigmoidalKernel, logistic_kernel, ramp_kernel
from .metrics import MetricsReport, SsimConstants, metrics_report, ssim_windowed
from .rescale import (
    RescaleConfig,
    downscale_nearest,
    image_model,
    upscale_bicubic,
    upscale_bilinear,
    upscale_nn,
)

__all__ = [
    "UPSCALE_METHODS",
    "RESIZE_METHODS",
    "PipelineRow",
    "kernel_for",
    "apply_method",
    "pipeline_run",
    "pipeline_csv",
    "study_run",
    "model_error_study",
    "metrics_csv",
]

UPSCALE_METHODS = ("nn-ramp", "nn-logistic", "bilinear", "bicubic")
RESIZE_METHODS = UPSCALE_METHODS + ("nearest-down",)

_FAMILY_BY_METHOD = {"nn-ramp": "ramp", "nn-logistic": "logistic"}


@dataclass(frozen=True)
class PipelineRow:
    """One method's outcome: a report and timing, or a failure message."""

    method: str
    n: int | None
    report: MetricsReport | None
    seconds: float
    error: str | None = None


def kernel_for(family: str, epsilon: float = 1e-8) -> SigmoidalKernel:
    """Kernel factory by family name ('ramp' or 'logistic')."""
    if family == "ramp":
        return ramp_kernel(epsilon)
    if family == "logistic":
        return logistic_kernel(epsilon)
    raise ValueError(f"unknown kernel family {family!r}")


def _nn_resize(
    raster: ImageRaster, config: RescaleConfig, threads: int | None
) -> ImageRaster:
    if raster.channels == 1:
        return upscale_nn(raster, config, threads)
    planes = [upscale_nn(c, config, threads) for c in split_channels(raster)]
    return merge_channels(planes)


def apply_method(
    raster: ImageRaster,
    method: str,
    *,
    n: int = 10,
    r: float = 2.0,
    factor: int = 2,
    offset: int = 0,
    kernel_epsilon: float = 1e-8,
    threads: int | None = None,
) -> tuple[ImageRaster, int | None]:
    """Run one resizing method; returns the result and the n it used (None
    for methods that take no operator parameter).

    Color inputs are processed channel-wise where the method itself is
    single-channel.
    """
    if method in _FAMILY_BY_METHOD:
        kernel = kernel_for(_FAMILY_BY_METHOD[method], kernel_epsilon)
        config = RescaleConfig(n=n, r=r, kernel=kernel)
        return _nn_resize(raster, config, threads), n
    if method == "bilinear":
        return upscale_bilinear(raster, r), None
    if method == "bicubic":
        return upscale_bicubic(raster, r), None
    if method == "nearest-down":
        return downscale_nearest(raster, factor, offset), None
    raise ValueError(f"unknown method {method!r}")


def _reduced(raster: ImageRaster, factor: int, offset: int) -> ImageRaster:
    if factor == 1:
        return raster
    return downscale_nearest(raster, factor, offset)


def pipeline_run(
    raster: ImageRaster,
    methods: Sequence[str],
    *,
    n: int = 10,
    factor: int = 2,
    offset: int = 0,
    kernel_epsilon: float = 1e-8,
    constants: SsimConstants | None = None,
    threads: int | None = None,
) -> list[PipelineRow]:
    """Reconstruct with each method and score against the original.

    The working image is the original for factor 1, otherwise its
    nearest-neighbor reduction; each method scales it by ``factor`` so the
    comparison is always at the original size. ``seconds`` times the
    method's resize step only, since the reduction is shared.
    """
    if not methods:
        raise ValueError("at least one method is required")
    src = _reduced(raster, factor, offset)
    rows: list[PipelineRow] = []
    for method in methods:
        if method not in UPSCALE_METHODS:
            rows.append(
                PipelineRow(method, None, None, 0.0, f"not an upscaling method: {method!r}")
            )
            continue
        try:
            start = time.perf_counter()
            out, n_used = apply_method(
                src,
                method,
                n=n,
                r=float(factor),
                kernel_epsilon=kernel_epsilon,
                threads=threads,
            )
            seconds = time.perf_counter() - start
            report = metrics_report(raster, out, constants)
            rows.append(PipelineRow(method, n_used, report, seconds))
        except (NnscaleError, ValueError) as exc:
            rows.append(PipelineRow(method, None, None, 0.0, str(exc)))
    return rows


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def pipeline_csv(rows: Sequence[PipelineRow]) -> str:
    """CSV with one row per successful method; failures carry no metrics and
    are reported out of band."""
    lines = ["method,n,psnr,s_index,ssim_windowed,ssim_global,mse,seconds"]
    for row in rows:
        if row.report is None:
            continue
        rep = row.report
        lines.append(
            ",".join(
                [
                    row.method,
                    "" if row.n is None else str(row.n),
                    _fmt(rep.psnr),
                    _fmt(rep.s_index),
                    _fmt(rep.ssim_windowed),
                    _fmt(rep.ssim_global),
                    _fmt(rep.mse),
                    _fmt(row.seconds),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def metrics_csv(report: MetricsReport) -> str:
    """Single-line CSV: mse, psnr, s_index, ssim_global, ssim_windowed."""
    values = [
        report.mse,
        report.psnr,
        report.s_index,
        report.ssim_global,
        report.ssim_windowed,
    ]
    return ",".join(_fmt(v) for v in values) + "\n"


def study_run(
    raster: ImageRaster,
    method: str,
    n_values: Sequence[int],
    *,
    factor: int = 1,
    offset: int = 0,
    kernel_epsilon: float = 1e-8,
    threads: int | None = None,
) -> RateStudy:
    """Dissimilarity decay of the reconstruction pipeline over n.

    For each n the pipeline reconstructs the image (factor 1 reproduces it
    on its own grid) and records 1 - windowed SSIM against the original; a
    log-log slope is fitted unless some value reaches the exact floor, in
    which case the slope is the -inf sentinel.
    """
    if method not in UPSCALE_METHODS:
        raise ValueError(f"unknown method {method!r}")
    src = _reduced(raster, factor, offset)
    values = []
    for n in n_values:
        out, _ = apply_method(
            src,
            method,
            n=int(n),
            r=float(factor),
            kernel_epsilon=kernel_epsilon,
            threads=threads,
        )
        values.append(1.0 - ssim_windowed(raster, out))
    return rate_study([int(n) for n in n_values], values)


def model_error_study(
    raster: ImageRaster,
    family: str,
    n_values: Sequence[int],
    p: float = 1.0,
    kernel_epsilon: float = 1e-8,
) -> RateStudy:
    """L^p convergence of the operator on the image's piecewise-constant
    model, probed at twice the pixel resolution."""
    if not math.isfinite(p) and p != math.inf:
        raise ValueError("p must be finite or inf")
    model = image_model(raster)
    kernel = kernel_for(family, kernel_epsilon)
    resolution = (2 * raster.rows, 2 * raster.cols)
    return convergence_study(model.as_field(), kernel, n_values, p, resolution)
