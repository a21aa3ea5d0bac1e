"""HTTP service exposing the reconstruction toolkit.

The command line is a thin client of this app; everything it can do is a
POST under /v1 with images as base64 Netpbm payloads. Domain failures
(bad parameters, malformed images, degenerate configurations) surface as
400 responses with a one-line detail; schema violations are FastAPI's
usual 422.
"""

from __future__ import annotations

import base64
import binascii
import time

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import __version__
from .analysis import study_csv
from .errors import NnscaleError
from .imageio import ImageRaster, read_pnm, write_pnm
from .kernels import SigmoidalKernel, phi
from .metrics import SsimConstants, metrics_report
from .pipeline import (
    apply_method,
    kernel_for,
    metrics_csv,
    model_error_study,
    pipeline_csv,
    pipeline_run,
    study_run,
)
from .schemas import (
    HealthResponse,
    KernelRequest,
    KernelResponse,
    KernelSample,
    MetricsRequest,
    MetricsResponse,
    PipelineRequest,
    PipelineResponse,
    PipelineRowModel,
    ResizeRequest,
    ResizeResponse,
    StudyRequest,
    StudyResponse,
    none_for_inf,
)

__all__ = ["create_app"]


def _decode_image(payload: str, what: str = "image") -> ImageRaster:
    try:
        raw = base64.b64decode(payload.encode("ascii"), validate=True)
    except (binascii.Error, UnicodeEncodeError) as exc:
        raise ValueError(f"{what} is not valid base64: {exc}") from exc
    return read_pnm(raw)


def _encode_image(raster: ImageRaster) -> str:
    return base64.b64encode(write_pnm(raster)).decode("ascii")


def _constants(name: str) -> SsimConstants:
    return SsimConstants.squared() if name == "squared" else SsimConstants.unsquared()


def _partition_deviation(kernel: SigmoidalKernel, probes: int = 201) -> float:
    """Max deviation of sum_k phi(x - k) from 1 over a unit-interval sweep."""
    xs = np.linspace(0.0, 1.0, probes)
    reach = int(np.ceil(kernel.truncation_radius)) + 5
    ks = np.arange(-reach, reach + 2, dtype=float)
    total = phi(kernel, xs[:, None] - ks[None, :]).sum(axis=1)
    return float(np.max(np.abs(total - 1.0)))


def _kernel_samples(
    kernel: SigmoidalKernel, count: int, radius: float | None
) -> list[tuple[float, float]]:
    if count == 0:
        return []
    reach = kernel.truncation_radius if radius is None else radius
    xs = np.linspace(-reach, reach, count) if count > 1 else np.array([0.0])
    return [(float(x), float(phi(kernel, np.array([x]))[0])) for x in xs]


def _kernel_csv(samples: list[tuple[float, float]]) -> str:
    lines = ["x,phi"] + [f"{x:.9g},{v:.9g}" for x, v in samples]
    return "\n".join(lines) + "\n"


def create_app() -> FastAPI:
    app = FastAPI(title="nnscale", version=__version__)

    @app.exception_handler(NnscaleError)
    async def _domain_error(request: Request, exc: NnscaleError) -> JSONResponse:
        del request
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
        del request
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/v1/health", response_model=HealthResponse)
    async def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/v1/kernel", response_model=KernelResponse)
    async def kernel_info(req: KernelRequest) -> KernelResponse:
        kernel = kernel_for(req.family, req.epsilon)
        samples = _kernel_samples(kernel, req.sample_count, req.sample_radius)
        zero = float(phi(kernel, np.array([0.0]))[0])
        one = float(phi(kernel, np.array([1.0]))[0])
        return KernelResponse(
            family=req.family,
            epsilon=req.epsilon,
            truncation_radius=kernel.truncation_radius,
            phi_zero=zero,
            phi_one=one,
            m0_max_deviation=_partition_deviation(kernel),
            samples=[KernelSample(x=x, phi=v) for x, v in samples],
            csv=_kernel_csv(samples),
        )

    @app.post("/v1/resize", response_model=ResizeResponse)
    async def resize(req: ResizeRequest) -> ResizeResponse:
        raster = _decode_image(req.image)
        start = time.perf_counter()
        out, _ = apply_method(
            raster,
            req.method,
            n=req.n,
            r=req.r,
            factor=req.factor,
            offset=req.offset,
            kernel_epsilon=req.kernel_epsilon,
            threads=req.threads,
        )
        seconds = time.perf_counter() - start
        return ResizeResponse(
            image=_encode_image(out),
            rows=out.rows,
            cols=out.cols,
            channels=out.channels,
            seconds=seconds,
        )

    @app.post("/v1/metrics", response_model=MetricsResponse)
    async def metrics(req: MetricsRequest) -> MetricsResponse:
        f = _decode_image(req.image)
        g = _decode_image(req.reference, "reference")
        report = metrics_report(f, g, _constants(req.constants))
        return MetricsResponse(
            mse=report.mse,
            psnr=none_for_inf(report.psnr),
            s_index=report.s_index,
            ssim_global=report.ssim_global,
            ssim_windowed=report.ssim_windowed,
            csv=metrics_csv(report),
        )

    @app.post("/v1/pipeline", response_model=PipelineResponse)
    async def pipeline(req: PipelineRequest) -> PipelineResponse:
        raster = _decode_image(req.image)
        rows = pipeline_run(
            raster,
            req.methods,
            n=req.n,
            factor=req.factor,
            offset=req.offset,
            kernel_epsilon=req.kernel_epsilon,
            constants=_constants(req.constants),
            threads=req.threads,
        )
        models = []
        for row in rows:
            if row.report is None:
                models.append(PipelineRowModel(method=row.method, n=row.n, error=row.error))
            else:
                models.append(
                    PipelineRowModel(
                        method=row.method,
                        n=row.n,
                        psnr=none_for_inf(row.report.psnr),
                        s_index=row.report.s_index,
                        ssim_windowed=row.report.ssim_windowed,
                        ssim_global=row.report.ssim_global,
                        mse=row.report.mse,
                        seconds=row.seconds,
                    )
                )
        return PipelineResponse(rows=models, csv=pipeline_csv(rows))

    @app.post("/v1/study", response_model=StudyResponse)
    async def study(req: StudyRequest) -> StudyResponse:
        raster = _decode_image(req.image)
        result = study_run(
            raster,
            req.method,
            req.n_values,
            factor=req.factor,
            offset=req.offset,
            kernel_epsilon=req.kernel_epsilon,
            threads=req.threads,
        )
        response = StudyResponse(
            n_values=list(result.n_values),
            dissimilarities=list(result.errors),
            slope=none_for_inf(result.fitted_slope),
            residual=result.fit_residual,
            csv=study_csv(result, "dissimilarity"),
        )
        if req.error_study:
            if req.method not in ("nn-ramp", "nn-logistic"):
                raise ValueError("the model error study needs an nn-* method")
            family = "ramp" if req.method == "nn-ramp" else "logistic"
            model = model_error_study(
                raster, family, req.n_values, req.p, req.kernel_epsilon
            )
            response = response.model_copy(
                update={
                    "model_errors": list(model.errors),
                    "model_slope": none_for_inf(model.fitted_slope),
                    "model_residual": model.fit_residual,
                    "model_csv": study_csv(model, "error"),
                }
            )
        return response

    return app
