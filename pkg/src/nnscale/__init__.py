"""Sigmoidal-kernel reconstruction operators for images and functions,
with quality metrics, convergence analysis, an HTTP service, and a CLI.
"""

from .analysis import (
    GridField,
    RateStudy,
    convergence_study,
    envelopes,
    grid_field,
    local_modulus,
    lp_error,
    lp_norm,
    midpoint_axes,
    rate_fit,
    rate_study,
    shift_modulus,
    study_csv,
    tau_modulus,
)
from .errors import (
    DegenerateDenominator,
    DimMismatch,
    EmptyIndexSet,
    FormatMismatch,
    IndivisibleDims,
    InvalidP,
    MalformedHeader,
    NegativeFunction,
    NnscaleError,
    NonFiniteSample,
    NonPositiveError,
    NotColor,
    NotGrayscale,
    PnmError,
    TooSmall,
    TruncatedPayload,
    UnsupportedMaxval,
)
from .imageio import ImageRaster, merge_channels, read_pnm, split_channels, write_pnm
from .kernels import (
    MomentEstimate,
    SigmoidalKernel,
    discrete_moment,
    logistic_kernel,
    phi,
    psi,
    ramp_kernel,
    sigmoid,
    tail_sum,
    truncation_radius,
)
from .metrics import (
    CssimReport,
    MetricsReport,
    SsimConstants,
    cssim,
    metrics_report,
    mse,
    psnr,
    s_index,
    ssim_global,
    ssim_windowed,
)
from .operator import (
    Domain,
    SampleSet,
    ScalarField,
    evaluate,
    evaluate_grid,
    evaluate_mesh,
    function_field,
    index_set,
    sample,
)
from .pipeline import (
    RESIZE_METHODS,
    UPSCALE_METHODS,
    PipelineRow,
    apply_method,
    kernel_for,
    metrics_csv,
    model_error_study,
    pipeline_csv,
    pipeline_run,
    study_run,
)
from .rescale import (
    PiecewiseConstantModel,
    RescaleConfig,
    downscale_nearest,
    image_model,
    output_dims,
    round_clamp_u8,
    upscale_bicubic,
    upscale_bilinear,
    upscale_nn,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # kernels
    "SigmoidalKernel",
    "MomentEstimate",
    "logistic_kernel",
    "ramp_kernel",
    "sigmoid",
    "phi",
    "psi",
    "discrete_moment",
    "truncation_radius",
    "tail_sum",
    # operator
    "Domain",
    "ScalarField",
    "SampleSet",
    "function_field",
    "index_set",
    "sample",
    "evaluate",
    "evaluate_grid",
    "evaluate_mesh",
    # imageio
    "ImageRaster",
    "read_pnm",
    "write_pnm",
    "split_channels",
    "merge_channels",
    # rescale
    "PiecewiseConstantModel",
    "RescaleConfig",
    "image_model",
    "downscale_nearest",
    "upscale_nn",
    "upscale_bilinear",
    "upscale_bicubic",
    "output_dims",
    "round_clamp_u8",
    # metrics
    "SsimConstants",
    "MetricsReport",
    "CssimReport",
    "mse",
    "psnr",
    "s_index",
    "ssim_global",
    "ssim_windowed",
    "cssim",
    "metrics_report",
    # analysis
    "GridField",
    "RateStudy",
    "grid_field",
    "midpoint_axes",
    "lp_norm",
    "lp_error",
    "local_modulus",
    "tau_modulus",
    "shift_modulus",
    "envelopes",
    "rate_fit",
    "rate_study",
    "convergence_study",
    "study_csv",
    # pipeline
    "PipelineRow",
    "kernel_for",
    "apply_method",
    "pipeline_run",
    "UPSCALE_METHODS",
    "RESIZE_METHODS",
    "pipeline_csv",
    "metrics_csv",
    "study_run",
    "model_error_study",
    # errors
    "NnscaleError",
    "EmptyIndexSet",
    "NonFiniteSample",
    "DegenerateDenominator",
    "PnmError",
    "MalformedHeader",
    "UnsupportedMaxval",
    "TruncatedPayload",
    "FormatMismatch",
    "NotColor",
    "NotGrayscale",
    "IndivisibleDims",
    "DimMismatch",
    "TooSmall",
    "NegativeFunction",
    "InvalidP",
    "NonPositiveError",
]
