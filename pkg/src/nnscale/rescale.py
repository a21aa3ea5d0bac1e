"""Image rescaling: the piecewise-constant image model, nearest-neighbor
downscaling, kernel-operator upscaling, and bilinear/bicubic baselines.

An N-row, M-column raster is modeled as a function on I = [0, N] x [0, M]
that is constant on unit cells: x in [i, i+1) x [j, j+1) maps to pixel
(i, j), with the last row/column of cells closed so the model is total on I.
The first coordinate runs down rows, the second across columns.

All upscalers evaluate at output pixel centers ((u + 0.5) / r, (v + 0.5) / r)
and round half-away-from-zero before clamping to [0, 255], so repeated runs
are byte-identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDenominator, IndivisibleDims, NotGrayscale
from .kernels import SigmoidalKernel, phi
from .operator import Domain, ScalarField
from .imageio import ImageRaster

__all__ = [
    "PiecewiseConstantModel",
    "RescaleConfig",
    "image_model",
    "downscale_nearest",
    "upscale_nn",
    "upscale_bilinear",
    "upscale_bicubic",
    "output_dims",
    "round_clamp_u8",
]


@dataclass(frozen=True)
class PiecewiseConstantModel:
    """The cell-constant model of a grayscale raster on [0, N] x [0, M]."""

    raster: ImageRaster
    domain: Domain

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Model values at points (P, 2); half-open cells, last ones closed."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n, m = self.raster.rows, self.raster.cols
        i = np.clip(np.floor(pts[:, 0]).astype(int), 0, n - 1)
        j = np.clip(np.floor(pts[:, 1]).astype(int), 0, m - 1)
        return self.raster.data[i, j].astype(float)

    def as_field(self) -> ScalarField:
        return ScalarField(self.domain, self.evaluate)


def image_model(raster: ImageRaster) -> PiecewiseConstantModel:
    """Wrap a single-channel raster as its piecewise-constant model."""
    if raster.channels != 1:
        raise NotGrayscale("the image model is defined for grayscale rasters")
    domain = Domain((0.0, 0.0), (float(raster.rows), float(raster.cols)))
    return PiecewiseConstantModel(raster, domain)


@dataclass(frozen=True)
class RescaleConfig:
    """Parameters of the kernel-operator upscaler.

    ``n`` is the node density per unit pixel (the operator samples the model
    on an (n*N + 1) x (n*M + 1) lattice); ``r`` the scale factor.
    """

    n: int
    r: float
    kernel: SigmoidalKernel

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if not self.r > 0:
            raise ValueError("scale factor r must be positive")


def round_clamp_u8(values: np.ndarray) -> np.ndarray:
    """Round half away from zero, clamp to [0, 255], return uint8."""
    rounded = np.copysign(np.floor(np.abs(values) + 0.5), values)
    return np.clip(rounded, 0.0, 255.0).astype(np.uint8)


def output_dims(rows: int, cols: int, r: float) -> tuple[int, int]:
    """Output size round(N*r) x round(M*r), rounding half away from zero."""
    out = (int(math.floor(rows * r + 0.5)), int(math.floor(cols * r + 0.5)))
    if out[0] < 1 or out[1] < 1:
        raise ValueError(f"scale factor {r} collapses the image to {out}")
    return out


def downscale_nearest(
    raster: ImageRaster, factor: int, offset: int = 0
) -> ImageRaster:
    """Keep one representative pixel per factor x factor block.

    ``offset`` selects the representative within each block (0 = top-left,
    factor-1 = bottom-right); the factor must divide both dimensions.
    """
    if factor < 1:
        raise ValueError("factor must be a positive integer")
    if not 0 <= offset < factor:
        raise ValueError("offset must lie in [0, factor)")
    if raster.rows % factor or raster.cols % factor:
        raise IndivisibleDims(
            f"{raster.rows}x{raster.cols} not divisible by {factor}"
        )
    return ImageRaster(raster.data[offset::factor, offset::factor].copy())


def _nn_axis_weights(
    out_len: int, r: float, n: int, cells: int, kernel: SigmoidalKernel
) -> np.ndarray:
    """Per-axis weights A[u, k] = phi(n * x_u - k) over nodes k = 0..n*cells,
    truncated at the kernel radius, with out-of-support entries zeroed."""
    xs = (np.arange(out_len) + 0.5) / r
    u = n * xs
    k = np.arange(n * cells + 1, dtype=float)
    diff = u[:, None] - k[None, :]
    w = phi(kernel, diff)
    w[np.abs(diff) > kernel.truncation_radius] = 0.0
    return w


def upscale_nn(
    raster: ImageRaster, config: RescaleConfig, threads: int | None = None
) -> ImageRaster:
    """Resize with the kernel operator applied to the image model.

    The model is constant on unit cells, so the node-value matrix factors
    through the cell index min(k // n, N-1): per-axis weight columns are
    grouped by cell (np.add.reduceat) and the numerator becomes
    (grouped A1) @ raster @ (grouped A2).T, identical, up to summation
    re-association, to weighting every lattice node individually, without
    materializing the (n*N + 1) x (n*M + 1) sample matrix. The denominator
    factors into per-axis weight row sums. Cost grows linearly in n through
    the weight-matrix build.

    ``threads`` is accepted for interface symmetry; the evaluation is a
    fixed sequence of whole-array operations, so the output is independent
    of it by construction.
    """
    if raster.channels != 1:
        raise NotGrayscale("upscale_nn processes one channel at a time")
    del threads
    n_rows, n_cols = raster.rows, raster.cols
    out_r, out_c = output_dims(n_rows, n_cols, config.r)
    n = config.n

    a1 = _nn_axis_weights(out_r, config.r, n, n_rows, config.kernel)
    a2 = _nn_axis_weights(out_c, config.r, n, n_cols, config.kernel)
    den_r, den_c = a1.sum(axis=1), a2.sum(axis=1)
    if np.any(den_r == 0.0) or np.any(den_c == 0.0):
        # In-domain centers always have a node within distance 1 (phi(1) > 0),
        # so this can only trip with a hand-built kernel whose radius < 1.
        raise DegenerateDenominator("axis weight row summed to zero")

    # Group node columns by the model cell they sample: cells are
    # [0..n-1], [n..2n-1], ..., with the final node n*N landing in cell N-1.
    starts_r = np.arange(n_rows) * n
    starts_c = np.arange(n_cols) * n
    b1 = np.add.reduceat(a1, starts_r, axis=1)
    b2 = np.add.reduceat(a2, starts_c, axis=1)

    num = b1 @ raster.data.astype(float) @ b2.T
    values = num / np.outer(den_r, den_c)
    return ImageRaster(round_clamp_u8(values))


def _linear_axis(data: np.ndarray, out_len: int, r: float) -> np.ndarray:
    """Linear interpolation along axis 0 at center-aligned source coords."""
    src = (np.arange(out_len) + 0.5) / r - 0.5
    i0 = np.floor(src).astype(int)
    t = src - i0
    lo = np.clip(i0, 0, data.shape[0] - 1)
    hi = np.clip(i0 + 1, 0, data.shape[0] - 1)
    return (1.0 - t)[:, None] * data[lo] + t[:, None] * data[hi]


def _keys_weight(t: np.ndarray) -> np.ndarray:
    """Cubic convolution weight (a = -1/2) at distance |t| < 2."""
    at = np.abs(t)
    inner = (1.5 * at - 2.5) * at * at + 1.0
    outer = ((-0.5 * at + 2.5) * at - 4.0) * at + 2.0
    return np.where(at <= 1.0, inner, np.where(at < 2.0, outer, 0.0))


def _cubic_axis(data: np.ndarray, out_len: int, r: float) -> np.ndarray:
    """Cubic convolution along axis 0, 4 taps, edge clamp."""
    src = (np.arange(out_len) + 0.5) / r - 0.5
    i0 = np.floor(src).astype(int)
    t = src - i0
    out = np.zeros((out_len,) + data.shape[1:])
    for tap in (-1, 0, 1, 2):
        idx = np.clip(i0 + tap, 0, data.shape[0] - 1)
        out += _keys_weight(t - tap)[:, None] * data[idx]
    return out


def _separable_resize(raster: ImageRaster, r: float, axis_fn) -> ImageRaster:
    out_r, out_c = output_dims(raster.rows, raster.cols, r)
    data = raster.data.astype(float)
    planes = data[:, :, None] if raster.channels == 1 else data
    resized = []
    for c in range(planes.shape[2]):
        plane = axis_fn(planes[:, :, c], out_r, r)
        plane = axis_fn(plane.T, out_c, r).T
        resized.append(plane)
    stacked = resized[0] if raster.channels == 1 else np.stack(resized, axis=2)
    return ImageRaster(round_clamp_u8(stacked))


def upscale_bilinear(raster: ImageRaster, r: float) -> ImageRaster:
    """Separable linear interpolation, pixel-center aligned, edge clamped."""
    return _separable_resize(raster, r, _linear_axis)


def upscale_bicubic(raster: ImageRaster, r: float) -> ImageRaster:
    """Separable cubic convolution (4x4 support), center aligned, clamped."""
    return _separable_resize(raster, r, _cubic_axis)
