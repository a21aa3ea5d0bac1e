"""Quality metrics for image pairs and function pairs.

Raster metrics (MSE, PSNR, S-index, SSIM) act on 8-bit images; cSSIM acts
on non-negative scalar fields over a shared domain via midpoint quadrature
under the uniform probability measure.

Two SSIM variants are deliberately kept apart: ``ssim_global`` evaluates the
structural-similarity closed form once over whole-image statistics, while
``ssim_windowed`` is the conventional mean of local values under an 11x11
Gaussian window. They answer different questions and are never substituted
for one another.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DimMismatch, NegativeFunction, TooSmall
from .operator import ScalarField
from .imageio import ImageRaster

__all__ = [
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
]

_LUMINANCE_RANGE = 255.0


@dataclass(frozen=True)
class SsimConstants:
    """Stabilizing constants C1, C2 for the SSIM closed form."""

    c1: float
    c2: float
    label: str = "custom"

    def __post_init__(self) -> None:
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("SSIM constants must be positive")

    @staticmethod
    def squared() -> "SsimConstants":
        """The conventional choice C1 = (0.01 L)^2, C2 = (0.03 L)^2."""
        k1, k2 = 0.01 * _LUMINANCE_RANGE, 0.03 * _LUMINANCE_RANGE
        return SsimConstants(k1 * k1, k2 * k2, "squared")

    @staticmethod
    def unsquared() -> "SsimConstants":
        """The literal unsquared variant C1 = 0.01 L, C2 = 0.03 L."""
        return SsimConstants(0.01 * _LUMINANCE_RANGE, 0.03 * _LUMINANCE_RANGE, "paper")


@dataclass(frozen=True)
class MetricsReport:
    mse: float
    psnr: float
    s_index: float
    ssim_global: float
    ssim_windowed: float
    constants: SsimConstants
    luminance_range: float = _LUMINANCE_RANGE


@dataclass(frozen=True)
class CssimReport:
    mu_f: float
    mu_g: float
    sigma_f2: float
    sigma_g2: float
    sigma_fg: float
    cssim: float
    dissimilarity: float
    c1: float
    c2: float
    resolution: int


def _check_dims(f: ImageRaster, g: ImageRaster) -> None:
    if f.data.shape != g.data.shape:
        raise DimMismatch(f"image shapes differ: {f.data.shape} vs {g.data.shape}")


def mse(f: ImageRaster, g: ImageRaster) -> float:
    """Mean squared pixel difference over all entries."""
    _check_dims(f, g)
    diff = f.data.astype(float) - g.data.astype(float)
    return float(np.mean(diff * diff))


def psnr(f: ImageRaster, g: ImageRaster, max_i: float = _LUMINANCE_RANGE) -> float:
    """Peak signal-to-noise ratio in dB; identical images give +inf."""
    if not max_i > 0:
        raise ValueError("max_i must be positive")
    err = mse(f, g)
    if err == 0.0:
        return math.inf
    return 20.0 * math.log10(max_i / math.sqrt(err))


def s_index(f: ImageRaster, g: ImageRaster) -> float:
    """Mean of 1 - |F - G| on luminances normalized to [0, 1]."""
    _check_dims(f, g)
    diff = np.abs(f.data.astype(float) - g.data.astype(float)) / _LUMINANCE_RANGE
    return float(np.mean(1.0 - diff))


def _ssim_form(
    mu_f: float,
    mu_g: float,
    sigma_f2: float,
    sigma_g2: float,
    sigma_fg: float,
    c1: float,
    c2: float,
) -> float:
    # Denominator terms written as a*a + b*b so that identical statistics
    # make numerator and denominator bitwise equal (x + x is exact, and
    # doubling commutes with rounding), giving exactly 1.0 for f = g.
    num = (2.0 * mu_f * mu_g + c1) * (2.0 * sigma_fg + c2)
    den = (mu_f * mu_f + mu_g * mu_g + c1) * (sigma_f2 + sigma_g2 + c2)
    return num / den


def ssim_global(
    f: ImageRaster, g: ImageRaster, constants: SsimConstants | None = None
) -> float:
    """Structural-similarity closed form over whole-image statistics.

    Means, variances, and covariance are population statistics over every
    entry of the pair; the constant convention is selectable because the
    index is sensitive to it at this scale.
    """
    _check_dims(f, g)
    c = constants if constants is not None else SsimConstants.squared()
    a = f.data.astype(float).ravel()
    b = g.data.astype(float).ravel()
    mu_f, mu_g = float(np.mean(a)), float(np.mean(b))
    da, db = a - mu_f, b - mu_g
    sigma_f2 = float(np.mean(da * da))
    sigma_g2 = float(np.mean(db * db))
    sigma_fg = float(np.mean(da * db))
    return _ssim_form(mu_f, mu_g, sigma_f2, sigma_g2, sigma_fg, c.c1, c.c2)


def _gaussian_window(radius: int = 5, sigma: float = 1.5) -> np.ndarray:
    x = np.arange(-radius, radius + 1, dtype=float)
    w = np.exp(-(x * x) / (2.0 * sigma * sigma))
    return w / w.sum()


def _windowed_plane(a: np.ndarray, b: np.ndarray, c1: float, c2: float) -> float:
    w = _gaussian_window()
    radius = (len(w) - 1) // 2

    def smooth(img: np.ndarray) -> np.ndarray:
        tmp = correlate1d(img, w, axis=0, mode="nearest")
        return correlate1d(tmp, w, axis=1, mode="nearest")

    mu_a, mu_b = smooth(a), smooth(b)
    s_aa = smooth(a * a) - mu_a * mu_a
    s_bb = smooth(b * b) - mu_b * mu_b
    s_ab = smooth(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * s_ab + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (s_aa + s_bb + c2)
    local = num / den
    # Border windows see padded values; drop them from the pooled mean.
    core = local[radius:-radius, radius:-radius]
    return float(np.mean(core))


def ssim_windowed(f: ImageRaster, g: ImageRaster) -> float:
    """Mean-pooled local SSIM: 11x11 Gaussian window, sigma 1.5, squared
    constants, border of window-radius pixels excluded from the pool.

    Color pairs are scored channel-wise and averaged.
    """
    _check_dims(f, g)
    if f.rows < 11 or f.cols < 11:
        raise TooSmall("windowed SSIM needs at least 11x11 images")
    c = SsimConstants.squared()
    a = f.data.astype(float)
    b = g.data.astype(float)
    if f.channels == 1:
        return _windowed_plane(a, b, c.c1, c.c2)
    per = [_windowed_plane(a[:, :, k], b[:, :, k], c.c1, c.c2) for k in range(3)]
    return float(np.mean(per))


def metrics_report(
    f: ImageRaster, g: ImageRaster, constants: SsimConstants | None = None
) -> MetricsReport:
    """All raster metrics for a pair, in one report."""
    c = constants if constants is not None else SsimConstants.squared()
    return MetricsReport(
        mse=mse(f, g),
        psnr=psnr(f, g),
        s_index=s_index(f, g),
        ssim_global=ssim_global(f, g, c),
        ssim_windowed=ssim_windowed(f, g),
        constants=c,
    )


def _midpoint_grid(field: ScalarField, resolution: int) -> np.ndarray:
    lo = np.asarray(field.domain.lo, dtype=float)
    hi = np.asarray(field.domain.hi, dtype=float)
    d = lo.size
    axes = [
        lo[i] + (hi[i] - lo[i]) * (np.arange(resolution) + 0.5) / resolution
        for i in range(d)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def cssim(
    f: ScalarField,
    g: ScalarField,
    resolution: int = 256,
    c1: float | None = None,
    c2: float | None = None,
) -> CssimReport:
    """Structural similarity of two non-negative fields on a shared domain.

    Statistics are integrals under the uniform probability measure,
    realized by the composite midpoint rule on a grid with ``resolution``
    points per axis; the closed form then matches the raster SSIM, so at
    pixel-grid resolution the two agree for piecewise-constant models.
    """
    if resolution < 1:
        raise ValueError("resolution must be a positive integer")
    if f.domain != g.domain:
        raise DimMismatch("fields must share a domain")
    c = SsimConstants.squared()
    c1 = c.c1 if c1 is None else c1
    c2 = c.c2 if c2 is None else c2
    if not (c1 > 0 and c2 > 0):
        raise ValueError("cSSIM constants must be positive")

    pts = _midpoint_grid(f, resolution)
    fv = np.asarray(f.evaluate(pts), dtype=float)
    gv = np.asarray(g.evaluate(pts), dtype=float)
    if np.any(fv < 0.0) or np.any(gv < 0.0):
        raise NegativeFunction("cSSIM is defined for non-negative functions")

    # Uniform probability measure: every midpoint carries weight 1/count,
    # so integrals reduce to plain means regardless of the domain's size.
    mu_f, mu_g = float(np.mean(fv)), float(np.mean(gv))
    df, dg = fv - mu_f, gv - mu_g
    sigma_f2 = float(np.mean(df * df))
    sigma_g2 = float(np.mean(dg * dg))
    sigma_fg = float(np.mean(df * dg))
    value = _ssim_form(mu_f, mu_g, sigma_f2, sigma_g2, sigma_fg, c1, c2)
    return CssimReport(
        mu_f=mu_f,
        mu_g=mu_g,
        sigma_f2=sigma_f2,
        sigma_g2=sigma_g2,
        sigma_fg=sigma_fg,
        cssim=value,
        dissimilarity=abs(1.0 - value),
        c1=c1,
        c2=c2,
        resolution=resolution,
    )
