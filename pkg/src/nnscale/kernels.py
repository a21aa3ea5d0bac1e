"""Sigmoidal activation families and their density kernels.

Two activations are provided: the logistic function and the piecewise-linear
ramp. Each induces a univariate density

    phi(x) = (sigma(x + 1) - sigma(x - 1)) / 2,

an even, non-negative bump whose integer translates form a partition of
unity, and a multivariate product kernel psi(x) = phi(x_1) * ... * phi(x_d).
The module also exposes the discrete absolute moments of psi and the
truncation/tail utilities used to cut kernel sums at negligible terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

__all__ = [
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
]

# phi_logistic(x) = (e^2 - 1) / (2 e^2) * expit(1 - x) * expit(1 + x);
# the prefactor is the closed-form constant of the product representation.
_LOGISTIC_SCALE = (math.e**2 - 1.0) / (2.0 * math.e**2)

# Terms below this magnitude are dropped from open-ended tail sums.
_MACHINE_NEGLIGIBLE = 1e-16


@dataclass(frozen=True)
class SigmoidalKernel:
    """An activation family together with its derived truncation data.

    Attributes
    ----------
    family : str
        Either ``"logistic"`` or ``"ramp"``.
    alpha : float
        Polynomial decay exponent of the density tail. The ramp density has
        compact support and the logistic density decays exponentially, so
        both store ``math.inf``: every finite-order moment exists.
    truncation_radius : float
        Radius beyond which phi is treated as negligible in kernel sums.
        Exactly 1.5 for the ramp (true support bound); derived from
        ``epsilon`` for the logistic.
    epsilon : float
        Negligibility threshold that produced ``truncation_radius``.
    """

    family: str
    alpha: float
    truncation_radius: float
    epsilon: float

    def __post_init__(self) -> None:
        if self.family not in ("logistic", "ramp"):
            raise ValueError(f"unknown kernel family: {self.family!r}")
        if not self.truncation_radius > 0:
            raise ValueError("truncation_radius must be positive")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")


def logistic_kernel(epsilon: float = 1e-8) -> SigmoidalKernel:
    """Build the logistic-activation kernel with the given cutoff threshold."""
    if not 0.0 < epsilon < _phi_logistic(0.0):
        raise ValueError("epsilon must lie in (0, phi(0))")
    radius = _logistic_truncation_radius(epsilon)
    return SigmoidalKernel("logistic", math.inf, radius, epsilon)


def ramp_kernel(epsilon: float = 1e-8) -> SigmoidalKernel:
    """Build the ramp-activation kernel (compact support, radius 3/2)."""
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    return SigmoidalKernel("ramp", math.inf, 1.5, epsilon)


def sigmoid(kernel: SigmoidalKernel, x):
    """Evaluate the activation sigma at ``x`` (scalar or array).

    Non-decreasing with limits 0 at -inf and 1 at +inf. The ramp is 0 below
    -1/2, linear on [-1/2, 1/2], and 1 above 1/2.
    """
    x = np.asarray(x, dtype=float)
    if kernel.family == "logistic":
        out = expit(x)
    else:
        out = np.clip(x + 0.5, 0.0, 1.0)
    return out if out.shape else float(out)


def _phi_logistic(x):
    # Product form of (sigma(x+1) - sigma(x-1)) / 2: both expit factors stay
    # in (0, 1), so there is no cancellation for large |x|.
    return _LOGISTIC_SCALE * expit(1.0 - x) * expit(1.0 + x)


def _phi_ramp(x):
    # Trapezoid: 0.5 on |x| <= 0.5, linear down to 0 at |x| = 1.5.
    return 0.5 * np.clip(1.5 - np.abs(x), 0.0, 1.0)


def phi(kernel: SigmoidalKernel, x):
    """Evaluate the density phi(x) = (sigma(x+1) - sigma(x-1)) / 2.

    Even, non-negative, bounded by phi(0); the ramp density vanishes
    exactly outside (-3/2, 3/2).
    """
    x = np.asarray(x, dtype=float)
    out = _phi_logistic(x) if kernel.family == "logistic" else _phi_ramp(x)
    return out if out.shape else float(out)


def psi(kernel: SigmoidalKernel, x) -> float:
    """Evaluate the product kernel psi(x) = prod_i phi(x_i).

    ``x`` is a point with d >= 1 coordinates (last axis if an array).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise ValueError("psi requires at least one coordinate")
    out = np.prod(phi(kernel, x), axis=-1)
    return out if np.ndim(out) else float(out)


@dataclass(frozen=True)
class MomentEstimate:
    """A truncated lower bound for a discrete moment, with the radius used."""

    value: float
    truncation_radius: float


def discrete_moment(
    kernel: SigmoidalKernel,
    beta: float,
    d: int,
    probe_resolution: int,
) -> MomentEstimate:
    """Estimate M_beta = sup_x sum_k psi(x - k) * ||k - x||^beta.

    The lattice sum is 1-periodic per coordinate, so the sup is probed over
    one period [0, 1)^d at ``probe_resolution`` points per axis. The sum is
    truncated at the radius where a single term falls below
    ``kernel.epsilon``; the estimate is therefore a lower bound, returned
    together with that radius.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if d not in (1, 2):
        raise ValueError("d must be 1 or 2")
    if probe_resolution < 1:
        raise ValueError("probe_resolution must be positive")
    if beta >= kernel.alpha:
        raise ValueError("beta must be below the kernel's decay exponent")

    radius = _moment_truncation_radius(kernel, beta)
    k = np.arange(-math.ceil(radius) - 1, math.ceil(radius) + 2, dtype=float)
    u = np.arange(probe_resolution, dtype=float) / probe_resolution

    if d == 1:
        diff = u[:, None] - k[None, :]
        terms = phi(kernel, diff) * np.abs(diff) ** beta
        value = float(np.max(terms.sum(axis=1)))
    else:
        # Separate per-axis weights; ||k - x||^beta couples the axes, so
        # accumulate over k1 explicitly (the k range is short).
        w1 = phi(kernel, u[:, None] - k[None, :])  # (P, K)
        best = 0.0
        for i1 in range(len(u)):
            dx1 = (k - u[i1]) ** 2  # (K,)
            dx2 = (u[:, None] - k[None, :]) ** 2  # (P, K)
            # dist[p, j1, j2] = ||(k_j1 - u_i1, k_j2 - u_p)||
            dist = np.sqrt(dx1[None, :, None] + dx2[:, None, :])
            w = w1[i1][None, :, None] * w1[:, None, :]
            best = max(best, float(np.max((w * dist**beta).sum(axis=(1, 2)))))
        value = best
    return MomentEstimate(value, radius)


def _moment_truncation_radius(kernel: SigmoidalKernel, beta: float) -> float:
    """Radius where phi(r) * max(r, 1)^beta drops below kernel.epsilon."""
    if kernel.family == "ramp":
        return 1.5
    r = 1.0
    while _phi_logistic(r) * max(r, 1.0) ** beta >= kernel.epsilon:
        r += 1.0
        if r > 1e4:  # unreachable for sane epsilon; guards the loop
            break
    return r


def _logistic_truncation_radius(epsilon: float) -> float:
    # phi is even and strictly decreasing on [0, inf), so the smallest R with
    # phi(x) < epsilon for all |x| > R solves phi(R) = epsilon; bisect.
    lo, hi = 0.0, 1.0
    while _phi_logistic(hi) >= epsilon:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _phi_logistic(mid) >= epsilon:
            lo = mid
        else:
            hi = mid
    return hi


def truncation_radius(kernel: SigmoidalKernel, epsilon: float) -> float:
    """Smallest R such that phi(x) < epsilon whenever |x| > R.

    The ramp density is supported on [-3/2, 3/2], so its radius is 1.5 for
    every valid epsilon; the logistic radius is found by bisection.
    """
    if not 0.0 < epsilon < phi(kernel, 0.0):
        raise ValueError("epsilon must lie in (0, phi(0))")
    if kernel.family == "ramp":
        return 1.5
    return _logistic_truncation_radius(epsilon)


def tail_sum(kernel: SigmoidalKernel, x: float, radius: float) -> float:
    """Sum of phi(x - k) over integers k with |x - k| > radius.

    The open-ended sum is cut once terms drop below 1e-16. Compactly
    supported densities give exactly 0 for radius >= 1.5.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    total = 0.0
    # Left tail: largest integer k with k < x - radius, then downward.
    k = math.floor(x - radius)
    while k >= x - radius:
        k -= 1
    while True:
        term = float(phi(kernel, x - k))
        if term < _MACHINE_NEGLIGIBLE:
            break
        total += term
        k -= 1
    # Right tail: smallest integer k with k > x + radius, then upward.
    k = math.ceil(x + radius)
    while k <= x + radius:
        k += 1
    while True:
        term = float(phi(kernel, x - k))
        if term < _MACHINE_NEGLIGIBLE:
            break
        total += term
        k += 1
    return total
