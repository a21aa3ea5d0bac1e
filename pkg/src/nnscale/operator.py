"""The sampling operator F_n over a rectangle.

Given a function f on I = prod_i [a_i, b_i] and a density kernel phi, the
operator is the normalized kernel-weighted sum of samples on the lattice
k/n:

    F_n(f, x) = sum_k f(k/n) psi(n x - k)  /  sum_k psi(n x - k),

with k ranging over the integer box ceil(n a_i) <= k_i <= floor(n b_i).
Both sums are truncated per axis at the kernel's truncation radius; the
untruncated denominator is bounded below by phi(1)^d, so the ratio is well
defined on all of I.

Evaluation at a single point is routed through the batched grid evaluator,
so `evaluate` and `evaluate_grid` agree bitwise, and grid evaluation is
deterministic under any thread count (each point's arithmetic is
self-contained). `evaluate_mesh` is a separable fast path for tensor-product
grids; it matches the pointwise definition up to floating-point
reassociation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateDenominator, EmptyIndexSet, NonFiniteSample
from .kernels import SigmoidalKernel, phi

__all__ = [
    "Domain",
    "SampleSet",
    "ScalarField",
    "function_field",
    "index_set",
    "sample",
    "evaluate",
    "evaluate_grid",
    "evaluate_mesh",
]


@dataclass(frozen=True)
class Domain:
    """A closed axis-aligned rectangle prod_i [lo_i, hi_i], d in {1, 2}."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lo) != len(self.hi):
            raise ValueError("lo and hi must have equal length")
        if len(self.lo) not in (1, 2):
            raise ValueError("only dimensions 1 and 2 are supported")
        if not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError("each lo_i must be strictly below hi_i")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def extent(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.lo, self.hi))

    @property
    def volume(self) -> float:
        return float(np.prod(self.extent))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of rows of ``points`` (P, d) lying in the rectangle."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=1)


@dataclass(frozen=True)
class ScalarField:
    """A bounded real-valued function on a rectangle.

    ``evaluate`` maps an array of points with shape (P, d) to (P,) values.
    Concrete backings are closures over formulas, uniform-grid samples, or
    piecewise-constant image models.
    """

    domain: Domain
    evaluate: Callable[[np.ndarray], np.ndarray]


def function_field(domain: Domain, fn: Callable[..., np.ndarray]) -> ScalarField:
    """Wrap a vectorized coordinate function f(x1[, x2]) as a ScalarField."""

    def _eval(points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        return np.asarray(fn(*(pts[:, i] for i in range(domain.dim))), dtype=float)

    return ScalarField(domain, _eval)


@dataclass(frozen=True)
class SampleSet:
    """Samples f(k/n) on the lattice index box of a domain.

    ``values[k - k_lo]`` (per axis) holds f(k/n); the array extent per axis
    is k_hi - k_lo + 1.
    """

    n: int
    domain: Domain
    k_lo: tuple[int, ...]
    k_hi: tuple[int, ...]
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        extent = tuple(hi - lo + 1 for lo, hi in zip(self.k_lo, self.k_hi))
        if any(e < 1 for e in extent):
            raise EmptyIndexSet(f"index box {self.k_lo}..{self.k_hi} is empty")
        if self.values.shape != extent:
            raise ValueError(f"values shape {self.values.shape} != extent {extent}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteSample("sample values must be finite")
        self.values.setflags(write=False)


def index_set(domain: Domain, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Integer bounds (ceil(n lo_i), floor(n hi_i)) of the node lattice."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    k_lo = tuple(math.ceil(n * a) for a in domain.lo)
    k_hi = tuple(math.floor(n * b) for b in domain.hi)
    if any(hi < lo for lo, hi in zip(k_lo, k_hi)):
        raise EmptyIndexSet(f"no lattice node of step 1/{n} falls inside {domain}")
    return k_lo, k_hi


def sample(f: ScalarField, n: int) -> SampleSet:
    """Evaluate ``f`` at every node k/n of its domain's index box."""
    k_lo, k_hi = index_set(f.domain, n)
    axes = [np.arange(lo, hi + 1, dtype=float) / n for lo, hi in zip(k_lo, k_hi)]
    if f.domain.dim == 1:
        pts = axes[0][:, None]
        values = np.asarray(f.evaluate(pts), dtype=float)
    else:
        g1, g2 = np.meshgrid(axes[0], axes[1], indexing="ij")
        pts = np.column_stack([g1.ravel(), g2.ravel()])
        values = np.asarray(f.evaluate(pts), dtype=float).reshape(g1.shape)
    if not np.all(np.isfinite(values)):
        raise NonFiniteSample("function produced a non-finite sample")
    return SampleSet(n, f.domain, k_lo, k_hi, values)


def _axis_window(
    u: float, k_lo: int, k_hi: int, radius: float
) -> tuple[int, int]:
    """Index range [j0, j1) into the samples for nodes with |u - k| <= radius."""
    j0 = max(math.ceil(u - radius), k_lo) - k_lo
    j1 = min(math.floor(u + radius), k_hi) - k_lo + 1
    return j0, j1


def _evaluate_point(
    samples: SampleSet, kernel: SigmoidalKernel, x: np.ndarray, radius: float
) -> float:
    n = samples.n
    windows = []
    for i in range(samples.domain.dim):
        u = n * float(x[i])
        j0, j1 = _axis_window(u, samples.k_lo[i], samples.k_hi[i], radius)
        if j0 >= j1:
            return math.nan  # empty window; caller widens and retries
        k = np.arange(samples.k_lo[i] + j0, samples.k_lo[i] + j1, dtype=float)
        windows.append((j0, j1, phi(kernel, u - k)))
    if samples.domain.dim == 1:
        j0, j1, w = windows[0]
        den = float(w.sum())
        if den == 0.0:
            return math.nan
        return float(w @ samples.values[j0:j1]) / den
    (a0, a1, w1), (b0, b1, w2) = windows
    den = float(w1.sum()) * float(w2.sum())
    if den == 0.0:
        return math.nan
    num = float(w1 @ samples.values[a0:a1, b0:b1] @ w2)
    return num / den


def evaluate_grid(
    samples: SampleSet,
    kernel: SigmoidalKernel,
    grid: Sequence,
    threads: int | None = None,
) -> np.ndarray:
    """Evaluate F_n at each point of ``grid`` (sequence of points, or (P, d)).

    Results are in input order and independent of ``threads``: every point is
    computed from the same truncated node window with the same summation
    tree regardless of how points are partitioned across workers.
    """
    pts = np.atleast_2d(np.asarray(grid, dtype=float))
    if pts.shape[1] != samples.domain.dim:
        raise ValueError("grid dimensionality does not match the sample domain")
    if not np.all(samples.domain.contains(pts)):
        raise ValueError("evaluation points must lie inside the domain")

    def run(block: np.ndarray) -> np.ndarray:
        out = np.empty(len(block))
        for i, x in enumerate(block):
            v = _evaluate_point(samples, kernel, x, kernel.truncation_radius)
            if math.isnan(v):
                # Defensive recovery: the nearest node is within distance 1
                # per axis, so a radius covering 1 restores a positive sum.
                wider = max(kernel.truncation_radius, 1.0) + 0.5
                v = _evaluate_point(samples, kernel, x, wider)
                if math.isnan(v):
                    raise DegenerateDenominator(
                        f"kernel sum vanished at {tuple(x)} even after widening"
                    )
            out[i] = v
        return out

    if threads is None or threads <= 1 or len(pts) <= 1:
        return run(pts)
    chunks = np.array_split(pts, min(threads, len(pts)))
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(run, chunks)))


def evaluate(samples: SampleSet, kernel: SigmoidalKernel, x) -> float:
    """Evaluate F_n at one point; bitwise equal to the grid path."""
    return float(evaluate_grid(samples, kernel, [np.asarray(x, dtype=float).ravel()])[0])


def _axis_weights(
    xs: np.ndarray, n: int, k_lo: int, k_hi: int, kernel: SigmoidalKernel, radius: float
) -> np.ndarray:
    """Dense per-axis weight matrix W[p, j] = phi(n xs_p - k_j), truncated."""
    u = n * np.asarray(xs, dtype=float)
    k = np.arange(k_lo, k_hi + 1, dtype=float)
    diff = u[:, None] - k[None, :]
    w = phi(kernel, diff)
    w[np.abs(diff) > radius] = 0.0
    return w


def evaluate_mesh(
    samples: SampleSet,
    kernel: SigmoidalKernel,
    axes: Sequence[np.ndarray],
) -> np.ndarray:
    """Evaluate F_n on a tensor-product grid given per-axis coordinates.

    Exploits the product structure of psi: with per-axis weight matrices
    W_i[p, j] = phi(n x_p - k_j), the numerator is W1 @ values @ W2.T and
    the denominator factors into per-axis row sums. Equal to the pointwise
    definition up to floating-point reassociation.
    """
    if len(axes) != samples.domain.dim:
        raise ValueError("one coordinate array per axis is required")
    for ax, lo, hi in zip(axes, samples.domain.lo, samples.domain.hi):
        a = np.asarray(ax, dtype=float)
        if a.size and (a.min() < lo or a.max() > hi):
            raise ValueError("evaluation points must lie inside the domain")

    ws = [
        _axis_weights(ax, samples.n, lo, hi, kernel, kernel.truncation_radius)
        for ax, lo, hi in zip(axes, samples.k_lo, samples.k_hi)
    ]
    sums = [w.sum(axis=1) for w in ws]
    for i, s in enumerate(sums):
        if np.any(s == 0.0):  # defensive: widen only the affected rows
            wider = max(kernel.truncation_radius, 1.0) + 0.5
            rows = np.flatnonzero(s == 0.0)
            patch = _axis_weights(
                np.asarray(axes[i], dtype=float)[rows],
                samples.n,
                samples.k_lo[i],
                samples.k_hi[i],
                kernel,
                wider,
            )
            ws[i][rows] = patch
            sums[i] = ws[i].sum(axis=1)
            if np.any(sums[i] == 0.0):
                raise DegenerateDenominator("kernel sum vanished on a mesh row")

    if samples.domain.dim == 1:
        return (ws[0] @ samples.values) / sums[0]
    num = ws[0] @ samples.values @ ws[1].T
    return num / np.outer(sums[0], sums[1])
