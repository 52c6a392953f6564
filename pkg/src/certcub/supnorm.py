"""Heuristic estimates of sup |d^2 f / dt ds| over a rectangle.

These numbers are never certificates: every value produced here is tagged
``Provenance.ESTIMATED`` by :func:`resolve_supnorm`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import BivariateFn, Provenance, Rectangle
from .errors import EstimationFailure, StencilOutOfDomain

DEFAULT_GRID = (101, 101)
DEFAULT_INFLATION = 1.1


@dataclass(frozen=True)
class SupNormEstimate:
    value: float
    grid: tuple[int, int]
    step: float  # 0.0 when the analytic mixed partial was sampled directly
    inflation: float
    raw: float  # grid maximum before inflation


def _axis_stencil(lo: float, hi: float, count: int, h: float):
    """First-derivative stencils at ``count`` equispaced points of [lo, hi].

    Interior points use the centred difference; points closer than h to an
    end use the second-order one-sided difference, so every stencil point
    stays inside [lo, hi] and the grid still reaches the boundary.
    """
    pts = np.linspace(lo, hi, count)
    xs = np.empty((count, 3))
    cs = np.zeros((count, 3))
    for i, x in enumerate(pts):
        if x - h >= lo and x + h <= hi:
            xs[i] = (x - h, x + h, x)
            cs[i] = (-0.5 / h, 0.5 / h, 0.0)
        elif x + 2 * h <= hi:
            xs[i] = (x, x + h, x + 2 * h)
            cs[i] = (-1.5 / h, 2.0 / h, -0.5 / h)
        else:
            xs[i] = (x - 2 * h, x - h, x)
            cs[i] = (0.5 / h, -2.0 / h, 1.5 / h)
    return xs, cs


def cross_differences(f: BivariateFn, rect: Rectangle, grid=DEFAULT_GRID, h: Optional[float] = None) -> np.ndarray:
    """Finite-difference mixed partial on a ``grid[0] x grid[1]`` lattice."""
    gx, gy = grid
    if gx < 3 or gy < 3:
        raise ValueError(f"grid must be at least 3x3, got {gx}x{gy}")
    if h is None:
        h = 1e-3 * min(rect.width, rect.height)
    if not h > 0:
        raise ValueError(f"step must be positive, got {h}")
    if 2 * h > rect.width or 2 * h > rect.height:
        raise StencilOutOfDomain(f"step h={h} too large: stencils need 2h inside the rectangle")
    xs, cx = _axis_stencil(rect.a, rect.b, gx, h)
    ys, cy = _axis_stencil(rect.c, rect.d, gy, h)
    vals = f.at(xs[:, :, None, None], ys[None, None, :, :])
    return np.einsum("ik,jl,ikjl->ij", cx, cy, vals)


def estimate_mixed_sup(
    f: BivariateFn,
    rect: Rectangle,
    grid=DEFAULT_GRID,
    h: Optional[float] = None,
    inflation: float = DEFAULT_INFLATION,
) -> SupNormEstimate:
    """Grid maximum of the finite-difference mixed partial, times ``inflation``.

    Default step is 1e-3 times the shorter side.
    """
    if inflation < 1:
        raise ValueError(f"inflation must be >= 1, got {inflation}")
    if h is None:
        h = 1e-3 * min(rect.width, rect.height)
    raw = float(np.max(np.abs(cross_differences(f, rect, grid, h))))
    return SupNormEstimate(raw * inflation, tuple(grid), float(h), float(inflation), raw)


def sample_mixed_sup(
    f: BivariateFn, rect: Rectangle, grid=DEFAULT_GRID, inflation: float = DEFAULT_INFLATION
) -> SupNormEstimate:
    """Grid maximum of the supplied analytic mixed partial, times ``inflation``."""
    if inflation < 1:
        raise ValueError(f"inflation must be >= 1, got {inflation}")
    t = np.linspace(rect.a, rect.b, grid[0])
    s = np.linspace(rect.c, rect.d, grid[1])
    raw = float(np.max(np.abs(f.mixed_at(t[:, None], s[None, :]))))
    return SupNormEstimate(raw * inflation, tuple(grid), 0.0, float(inflation), raw)


def resolve_supnorm(f: BivariateFn, rect: Rectangle) -> tuple[float, Provenance]:
    """Sup-norm for ``f`` on ``rect`` and where it came from.

    A user-certified value wins; otherwise the analytic mixed partial is
    sampled if present, else finite differences are used.
    """
    if f.supnorm is not None:
        return float(f.supnorm), f.supnorm_provenance
    if f.mixed_partial is not None:
        est = sample_mixed_sup(f, rect)
    else:
        est = estimate_mixed_sup(f, rect)
    if not np.isfinite(est.value):
        raise EstimationFailure(f"sup-norm estimate for {f.name} is not finite")
    return est.value, Provenance.ESTIMATED
