"""Composite Gauss-Legendre line integrals with a refinement self-check."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .core import QuadConfig
from .errors import QuadratureFailure, UnsupportedOrder

MAX_ORDER = 64
DEFAULT_TOL = 1e-12
# Disagreement below this many ulps of sum(|w*g|) is rounding, not truncation.
_ROUNDING_ULPS = 64
_EPS = float(np.finfo(float).eps)


@dataclass(frozen=True)
class GaussRule:
    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def gauss_rule(order: int) -> GaussRule:
    """Gauss-Legendre nodes and weights on [-1, 1] for 1 <= order <= 64."""
    if not isinstance(order, (int, np.integer)) or not 1 <= order <= MAX_ORDER:
        raise UnsupportedOrder(f"Gauss order must be in [1, {MAX_ORDER}], got {order!r}")
    x, w = np.polynomial.legendre.leggauss(int(order))
    # exact mirror symmetry; leggauss is symmetric only to rounding
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    if order % 2:
        x[order // 2] = 0.0
    x.setflags(write=False)
    w.setflags(write=False)
    return GaussRule(int(order), x, w)


@lru_cache(maxsize=4096)
def _composite(a: float, b: float, order: int, panels: int):
    rule = gauss_rule(order)
    edges = a + (b - a) * np.arange(panels + 1) / panels
    edges[-1] = b
    half = 0.5 * np.diff(edges)
    mids = 0.5 * (edges[:-1] + edges[1:])
    x = (mids[:, None] + half[:, None] * rule.nodes[None, :]).ravel()
    w = (half[:, None] * rule.weights[None, :]).ravel()
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite_nodes(a: float, b: float, order: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the composite rule on ``panels`` equal panels of [a, b]."""
    return _composite(float(a), float(b), int(order), int(panels))


def refinement_tolerance(tol: float, fine_abs_sum: float) -> float:
    return max(tol, _ROUNDING_ULPS * _EPS * fine_abs_sum)


def check_refinement(coarse: float, fine: float, fine_abs_sum: float, tol: float, what: str = "line integral"):
    """Raise QuadratureFailure unless the coarse and doubled-panel results agree."""
    if not (math.isfinite(coarse) and math.isfinite(fine)):
        raise QuadratureFailure(f"{what}: non-finite result ({coarse}, {fine})")
    limit = refinement_tolerance(tol, fine_abs_sum)
    if abs(coarse - fine) > limit:
        raise QuadratureFailure(
            f"{what}: panel doubling changed the result by {abs(coarse - fine):.3e} "
            f"(allowed {limit:.3e}); raise gauss_order or panels"
        )


def integrate_1d(
    g: Callable,
    a: float,
    b: float,
    cfg: Optional[QuadConfig] = None,
    *,
    tol: float = DEFAULT_TOL,
    vectorized: bool = False,
) -> float:
    """Integrate ``g`` over [a, b] with a composite Gauss-Legendre rule.

    The result uses ``cfg.panels`` panels; the same rule on twice as many
    panels must agree to within ``tol`` (or the rounding floor of the sum),
    otherwise :class:`QuadratureFailure` is raised.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    cfg = cfg or QuadConfig()
    xc, wc = composite_nodes(a, b, cfg.gauss_order, cfg.panels)
    xf, wf = composite_nodes(a, b, cfg.gauss_order, 2 * cfg.panels)
    if vectorized:
        gc = np.asarray(g(xc), dtype=float) * np.ones_like(xc)
        gf = np.asarray(g(xf), dtype=float) * np.ones_like(xf)
    else:
        gc = np.array([g(float(x)) for x in xc], dtype=float)
        gf = np.array([g(float(x)) for x in xf], dtype=float)
    coarse = float(wc @ gc)
    fine = float(wf @ gf)
    check_refinement(coarse, fine, float(np.abs(wf * gf).sum()), tol)
    return coarse
