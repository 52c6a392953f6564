"""Certified error bounds and bound-optimal parameters."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .core import ParamMode, ParamSet, Rectangle, validate_params
from .errors import OutOfDomain
from .kernels import axis_kernels, kernel_l1


@dataclass(frozen=True)
class BoundBreakdown:
    b1: float
    b2: float
    supnorm: float
    total: float


def error_bound(rect: Rectangle, theta: ParamSet, supnorm: float) -> BoundBreakdown:
    """Ceiling on |double integral - rule value| for a given mixed-partial sup-norm.

    The total is the product of the two axis kernel L1 norms times ``supnorm``.
    """
    if not (supnorm >= 0 and math.isfinite(supnorm)):
        raise ValueError(f"supnorm must be finite and nonnegative, got {supnorm}")
    validate_params(rect, theta)
    kt, ks = axis_kernels(rect, theta)
    b1 = kernel_l1(kt)
    b2 = kernel_l1(ks)
    return BoundBreakdown(b1, b2, float(supnorm), b1 * b2 * supnorm)


def optimal_params(rect: Rectangle) -> ParamSet:
    """Quarter points of each side; there each axis factor equals side**2 / 8."""
    return ParamSet(
        (3 * rect.a + rect.b) / 4,
        (rect.a + 3 * rect.b) / 4,
        (3 * rect.c + rect.d) / 4,
        (rect.c + 3 * rect.d) / 4,
    )


def midpoint_params(rect: Rectangle) -> ParamSet:
    return ParamSet(rect.a, rect.b, rect.c, rect.d)


def trapezoid_params(rect: Rectangle) -> ParamSet:
    return ParamSet(rect.mid_t, rect.mid_t, rect.mid_s, rect.mid_s)


def params_for_mode(
    rect: Rectangle,
    mode: ParamMode,
    theta: Optional[ParamSet] = None,
    reference: Optional[Rectangle] = None,
) -> ParamSet:
    """Parameters for ``rect`` under ``mode``.

    In custom mode ``theta`` is given on ``reference`` (defaults to ``rect``)
    and carried over affinely, so a cell keeps the same relative placement.
    """
    mode = ParamMode(mode)
    if mode is ParamMode.MIDPOINT:
        return midpoint_params(rect)
    if mode is ParamMode.TRAPEZOID:
        return trapezoid_params(rect)
    if mode is ParamMode.OPTIMAL:
        return optimal_params(rect)
    if theta is None:
        raise ValueError("custom mode requires explicit parameters")
    if reference is None or reference == rect:
        return theta
    return theta.mapped(reference, rect)


def bd_error_bound(rect: Rectangle, x: float, y: float, supnorm: float) -> float:
    """Bound for the comparison rule anchored at (x, y)."""
    if not rect.contains(x, y):
        raise OutOfDomain(f"anchor ({x}, {y}) outside rectangle")
    if not (supnorm >= 0 and math.isfinite(supnorm)):
        raise ValueError(f"supnorm must be finite and nonnegative, got {supnorm}")
    ft = 0.25 * rect.width**2 + (x - rect.mid_t) ** 2
    fs = 0.25 * rect.height**2 + (y - rect.mid_s) ** 2
    return ft * fs * supnorm
