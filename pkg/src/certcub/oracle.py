"""Brute-force reference double integrals, independent of the rule under test."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import _backend
from .core import BivariateFn, ParamSet, Rectangle, validate_params
from .errors import OracleNonConvergent
from .kernels import axis_kernels, kernel_values
from .quad1d import composite_nodes

ORDER = 16
MAX_LEVELS = 8
MIN_TOL = 1e-14


@dataclass(frozen=True)
class OracleResult:
    value: float
    est_error: float
    levels_used: int


def _tensor_gauss(integrand: Callable, rect: Rectangle, panels: int) -> float:
    t, wt = composite_nodes(rect.a, rect.b, ORDER, panels)
    s, ws = composite_nodes(rect.c, rect.d, ORDER, panels)
    vals = integrand(t[:, None], s[None, :])
    return _backend.weighted_sum_2d(vals, wt, ws)


def _refine(integrand: Callable, rect: Rectangle, tol: float, what: str) -> OracleResult:
    if not tol >= MIN_TOL:
        raise ValueError(f"tol must be >= {MIN_TOL}, got {tol}")
    prev = _tensor_gauss(integrand, rect, 1)
    diff = float("inf")
    for level in range(2, MAX_LEVELS + 1):
        cur = _tensor_gauss(integrand, rect, 2 ** (level - 1))
        diff = abs(cur - prev)
        if diff < tol:
            return OracleResult(cur, diff, level)
        prev = cur
    raise OracleNonConvergent(
        f"{what}: successive refinements still differ by {diff:.3e} after "
        f"{MAX_LEVELS} levels (tol {tol:.1e})"
    )


def reference_integral(f: BivariateFn, rect: Rectangle, tol: float = 1e-12) -> OracleResult:
    """Tensor-product Gauss (order 16) with panel doubling, 1 to 128 panels per axis."""
    return _refine(f.at, rect, tol, f"integral of {f.name}")


def reference_kernel_integral(
    f: BivariateFn,
    rect: Rectangle,
    theta: ParamSet,
    tol: float = 1e-12,
    *,
    split: bool = True,
) -> OracleResult:
    """Integral of p(t) q(s) d^2f/dtds over ``rect``.

    The kernels jump at the midlines, so by default the rectangle is cut
    there and each quarter (where the integrand is smooth) is integrated
    separately. ``split=False`` integrates the whole rectangle at once; it
    exists to demonstrate the slower convergence.
    """
    validate_params(rect, theta)
    kt, ks = axis_kernels(rect, theta)
    mixed = f.mixed_at

    if not split:
        def whole(t, s):
            return kernel_values(kt, t) * kernel_values(ks, s) * mixed(t, s)

        return _refine(whole, rect, tol, f"kernel integral of {f.name}")

    total, err, levels = 0.0, 0.0, 0
    for (t0, t1, at), (s0, s1, as_) in [
        ((rect.a, rect.mid_t, theta.alpha1), (rect.c, rect.mid_s, theta.alpha2)),
        ((rect.a, rect.mid_t, theta.alpha1), (rect.mid_s, rect.d, theta.beta2)),
        ((rect.mid_t, rect.b, theta.beta1), (rect.c, rect.mid_s, theta.alpha2)),
        ((rect.mid_t, rect.b, theta.beta1), (rect.mid_s, rect.d, theta.beta2)),
    ]:
        def piece(t, s, at=at, as_=as_):
            return (t - at) * (s - as_) * mixed(t, s)

        res = _refine(piece, Rectangle(t0, t1, s0, s1), tol / 4, f"kernel integral of {f.name}")
        total += res.value
        err += res.est_error
        levels = max(levels, res.levels_used)
    return OracleResult(total, err, levels)
