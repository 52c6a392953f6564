"""Single-cell parametrized cubature rule and the comparison rules.

For f on [a, b] x [c, d] and parameters (alpha1, beta1, alpha2, beta2) the
rule combines

* the centre value weighted by (beta1 - alpha1)(beta2 - alpha2),
* line integrals along the two midlines and the four edges,
* corner values (``H``) and midline/edge crossing values (``G``),

so that the double integral minus the rule value equals the integral of
p(t) q(s) d^2f/dtds, where p and q are the kernels in :mod:`certcub.kernels`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .core import BivariateFn, ParamSet, QuadConfig, Rectangle, validate_params
from .errors import OutOfDomain
from .quad1d import DEFAULT_TOL, check_refinement, composite_nodes


@dataclass(frozen=True)
class RuleTerms:
    """Pieces of the rule; all integral fields already carry their weights.

    ``value = sum(midline_integrals) + sum(edge_integrals)
    - midpoint_term - h_term - g_term``.
    """

    midpoint_term: float
    h_term: float
    g_term: float
    midline_integrals: tuple[float, float]
    edge_integrals: tuple[float, float]
    value: float


def _assemble(midpoint_term, h_term, g_term, midline, edge) -> float:
    return (midline[0] + midline[1]) + (edge[0] + edge[1]) - midpoint_term - h_term - g_term


def _corner_coeffs(rect, theta):
    wa, wb = theta.alpha1 - rect.a, rect.b - theta.beta1
    wc, wd = theta.alpha2 - rect.c, rect.d - theta.beta2
    return wa, wb, wc, wd


def corner_term_H(f: BivariateFn, rect: Rectangle, theta: ParamSet) -> float:
    validate_params(rect, theta)
    wa, wb, wc, wd = _corner_coeffs(rect, theta)
    v = _PointCache(f)
    return _h(v, rect, wa, wb, wc, wd)


def midline_term_G(f: BivariateFn, rect: Rectangle, theta: ParamSet) -> float:
    validate_params(rect, theta)
    wa, wb, wc, wd = _corner_coeffs(rect, theta)
    v = _PointCache(f)
    return _g(v, rect, theta, wa, wb, wc, wd)


class _PointCache:
    """Point lookup that skips evaluation when the coefficient is zero.

    With ``record=True`` it only collects the points that would be needed, so
    they can be evaluated in one batch and passed back in as ``values``.
    """

    def __init__(self, f, values=None, record=False):
        self.f = f
        self.values = {} if values is None else values
        self.record = record
        self.wanted = []

    def term(self, coeff, t, s):
        if coeff == 0:
            return 0.0
        key = (t, s)
        if self.record:
            if key not in self.wanted:
                self.wanted.append(key)
            return 0.0
        if key not in self.values:
            self.values[key] = f_scalar(self.f, t, s)
        return coeff * self.values[key]


def f_scalar(f: BivariateFn, t: float, s: float) -> float:
    return float(f.at(t, s))


def _h(v, rect, wa, wb, wc, wd):
    a, b, c, d = rect.a, rect.b, rect.c, rect.d
    left = (v.term(wc, a, c) + v.term(wd, a, d)) if wa != 0 else 0.0
    right = (v.term(wc, b, c) + v.term(wd, b, d)) if wb != 0 else 0.0
    return wa * left + wb * right


def _g(v, rect, theta, wa, wb, wc, wd):
    mt, ms = rect.mid_t, rect.mid_s
    dt = theta.beta1 - theta.alpha1
    ds = theta.beta2 - theta.alpha2
    horiz = (v.term(wc, mt, rect.c) + v.term(wd, mt, rect.d)) if dt != 0 else 0.0
    vert = (v.term(wa, rect.a, ms) + v.term(wb, rect.b, ms)) if ds != 0 else 0.0
    return dt * horiz + ds * vert


def _line_tol(bound: Optional[float]) -> float:
    if bound is None:
        return DEFAULT_TOL
    return max(DEFAULT_TOL, 1e-3 * bound)


def cubature_value(
    f: BivariateFn,
    rect: Rectangle,
    theta: ParamSet,
    cfg: Optional[QuadConfig] = None,
    *,
    bound: Optional[float] = None,
) -> RuleTerms:
    """Apply the rule on one rectangle.

    Line integrals use composite Gauss-Legendre under ``cfg``; each weighted
    line integral must survive panel doubling to within
    ``max(1e-12, 1e-3 * bound)`` where ``bound`` is the certified error bound
    of the calling context, if known.
    """
    validate_params(rect, theta)
    cfg = cfg or QuadConfig()
    tol = _line_tol(bound)
    a, b, c, d = rect.a, rect.b, rect.c, rect.d
    mt, ms = rect.mid_t, rect.mid_s
    wa, wb, wc, wd = _corner_coeffs(rect, theta)
    dt = theta.beta1 - theta.alpha1
    ds = theta.beta2 - theta.alpha2

    # nonzero-weight lines as (name, weight, fixed coordinate), per direction
    t_lines = [(k, w, x) for k, w, x in (("mid_t", ds, ms), ("edge_c", wc, c), ("edge_d", wd, d)) if w != 0]
    s_lines = [(k, w, x) for k, w, x in (("mid_s", dt, mt), ("edge_a", wa, a), ("edge_b", wb, b)) if w != 0]
    xt_c, wt_c = composite_nodes(a, b, cfg.gauss_order, cfg.panels)
    xt_f, wt_f = composite_nodes(a, b, cfg.gauss_order, 2 * cfg.panels)
    xs_c, ws_c = composite_nodes(c, d, cfg.gauss_order, cfg.panels)
    xs_f, ws_f = composite_nodes(c, d, cfg.gauss_order, 2 * cfg.panels)

    def point_terms(v):
        return v.term(dt * ds, mt, ms), _h(v, rect, wa, wb, wc, wd), _g(v, rect, theta, wa, wb, wc, wd)

    recorder = _PointCache(f, record=True)
    point_terms(recorder)

    # one batched evaluation: t-lines, then s-lines, then isolated points
    run_t = np.concatenate([xt_c, xt_f])
    run_s = np.concatenate([xs_c, xs_f])
    fix_t = np.array([x for _, _, x in t_lines])
    fix_s = np.array([x for _, _, x in s_lines])
    pts = [(np.tile(run_t, len(t_lines)), np.repeat(fix_t, run_t.size))]
    pts.append((np.repeat(fix_s, run_s.size), np.tile(run_s, len(s_lines))))
    pts.append((np.array([p[0] for p in recorder.wanted]), np.array([p[1] for p in recorder.wanted])))
    vals = f.at(np.concatenate([p[0] for p in pts]), np.concatenate([p[1] for p in pts]))
    n_t = run_t.size * len(t_lines)
    n_s = run_s.size * len(s_lines)
    point_vals = dict(zip(recorder.wanted, vals[n_t + n_s:].tolist()))

    integrals = dict.fromkeys(("mid_t", "mid_s", "edge_c", "edge_d", "edge_a", "edge_b"), 0.0)
    for lines, block, wco, wfi in (
        (t_lines, vals[:n_t], wt_c, wt_f),
        (s_lines, vals[n_t:n_t + n_s], ws_c, ws_f),
    ):
        if not lines:
            continue
        block = block.reshape(len(lines), -1)
        weights = np.array([w for _, w, _ in lines])
        nc = wco.size
        coarse = weights * (block[:, :nc] @ wco)
        fine_terms = (weights[:, None] * wfi[None, :]) * block[:, nc:]
        fine = fine_terms.sum(axis=1)
        scale = np.abs(fine_terms).sum(axis=1)
        for (key, _, _), co, fi, sc in zip(lines, coarse.tolist(), fine.tolist(), scale.tolist()):
            check_refinement(co, fi, sc, tol, f"{key} line integral")
            integrals[key] = co

    midpoint, h, g = point_terms(_PointCache(f, point_vals))
    midline = (integrals["mid_t"], integrals["mid_s"])
    edge = (integrals["edge_c"] + integrals["edge_d"], integrals["edge_a"] + integrals["edge_b"])
    return RuleTerms(midpoint, h, g, midline, edge, _assemble(midpoint, h, g, midline, edge))


def identity_residual(
    f: BivariateFn,
    rect: Rectangle,
    theta: ParamSet,
    cfg: Optional[QuadConfig] = None,
    tol: float = 1e-12,
) -> float:
    """|kernel integral - (double integral - rule value)|, both sides by the oracle."""
    from .oracle import reference_integral, reference_kernel_integral

    kernel_side = reference_kernel_integral(f, rect, theta, tol).value
    total = reference_integral(f, rect, tol).value
    value = cubature_value(f, rect, theta, cfg).value
    return abs(kernel_side - (total - value))


def bd_cubature_value(
    f: BivariateFn, rect: Rectangle, x: float, y: float, cfg: Optional[QuadConfig] = None
) -> float:
    """Comparison rule anchored at (x, y).

    Returns (b-a) * int f(x, s) ds + (d-c) * int f(t, y) dt - (b-a)(d-c) f(x, y),
    which is exact whenever the mixed partial vanishes.
    """
    if not rect.contains(x, y):
        raise OutOfDomain(f"anchor ({x}, {y}) outside rectangle")
    cfg = cfg or QuadConfig()
    along_s = _checked_line(lambda s: f.at(x, s), rect.c, rect.d, cfg)
    along_t = _checked_line(lambda t: f.at(t, y), rect.a, rect.b, cfg)
    return rect.width * along_s + rect.height * along_t - rect.area * f_scalar(f, x, y)


def _checked_line(g: Callable, lo: float, hi: float, cfg: QuadConfig) -> float:
    xc, wc = composite_nodes(lo, hi, cfg.gauss_order, cfg.panels)
    xf, wf = composite_nodes(lo, hi, cfg.gauss_order, 2 * cfg.panels)
    coarse = float(wc @ g(xc))
    fine_terms = wf * g(xf)
    check_refinement(coarse, float(fine_terms.sum()), float(np.abs(fine_terms).sum()), DEFAULT_TOL)
    return coarse


def ostrowski_1d_value_and_bound(
    g: Callable[[float], float], a: float, b: float, x: float, m1: float
) -> tuple[float, float]:
    """One-point rule (b-a) g(x) for the integral of g over [a, b] and its bound.

    The bound is [1/4 + (x - (a+b)/2)^2 / (b-a)^2] (b-a)^2 m1 where m1 bounds |g'|.
    """
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    if not a <= x <= b:
        raise OutOfDomain(f"x={x} outside [{a}, {b}]")
    if m1 < 0:
        raise ValueError(f"m1 must be nonnegative, got {m1}")
    length = b - a
    factor = 0.25 + (x - 0.5 * (a + b)) ** 2 / length**2
    return length * float(g(x)), factor * length**2 * m1
