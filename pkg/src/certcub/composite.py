"""Uniform m x n composite rule with summed per-cell bounds."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import _backend
from .bounds import error_bound, params_for_mode
from .core import (
    BivariateFn,
    CertifiedValue,
    ParamMode,
    ParamSet,
    Provenance,
    QuadConfig,
    Rectangle,
    validate_params,
)
from .errors import CertcubError
from .rule import cubature_value
from .supnorm import resolve_supnorm


@dataclass(frozen=True)
class CompositeRow:
    m: int
    n: int
    value: float
    certified_bound: float
    true_error: Optional[float] = None


@dataclass(frozen=True)
class CompositeReport:
    rows: list[CompositeRow]
    function_id: str
    supnorm_provenance: Provenance = Provenance.USER_CERTIFIED
    mode: ParamMode = ParamMode.OPTIMAL
    supnorm_used: float = 0.0

    def bound_ratios(self) -> list[Optional[float]]:
        """certified_bound[k-1] / certified_bound[k]; None for the first row."""
        out: list[Optional[float]] = [None]
        for prev, cur in zip(self.rows, self.rows[1:]):
            out.append(prev.certified_bound / cur.certified_bound if cur.certified_bound else math.nan)
        return out

    def error_ratios(self) -> list[Optional[float]]:
        out: list[Optional[float]] = [None]
        for prev, cur in zip(self.rows, self.rows[1:]):
            if prev.true_error is None or cur.true_error is None or cur.true_error == 0:
                out.append(None)
            else:
                out.append(prev.true_error / cur.true_error)
        return out


def integrate_composite(
    f: BivariateFn,
    rect: Rectangle,
    m: int,
    n: int,
    mode: ParamMode | str = ParamMode.OPTIMAL,
    cfg: Optional[QuadConfig] = None,
    *,
    theta: Optional[ParamSet] = None,
    cell_supnorm: Optional[Callable[[Rectangle], float]] = None,
    workers: int = 1,
) -> CertifiedValue:
    """Apply the rule on every cell of a uniform m x n grid and sum.

    ``mode`` picks the per-cell parameters. In custom mode ``theta`` is given
    on ``rect`` and mapped affinely onto each cell. The sup-norm is resolved
    once on the whole rectangle unless ``cell_supnorm`` supplies certified
    per-cell values. Values and bounds are reduced with a fixed pairwise tree
    in row-major cell order, so ``workers`` never changes the output bits.
    """
    mode = ParamMode(mode)
    if m < 1 or n < 1:
        raise ValueError(f"grid must be at least 1x1, got {m}x{n}")
    if mode is ParamMode.CUSTOM:
        if theta is None:
            raise ValueError("custom mode requires theta")
        validate_params(rect, theta)
    cfg = cfg or QuadConfig()
    if cell_supnorm is None:
        supnorm, provenance = resolve_supnorm(f, rect)
    else:
        supnorm, provenance = math.nan, Provenance.USER_CERTIFIED

    def one(cell_entry):
        i, j, cell = cell_entry
        try:
            cell_theta = params_for_mode(cell, mode, theta, reference=rect)
            cell_m = supnorm if cell_supnorm is None else float(cell_supnorm(cell))
            bound = error_bound(cell, cell_theta, cell_m).total
            value = cubature_value(f, cell, cell_theta, cfg, bound=bound).value
        except CertcubError as exc:
            exc.cell = (i, j)
            exc.args = (f"cell ({i}, {j}) of {m}x{n}: {exc}",) + exc.args[1:]
            raise
        return value, bound

    cells = rect.cells(m, n)
    if workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, cells))
    else:
        results = [one(c) for c in cells]

    values = np.array([r[0] for r in results])
    bounds = np.array([r[1] for r in results])
    if cell_supnorm is not None:
        supnorm = float(max(cell_supnorm(c) for _, _, c in cells))
    return CertifiedValue(
        value=float(_backend.pairwise_sum(values)),
        bound=float(_backend.pairwise_sum(bounds)),
        supnorm_used=float(supnorm),
        supnorm_provenance=provenance,
        cells=(m, n),
        param_mode=mode,
    )


def convergence_table(
    f: BivariateFn,
    rect: Rectangle,
    levels: Sequence[tuple[int, int]],
    mode: ParamMode | str = ParamMode.OPTIMAL,
    cfg: Optional[QuadConfig] = None,
    oracle_value: Optional[float] = None,
    *,
    theta: Optional[ParamSet] = None,
    workers: int = 1,
) -> CompositeReport:
    """One :class:`CompositeRow` per grid in ``levels``, in input order."""
    if not levels:
        raise ValueError("levels must be nonempty")
    rows = []
    result = None
    for m, n in levels:
        result = integrate_composite(f, rect, m, n, mode, cfg, theta=theta, workers=workers)
        err = None if oracle_value is None else abs(result.value - oracle_value)
        rows.append(CompositeRow(m, n, result.value, result.bound, err))
    return CompositeReport(rows, f.name, result.supnorm_provenance, ParamMode(mode), result.supnorm_used)


def doubling_levels(max_level: int) -> list[tuple[int, int]]:
    """Grids (1,1), (2,2), ..., (2**(max_level-1), 2**(max_level-1))."""
    return [(2**k, 2**k) for k in range(max_level)]
