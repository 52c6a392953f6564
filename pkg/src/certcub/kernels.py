"""Two-branch Peano kernels and their closed-form L1 norms.

On an interval [lo, hi] with midpoint m the kernel is ``t - alpha`` for
t <= m and ``t - beta`` for t > m. The cubature error is the double integral
of kernel(t) * kernel(s) against the mixed partial of f.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ParamSet, Rectangle
from .errors import OutOfDomain, ParamOutOfRange


@dataclass(frozen=True)
class KernelSpec:
    lo: float
    hi: float
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo < self.hi):
            raise ValueError(f"kernel interval must satisfy lo < hi, got [{self.lo}, {self.hi}]")
        mid = self.mid
        if not (self.lo <= self.alpha <= mid <= self.beta <= self.hi):
            raise ParamOutOfRange(
                f"kernel needs lo <= alpha <= mid <= beta <= hi, got "
                f"lo={self.lo}, alpha={self.alpha}, mid={mid}, beta={self.beta}, hi={self.hi}",
                "lo <= alpha <= mid <= beta <= hi",
            )

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def axis_kernels(rect: Rectangle, theta: ParamSet) -> tuple[KernelSpec, KernelSpec]:
    """The t-axis and s-axis kernels for a rectangle and parameter set."""
    return (
        KernelSpec(rect.a, rect.b, theta.alpha1, theta.beta1),
        KernelSpec(rect.c, rect.d, theta.alpha2, theta.beta2),
    )


def kernel_eval(k: KernelSpec, t: float) -> float:
    if not k.lo <= t <= k.hi:
        raise OutOfDomain(f"t={t} outside kernel interval [{k.lo}, {k.hi}]")
    # the midpoint belongs to the left branch
    return t - k.alpha if t <= k.mid else t - k.beta


def kernel_values(k: KernelSpec, t) -> np.ndarray:
    """Vectorized :func:`kernel_eval` without the domain check."""
    t = np.asarray(t, dtype=float)
    return np.where(t <= k.mid, t - k.alpha, t - k.beta)


def kernel_l1(k: KernelSpec) -> float:
    """Closed form of the integral of |kernel| over [lo, hi]."""
    s = k.lo + k.hi
    return ((k.alpha - k.lo) ** 2 + (k.hi - k.beta) ** 2) / 2 + (
        (s - 2 * k.alpha) ** 2 + (s - 2 * k.beta) ** 2
    ) / 8
