"""Domain types shared by every module: rectangles, parameters, integrands."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidRectangle, MissingMixedPartial, ParamOutOfRange


class Provenance(str, enum.Enum):
    USER_CERTIFIED = "user-certified"
    ESTIMATED = "estimated"


class ParamMode(str, enum.Enum):
    MIDPOINT = "midpoint"
    TRAPEZOID = "trapezoid"
    OPTIMAL = "optimal"
    CUSTOM = "custom"


@dataclass(frozen=True)
class Rectangle:
    """The closed domain [a, b] x [c, d]; t runs over [a, b], s over [c, d]."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        vals = (self.a, self.b, self.c, self.d)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidRectangle(f"non-finite rectangle limits {vals}")
        if not self.a < self.b:
            raise InvalidRectangle(f"need a < b, got a={self.a}, b={self.b}")
        if not self.c < self.d:
            raise InvalidRectangle(f"need c < d, got c={self.c}, d={self.d}")

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def height(self) -> float:
        return self.d - self.c

    @property
    def mid_t(self) -> float:
        return 0.5 * (self.a + self.b)

    @property
    def mid_s(self) -> float:
        return 0.5 * (self.c + self.d)

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, t: float, s: float) -> bool:
        return self.a <= t <= self.b and self.c <= s <= self.d

    def cells(self, m: int, n: int) -> list[tuple[int, int, "Rectangle"]]:
        """Uniform m x n partition in row-major order (t index outer).

        Interior edges are computed as ``a + (b - a) * i / m`` and the last
        edge is pinned to ``b`` so the cells tile the rectangle exactly.
        """
        if m < 1 or n < 1:
            raise ValueError(f"grid must be at least 1x1, got {m}x{n}")
        te = [self.a + self.width * i / m for i in range(m)] + [self.b]
        se = [self.c + self.height * j / n for j in range(n)] + [self.d]
        return [
            (i, j, Rectangle(te[i], te[i + 1], se[j], se[j + 1]))
            for i in range(m)
            for j in range(n)
        ]


@dataclass(frozen=True)
class ParamSet:
    """The four free parameters (alpha1, beta1, alpha2, beta2)."""

    alpha1: float
    beta1: float
    alpha2: float
    beta2: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.alpha1, self.beta1, self.alpha2, self.beta2)

    def mapped(self, src: Rectangle, dst: Rectangle) -> "ParamSet":
        """Carry the parameters affinely from ``src`` onto ``dst``."""
        sx = dst.width / src.width
        sy = dst.height / src.height
        return ParamSet(
            dst.a + (self.alpha1 - src.a) * sx,
            dst.a + (self.beta1 - src.a) * sx,
            dst.c + (self.alpha2 - src.c) * sy,
            dst.c + (self.beta2 - src.c) * sy,
        )


def _check_axis(lo, hi, alpha, beta, names):
    mid = 0.5 * (lo + hi)
    an, bn, lon, hin = names
    checks = [
        (lo <= alpha, f"{lon} <= {an}"),
        (alpha <= mid, f"{an} <= ({lon}+{hin})/2"),
        (mid <= beta, f"({lon}+{hin})/2 <= {bn}"),
        (beta <= hi, f"{bn} <= {hin}"),
    ]
    for ok, constraint in checks:
        if not ok:
            raise ParamOutOfRange(
                f"parameter constraint violated: {constraint} "
                f"({an}={alpha}, {bn}={beta}, interval=[{lo}, {hi}])",
                constraint,
            )


def validate_params(rect: Rectangle, theta: ParamSet) -> ParamSet:
    """Return ``theta`` unchanged if it lies in the admissible region of ``rect``.

    Admissible means a <= alpha1 <= (a+b)/2 <= beta1 <= b and the same for
    (alpha2, beta2) on [c, d]. Equality on every face is allowed.
    """
    if not all(math.isfinite(v) for v in theta.as_tuple()):
        raise ParamOutOfRange(f"non-finite parameters {theta.as_tuple()}", "finite")
    _check_axis(rect.a, rect.b, theta.alpha1, theta.beta1, ("alpha1", "beta1", "a", "b"))
    _check_axis(rect.c, rect.d, theta.alpha2, theta.beta2, ("alpha2", "beta2", "c", "d"))
    return theta


@dataclass(frozen=True)
class QuadConfig:
    gauss_order: int = 16
    panels: int = 4

    def __post_init__(self):
        if self.gauss_order < 1:
            raise ValueError(f"gauss_order must be >= 1, got {self.gauss_order}")
        if self.panels < 1:
            raise ValueError(f"panels must be >= 1, got {self.panels}")


@dataclass(frozen=True)
class BivariateFn:
    """An integrand f(t, s) with optional mixed partial and sup-norm.

    Parameters
    ----------
    eval : callable
        ``eval(t, s) -> float``. When ``vectorized`` is true it must also accept
        numpy arrays and broadcast like a ufunc.
    mixed_partial : callable, optional
        Evaluator of d^2 f / dt ds with the same calling convention.
    supnorm : float, optional
        Upper bound on |d^2 f / dt ds| over the rectangle of interest.
    supnorm_provenance : Provenance
        ``USER_CERTIFIED`` means the caller vouches for ``supnorm``.
    """

    eval: Callable
    mixed_partial: Optional[Callable] = None
    supnorm: Optional[float] = None
    supnorm_provenance: Provenance = Provenance.USER_CERTIFIED
    vectorized: bool = False
    name: str = "f"

    def __post_init__(self):
        if self.supnorm is not None and not (self.supnorm >= 0 and math.isfinite(self.supnorm)):
            raise ValueError(f"supnorm must be finite and nonnegative, got {self.supnorm}")

    def __call__(self, t: float, s: float) -> float:
        return float(self.eval(t, s))

    def at(self, t, s) -> np.ndarray:
        """Evaluate on broadcast arrays of t and s."""
        return _apply(self.eval, self.vectorized, t, s)

    def mixed_at(self, t, s) -> np.ndarray:
        if self.mixed_partial is None:
            raise MissingMixedPartial(f"{self.name}: no mixed partial evaluator supplied")
        return _apply(self.mixed_partial, self.vectorized, t, s)

    @property
    def has_certified_supnorm(self) -> bool:
        return self.supnorm is not None and self.supnorm_provenance is Provenance.USER_CERTIFIED

    def with_supnorm(self, supnorm: float, provenance=Provenance.USER_CERTIFIED) -> "BivariateFn":
        return BivariateFn(
            self.eval, self.mixed_partial, supnorm, Provenance(provenance), self.vectorized, self.name
        )


def _apply(fn, vectorized, t, s):
    t, s = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(s, dtype=float))
    if vectorized:
        out = np.asarray(fn(t, s), dtype=float)
        if out.shape != t.shape:
            out = np.broadcast_to(out, t.shape).copy()
        return out
    flat = np.fromiter(
        (fn(float(x), float(y)) for x, y in zip(t.ravel(), s.ravel())),
        dtype=float,
        count=t.size,
    )
    return flat.reshape(t.shape)


@dataclass(frozen=True)
class CertifiedValue:
    value: float
    bound: float
    supnorm_used: float
    supnorm_provenance: Provenance
    cells: tuple[int, int]
    param_mode: ParamMode

    def __post_init__(self):
        if not self.bound >= 0:
            raise ValueError(f"bound must be nonnegative, got {self.bound}")

    @property
    def certified(self) -> bool:
        return self.supnorm_provenance is Provenance.USER_CERTIFIED

    @property
    def bound_label(self) -> str:
        return "certified" if self.certified else "estimate"
