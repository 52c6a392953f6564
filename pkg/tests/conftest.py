import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import pytest

from certcub import BivariateFn, ParamSet, Rectangle


@dataclass(frozen=True)
class Case:
    """Test integrand with a hand-derived mixed partial and sup bound."""

    name: str
    f: Callable
    fts: Callable
    sup: Callable  # Rectangle -> valid upper bound of |fts| on it

    def fn(self, certified=True, rect=None):
        supnorm = self.sup(rect) if (certified and rect is not None) else None
        return BivariateFn(self.f, self.fts, supnorm, vectorized=True, name=self.name)


def _amax(lo, hi):
    return max(abs(lo), abs(hi))


def _prod_max(r):
    return _amax(r.a, r.b) * _amax(r.c, r.d)


SMOOTH = [
    Case("t*s", lambda t, s: t * s, lambda t, s: np.ones_like(t * s), lambda r: 1.0),
    Case("t^2 s^2", lambda t, s: t**2 * s**2, lambda t, s: 4 * t * s, lambda r: 4 * _prod_max(r)),
    Case(
        "sin(pi t) e^s",
        lambda t, s: np.sin(np.pi * t) * np.exp(s),
        lambda t, s: np.pi * np.cos(np.pi * t) * np.exp(s),
        lambda r: math.pi * math.exp(r.d),
    ),
    Case(
        "exp(t+s)",
        lambda t, s: np.exp(t + s),
        lambda t, s: np.exp(t + s),
        lambda r: math.exp(r.b + r.d),
    ),
    Case(
        "exp(t s)",
        lambda t, s: np.exp(t * s),
        lambda t, s: (1 + t * s) * np.exp(t * s),
        lambda r: (1 + _prod_max(r)) * math.exp(_prod_max(r)),
    ),
    Case("sin t cos s", lambda t, s: np.sin(t) * np.cos(s), lambda t, s: -np.cos(t) * np.sin(s), lambda r: 1.0),
    Case(
        "t^3 s + s^2 t",
        lambda t, s: t**3 * s + s**2 * t,
        lambda t, s: 3 * t**2 + 2 * s,
        lambda r: 3 * _amax(r.a, r.b) ** 2 + 2 * _amax(r.c, r.d),
    ),
    Case(
        "log(3+t+s)",
        lambda t, s: np.log(3 + t + s),
        lambda t, s: -1 / (3 + t + s) ** 2,
        lambda r: 1 / (3 + r.a + r.c) ** 2,
    ),
    Case(
        "1/(1+t^2+s^2)",
        lambda t, s: 1 / (1 + t**2 + s**2),
        lambda t, s: 8 * t * s / (1 + t**2 + s**2) ** 3,
        # 8|ts|/(1+q)^3 <= 4q/(1+q)^3 <= 16/27 with q = t^2 + s^2
        lambda r: 16 / 27,
    ),
    Case(
        "cos(t s) + t",
        lambda t, s: np.cos(t * s) + t,
        lambda t, s: -np.sin(t * s) - t * s * np.cos(t * s),
        lambda r: 1 + _prod_max(r),
    ),
]

ADDITIVE = [
    ("exp(t)+sin(s)", lambda t, s: np.exp(t) + np.sin(s)),
    ("t^5+s^3", lambda t, s: t**5 + s**3),
    ("log(2+t)+cos(3s)", lambda t, s: np.log(2 + t) + np.cos(3 * s)),
    ("1/(1+t^2)+s", lambda t, s: 1 / (1 + t**2) + s),
    ("sqrt(2+t)-s^2", lambda t, s: np.sqrt(2 + t) - s**2),
    ("t", lambda t, s: t + 0 * s),
    ("7", lambda t, s: 7.0 + 0 * t * s),
    ("sin(5t)+exp(-s)", lambda t, s: np.sin(5 * t) + np.exp(-s)),
    ("t^2 - 3s + 1", lambda t, s: t**2 - 3 * s + 1),
    ("cos(t)^2 + s^4", lambda t, s: np.cos(t) ** 2 + s**4),
]

RECTS = [Rectangle(0, 1, 0, 1), Rectangle(0, 2, 0, 1), Rectangle(-1, 1, -1, 1)]


def random_theta(rect: Rectangle, rng: np.random.Generator) -> ParamSet:
    u = rng.random(4)
    return ParamSet(
        rect.a + u[0] * (rect.mid_t - rect.a),
        rect.mid_t + u[1] * (rect.b - rect.mid_t),
        rect.c + u[2] * (rect.mid_s - rect.c),
        rect.mid_s + u[3] * (rect.d - rect.mid_s),
    )


@pytest.fixture
def unit():
    return Rectangle(0, 1, 0, 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def additive_fn(f, name="additive"):
    # mixed partial identically zero, so a zero sup-norm is a valid certificate
    return BivariateFn(f, lambda t, s: np.zeros_like(t * s), 0.0, vectorized=True, name=name)


# -- acceptance reporting ----------------------------------------------------

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
