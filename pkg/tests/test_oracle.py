import math

import numpy as np
import pytest

from certcub import BivariateFn, ParamSet
from certcub.errors import MissingMixedPartial, OracleNonConvergent
from certcub.oracle import MAX_LEVELS, reference_integral, reference_kernel_integral
from certcub.rule import cubature_value

from conftest import RECTS, SMOOTH, random_theta


def vec(f, fts=None):
    return BivariateFn(f, fts, vectorized=True)


@pytest.mark.parametrize(
    "f, expected",
    [
        (lambda t, s: t * s, 0.25),
        (lambda t, s: t**2 * s**2, 1 / 9),
        (lambda t, s: np.sin(np.pi * t) * np.sin(np.pi * s), 4 / math.pi**2),
    ],
)
def test_reference_examples(unit, f, expected):
    res = reference_integral(vec(f), unit)
    assert abs(res.value - expected) < 1e-14
    assert res.est_error < 1e-12 and 2 <= res.levels_used <= MAX_LEVELS


def test_kernel_integral_zero_mixed(unit, rng):
    f = vec(lambda t, s: np.exp(t) + s, lambda t, s: np.zeros_like(t * s))
    assert reference_kernel_integral(f, unit, random_theta(unit, rng)).value == 0.0


def test_kernel_integral_product_corner_choice(unit):
    f = vec(lambda t, s: t * s, lambda t, s: np.ones_like(t * s))
    assert abs(reference_kernel_integral(f, unit, ParamSet(0, 1, 0, 1)).value) < 1e-12


def test_kernel_integral_t2s2(unit):
    f = vec(lambda t, s: t**2 * s**2, lambda t, s: 4 * t * s)
    res = reference_kernel_integral(f, unit, ParamSet(0, 1, 0, 1))
    assert res.value == pytest.approx(1 / 144, abs=1e-14)
    assert res.value == pytest.approx(reference_integral(f, unit).value - 5 / 48, abs=1e-14)


def test_self_consistency():
    for case in SMOOTH:
        for rect in RECTS:
            f = case.fn()
            prev = reference_integral(f, rect, 1e-6)
            for tol in (5e-7, 1e-8, 5e-9, 1e-12):
                cur = reference_integral(f, rect, tol)
                assert abs(cur.value - prev.value) <= prev.est_error, case.name
                prev = cur


def test_identity_closure(rng):
    tol = 1e-12
    for case in SMOOTH:
        for rect in RECTS:
            f = case.fn()
            theta = random_theta(rect, rng)
            lhs = reference_kernel_integral(f, rect, theta, tol).value
            rhs = reference_integral(f, rect, tol).value - cubature_value(f, rect, theta).value
            assert abs(lhs - rhs) <= max(2 * tol, 1e-10), case.name


def test_split_converges_faster(unit):
    from certcub.kernels import axis_kernels, kernel_values
    from certcub.oracle import _tensor_gauss

    f = SMOOTH[2].fn()
    theta = ParamSet(0.1, 0.7, 0.3, 0.6)
    fast = reference_kernel_integral(f, unit, theta, 1e-12)
    slow = reference_kernel_integral(f, unit, theta, 1e-12, split=False)
    assert fast.levels_used < slow.levels_used
    assert abs(fast.value - slow.value) < 1e-14
    # Doubling puts a panel edge on each midline from level 2 on, which is
    # why the unsplit run only loses a level. On a single panel the jump
    # dominates the error.
    kt, ks = axis_kernels(unit, theta)
    whole = _tensor_gauss(
        lambda t, s: kernel_values(kt, t) * kernel_values(ks, s) * f.mixed_at(t, s), unit, 1
    )
    assert abs(whole - fast.value) > 1e-4


def test_non_convergence_is_loud(unit):
    kink = vec(lambda t, s: np.abs(t - 1 / 3) * s)
    with pytest.raises(OracleNonConvergent):
        reference_integral(kink, unit, 1e-13)


def test_tolerance_floor(unit):
    with pytest.raises(ValueError):
        reference_integral(vec(lambda t, s: t), unit, 1e-15)


def test_kernel_integral_needs_mixed(unit):
    with pytest.raises(MissingMixedPartial):
        reference_kernel_integral(vec(lambda t, s: t), unit, ParamSet(0, 1, 0, 1))
