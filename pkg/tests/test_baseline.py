import numpy as np
import pytest
from hypothesis import given, strategies as st

from accessauth.baseline import (
    BaselineCost, bht_authenticate, calibrate_threshold, calibration_errors, cir_statistic, cir_statistics,
    draw_calibration_statistics,
)
from accessauth.errors import InsufficientCalibration, ZeroVector
from accessauth.phy import ar1_step, complex_normal


def test_self_correlation(rng):
    h = complex_normal(rng, 16)
    assert cir_statistic(h, h) == pytest.approx(1.0)
    assert bht_authenticate(h, h, 1.0)


def test_orthogonal():
    a, b = np.array([1, 0, 0j]), np.array([0, 1j, 0])
    assert cir_statistic(a, b) == 0.0
    assert not bht_authenticate(a, b, 1e-6)


def test_zero_vector():
    with pytest.raises(ZeroVector):
        cir_statistic(np.zeros(3), np.ones(3))
    with pytest.raises(ZeroVector):
        cir_statistics(np.zeros((2, 3)), np.ones((2, 3)))
    with pytest.raises(ValueError):
        cir_statistic(np.ones(3), np.ones(4))


@given(st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3, allow_nan=False, allow_infinity=False))
def test_scale_invariance(c):
    r = np.random.default_rng(4)
    a, b = complex_normal(r, 12), complex_normal(r, 12)
    assert abs(cir_statistic(c * a, b) - cir_statistic(a, b)) < 1e-12
    assert abs(cir_statistic(a, c * b) - cir_statistic(a, b)) < 1e-12


def test_vectorised_matches_scalar(rng):
    a, b = complex_normal(rng, (20, 8)), complex_normal(rng, (20, 8))
    assert np.allclose(cir_statistics(a, b), [cir_statistic(x, y) for x, y in zip(a, b)])


def test_separated_classes():
    h0 = np.linspace(0.8, 1.0, 150)
    h1 = np.linspace(0.0, 0.3, 150)
    cost = BaselineCost()
    t = calibrate_threshold(h0, h1, cost=cost)
    assert 0.3 < t <= 0.8
    assert calibration_errors(h0, h1, [t])[0] == 0
    assert cost.calibrations == 1 and cost.threshold_steps == 1000 * 300


def test_identical_distributions():
    r = np.random.default_rng(8)
    h0, h1 = r.random(500), r.random(500)
    t = calibrate_threshold(h0, h1)
    err = calibration_errors(h0, h1, [t])[0]
    # oracle: total error at every candidate threshold (all observed values)
    cands = np.concatenate([h0, h1, [np.inf]])
    oracle = min((np.sum(h0 < c) / h0.size) + (np.sum(h1 >= c) / h1.size) for c in cands)
    assert abs(err - 1.0) < 0.1
    assert err - oracle <= 0.05


def test_degenerate_single_point():
    assert calibrate_threshold(np.full(100, 0.7)) == 0.7


def test_insufficient_calibration():
    with pytest.raises(InsufficientCalibration):
        calibrate_threshold(np.ones(99))


def test_ar1_mean_statistic():
    """Mean correlation of consecutive zeta=0.9 channel vectors tracks the lag-1 correlation."""
    r = np.random.default_rng(12)
    N, steps = 100, 2000
    h = complex_normal(r, N)
    series = [h]
    for _ in range(steps):
        h = ar1_step(h, 0.9, 1.0, complex_normal(r, N))
        series.append(h)
    series = np.array(series)
    a, b = series[:-1].ravel(), series[1:].ravel()
    oracle = float(np.real(np.vdot(a, b)) / np.sum(np.abs(a) ** 2))
    stats = cir_statistics(series[:-1], series[1:])
    assert abs(stats.mean() - oracle) < 0.05


def test_calibration_statistics_shapes(rng):
    h0, h1 = draw_calibration_statistics(rng, 200, 32, 0.9, 1.0, 0.01)
    assert h0.shape == h1.shape == (200,)
    assert h0.mean() > h1.mean()
    assert np.all((0 <= h0) & (h0 <= 1))


def test_cost_add():
    c = BaselineCost(10, 1, 5) + BaselineCost(1, 1, 1)
    assert c.total == 17 and c.calibrations == 2
