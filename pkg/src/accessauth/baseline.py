"""Channel-correlation binary hypothesis test used as the comparison baseline.

A transmission is accepted when the normalised correlation between the
previous and current channel estimates of the claimed identity reaches a
threshold found by exhaustive grid search.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientCalibration, ZeroVector
from .phy import complex_normal, path_gain

MIN_CALIBRATION = 100
DEFAULT_GRID = 1000


@dataclass
class BaselineCost:
    threshold_steps: int = 0   # grid evaluations x statistics compared
    calibrations: int = 0
    comparisons: int = 0       # statistic-vs-threshold decisions

    @property
    def total(self) -> int:
        return self.threshold_steps + self.comparisons

    def __add__(self, other: "BaselineCost") -> "BaselineCost":
        return BaselineCost(self.threshold_steps + other.threshold_steps,
                            self.calibrations + other.calibrations,
                            self.comparisons + other.comparisons)


def cir_statistic(cir_prev, cir_now) -> float:
    a = np.asarray(cir_prev, dtype=np.complex128)
    b = np.asarray(cir_now, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shapes {a.shape} and {b.shape} differ")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("correlation of a zero vector is undefined")
    return float(min(abs(np.vdot(a, b)) / (na * nb), 1.0))


def cir_statistics(prev: np.ndarray, now: np.ndarray) -> np.ndarray:
    """Row-wise :func:`cir_statistic` for ``(M, N)`` arrays."""
    prev = np.asarray(prev, dtype=np.complex128)
    now = np.asarray(now, dtype=np.complex128)
    na = np.linalg.norm(prev, axis=1)
    nb = np.linalg.norm(now, axis=1)
    if np.any(na == 0) or np.any(nb == 0):
        raise ZeroVector("correlation of a zero vector is undefined")
    return np.minimum(np.abs(np.sum(prev.conj() * now, axis=1)) / (na * nb), 1.0)


def bht_authenticate(cir_prev, cir_now, threshold: float) -> bool:
    """True (legitimate) when the correlation statistic reaches ``threshold``."""
    return cir_statistic(cir_prev, cir_now) >= threshold


def calibration_errors(h0, h1, grid) -> np.ndarray:
    """Empirical false alarm + misdetection at every threshold of ``grid``."""
    h0 = np.sort(np.asarray(h0, dtype=float))
    h1 = np.sort(np.asarray(h1, dtype=float))
    fa = np.searchsorted(h0, grid, side="left") / h0.size        # legit below threshold
    md = (h1.size - np.searchsorted(h1, grid, side="left")) / h1.size if h1.size else np.zeros(len(grid))
    return fa + md


def calibrate_threshold(h0_stats, h1_stats=(), grid_points: int = DEFAULT_GRID,
                        cost: BaselineCost | None = None) -> float:
    """Threshold minimising false alarm + misdetection over a uniform grid.

    The grid spans the range of all calibration statistics. Ties are broken
    by the median of the minimising grid points.
    """
    h0 = np.asarray(h0_stats, dtype=float).ravel()
    h1 = np.asarray(h1_stats, dtype=float).ravel()
    if h0.size < MIN_CALIBRATION:
        raise InsufficientCalibration(f"need at least {MIN_CALIBRATION} H0 statistics, got {h0.size}")
    both = np.concatenate([h0, h1])
    lo, hi = float(both.min()), float(both.max())
    if cost is not None:
        cost.calibrations += 1
        cost.threshold_steps += grid_points * both.size
    if lo == hi:
        return lo
    grid = np.linspace(lo, hi, grid_points)
    err = calibration_errors(h0, h1, grid)
    best = np.flatnonzero(err == err.min())
    return float(grid[best[len(best) // 2]])


def draw_calibration_statistics(rng: np.random.Generator, n: int, N: int, zeta: float, sigma2: float,
                                est_noise_var: float, distance_range=(0.05, 1.0), ref_energy: float = 1.0):
    """H0 and H1 correlation statistics from the channel law.

    H0 pairs are consecutive noisy estimates of one AR(1) link; H1 pairs
    replace the current estimate by one from an independent link.
    ``est_noise_var`` is the per-entry estimation noise, in units where
    ``ref_energy`` is the reference received energy.
    """
    lo, hi = distance_range
    amp_prev = np.sqrt(path_gain(rng.uniform(lo, hi, n)) / ref_energy)[:, None]
    amp_other = np.sqrt(path_gain(rng.uniform(lo, hi, n)) / ref_energy)[:, None]
    f_prev = complex_normal(rng, (n, N), sigma2)
    f_now = zeta * f_prev + np.sqrt((1 - zeta * zeta) * sigma2) * complex_normal(rng, (n, N))
    f_other = complex_normal(rng, (n, N), sigma2)
    noise = np.sqrt(est_noise_var)
    e_prev = amp_prev * f_prev + noise * complex_normal(rng, (n, N))
    e_now = amp_prev * f_now + noise * complex_normal(rng, (n, N))
    e_other = amp_other * f_other + noise * complex_normal(rng, (n, N))
    return cir_statistics(e_prev, e_now), cir_statistics(e_prev, e_other)
