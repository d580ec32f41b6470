"""Evaluation metrics: false alarm, misdetection, collision, entropy, key space, cost.

Rates come in two normalisations. ``per_device`` divides the event count by the
number of potential devices ``K`` (summing over the slots of a trial and
averaging over trials); ``conditional`` divides by the number of
authentications the events could have occurred in.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from itertools import product

import numpy as np

from .auth import AuthIndicator
from .errors import OutOfRangeProbability

Z95 = 1.959963984540054
KEY_SPACE_FACTOR = 16
TABLE_KEY_LENGTHS = (9, 11, 13, 15, 17)


@dataclass(frozen=True)
class RatePair:
    per_device: float
    conditional: float
    events: int = 0
    trials_n: int = 0          # authentications the conditional rate is over
    note: str = ""

    @property
    def ci95(self) -> float:
        return ci95(self.conditional, self.trials_n)


def ci95(p: float, n: int) -> float:
    """Half-width of the normal-approximation 95% interval of a proportion."""
    if n <= 0:
        return 0.0
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def _pair(events: int, opportunities: int, K: int, trials: int = 1, note: str = "") -> RatePair:
    per_device = events / (K * trials) if K and trials else 0.0
    cond = events / opportunities if opportunities else 0.0
    return RatePair(per_device, cond, int(events), int(opportunities), note)


def false_alarm_rate(gamma: AuthIndicator, truth) -> RatePair:
    """``truth`` is the ``K x J`` mask of legitimate active (device, slot) pairs."""
    truth = np.asarray(truth, dtype=bool)
    if truth.shape != gamma.gamma.shape:
        raise ValueError(f"truth {truth.shape} vs gamma {gamma.gamma.shape}")
    flagged = int(np.sum(truth & (gamma.gamma == 0)))
    return _pair(flagged, int(truth.sum()), gamma.K)


def misdetection_rate(adversary_verdicts, K: int) -> RatePair:
    """``adversary_verdicts``: one Γ value per adversary transmission."""
    v = np.asarray(list(adversary_verdicts), dtype=np.uint8)
    if v.size == 0:
        return RatePair(0.0, 0.0, 0, 0, "NoAdversary")
    return _pair(int(v.sum()), int(v.size), K)


def collision_mask(in_use, authenticated) -> np.ndarray:
    """``K x J`` mask of authenticated pairs sharing their in-use entry with another one."""
    in_use = np.asarray(in_use)
    authenticated = np.asarray(authenticated, dtype=bool)
    K, J = authenticated.shape
    hit = np.zeros((K, J), dtype=bool)
    for j in range(J):
        ks = np.flatnonzero(authenticated[:, j])
        if ks.size < 2:
            continue
        vals = in_use[ks, j]
        _, inverse, counts = np.unique(vals, return_inverse=True, return_counts=True)
        hit[ks, j] = counts[inverse] > 1
    return hit


def collision_rate(in_use, gamma: AuthIndicator, truth) -> RatePair:
    """Authenticated legitimate devices whose in-use pool entry is shared in the same slot.

    ``in_use`` is ``K x J``: the pool entry each device used in each slot
    (ignored where the device did not transmit).
    """
    auth = np.asarray(truth, dtype=bool) & (gamma.gamma == 1)
    hit = collision_mask(in_use, auth)
    return _pair(int(hit.sum()), int(auth.sum()), gamma.K)


def entropy_bits(p) -> float:
    """Sum of binary entropies (in bits) of the probabilities in ``p``."""
    p = np.atleast_1d(np.asarray(p, dtype=float))
    if np.any(~((p >= 0) & (p <= 1))):
        raise OutOfRangeProbability(f"probabilities must lie in [0, 1]: {p}")
    total = 0.0
    for q in p:
        for r in (q, 1.0 - q):
            if r > 0:
                total -= r * math.log2(r)
    return total


def key_space(R: int, scheme: str) -> int:
    """Brute-force search space for a key of ``R`` bits.

    ``physical`` is ``2**R``; ``proposed`` multiplies by a constant 16, a
    factor fitted to the published table rather than derived.
    """
    if R < 1:
        raise ValueError("key length must be at least 1")
    if scheme == "physical":
        return 2 ** R
    if scheme == "proposed":
        return KEY_SPACE_FACTOR * 2 ** R
    raise ValueError(f"unknown scheme {scheme!r}")


def key_space_row(R: int) -> dict:
    return {
        "R": R,
        "physical": key_space(R, "physical"),
        "proposed": key_space(R, "proposed"),
        "fitted": True,
        "extrapolated": R not in TABLE_KEY_LENGTHS,
    }


def birthday_collision_stats(n_active: int, n_values: int) -> tuple[float, float]:
    """Exhaustive enumeration: mean and variance of the number of colliding devices.

    Every one of the ``n_values ** n_active`` assignments of equiprobable
    values to ``n_active`` devices is visited.
    """
    if n_active == 0:
        return 0.0, 0.0
    total = 0
    total_sq = 0
    count = 0
    for assign in product(range(n_values), repeat=n_active):
        counts = {}
        for a in assign:
            counts[a] = counts.get(a, 0) + 1
        c = sum(v for v in counts.values() if v > 1)
        total += c
        total_sq += c * c
        count += 1
    mean = total / count
    return mean, total_sq / count - mean * mean


# ---------------------------------------------------------------- counters

@dataclass
class Counters:
    """Integer tallies of one or more trials at one SNR point; merging is addition."""

    trials: int = 0
    skipped_trials: int = 0
    legit_auths: int = 0
    legit_flagged: int = 0
    legit_slot_mismatch: int = 0
    adv_auths: int = 0
    adv_passed: int = 0
    adv_slot_flagged: int = 0
    adv_sequence_flagged: int = 0
    authenticated: int = 0
    collided: int = 0
    slot_comparisons: int = 0
    sequence_comparisons: int = 0
    sequence_checks: int = 0
    seed_additions: int = 0
    seed_squarings: int = 0
    refreshes: int = 0
    refresh_alternate: int = 0
    refresh_continued: int = 0
    ap_device_disagreements: int = 0
    symbols_detected: int = 0
    symbol_errors: int = 0
    ls_underdetermined: int = 0
    base_legit_auths: int = 0
    base_legit_flagged: int = 0
    base_adv_auths: int = 0
    base_adv_passed: int = 0
    base_threshold_steps: int = 0
    base_calibrations: int = 0
    base_comparisons: int = 0
    window_legit_auths: dict = field(default_factory=dict)
    window_legit_flagged: dict = field(default_factory=dict)
    window_adv_auths: dict = field(default_factory=dict)
    window_adv_passed: dict = field(default_factory=dict)
    active_hist: dict = field(default_factory=dict)
    position_zeros: dict = field(default_factory=dict)
    position_total: dict = field(default_factory=dict)

    def __add__(self, other: "Counters") -> "Counters":
        out = Counters()
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            if isinstance(a, dict):
                merged = dict(a)
                for k, v in b.items():
                    merged[k] = merged.get(k, 0) + v
                setattr(out, f.name, dict(sorted(merged.items())))
            else:
                setattr(out, f.name, a + b)
        return out

    def bump(self, name: str, key: int, amount: int = 1) -> None:
        d = getattr(self, name)
        d[key] = d.get(key, 0) + amount

    @property
    def comparisons(self) -> int:
        return self.slot_comparisons + self.sequence_comparisons

    @property
    def authentications(self) -> int:
        return self.legit_auths + self.adv_auths

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = {str(k): x for k, x in sorted(v.items())} if isinstance(v, dict) else v
        return out


def merge(counters) -> Counters:
    total = Counters()
    for c in counters:
        total = total + c
    return total


@dataclass(frozen=True)
class CostSummary:
    authentications: int
    proposed_total: int
    proposed_per_auth: float
    baseline_total: int
    baseline_per_auth: float
    baseline_calibrations: int


def cost_report(counters: Counters) -> CostSummary:
    """Totals and per-authentication amortised cost of both schemes."""
    n = counters.authentications
    base_n = counters.base_legit_auths + counters.base_adv_auths
    base_total = counters.base_threshold_steps + counters.base_comparisons
    return CostSummary(
        authentications=n,
        proposed_total=counters.comparisons,
        proposed_per_auth=counters.comparisons / n if n else 0.0,
        baseline_total=base_total,
        baseline_per_auth=base_total / base_n if base_n else 0.0,
        baseline_calibrations=counters.base_calibrations,
    )


@dataclass(frozen=True)
class MetricsReport:
    snr_db: float
    K: int
    rho_fa: RatePair
    rho_md: RatePair
    rho_sc: RatePair
    cost: CostSummary
    counters: Counters
    entropy_bits: float = 0.0
    baseline_fa: RatePair | None = None
    baseline_md: RatePair | None = None

    @property
    def symbol_error_rate(self) -> float:
        c = self.counters
        return c.symbol_errors / c.symbols_detected if c.symbols_detected else 0.0


def build_report(snr_db: float, K: int, counters: Counters, baseline: bool = False) -> MetricsReport:
    t = counters.trials
    fa = _pair(counters.legit_flagged, counters.legit_auths, K, t)
    if counters.adv_auths:
        md = _pair(counters.adv_passed, counters.adv_auths, K, t)
    else:
        md = RatePair(0.0, 0.0, 0, 0, "NoAdversary")
    sc = _pair(counters.collided, counters.authenticated, K, t)
    base_fa = base_md = None
    if baseline:
        base_fa = _pair(counters.base_legit_flagged, counters.base_legit_auths, K, t)
        base_md = _pair(counters.base_adv_passed, counters.base_adv_auths, K, t)
    return MetricsReport(float(snr_db), K, fa, md, sc, cost_report(counters), counters,
                         entropy_bits=schedule_entropy(counters),
                         baseline_fa=base_fa, baseline_md=base_md)


def schedule_entropy(counters: Counters) -> float:
    """Entropy of the access bits, with ``p_r0`` estimated per window position over all schedules."""
    p = [counters.position_zeros.get(r, 0) / n for r, n in sorted(counters.position_total.items()) if n]
    return entropy_bits(p) if p else 0.0
