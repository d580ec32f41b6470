"""Two-step authentication: access time slot check, then spreading sequence check."""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._backend import kernels
from .errors import WindowExhausted

DEFAULT_RTOL = 1e-6
MAX_ERASED_FRACTION = 0.5


class Reason(enum.IntEnum):
    NOT_CHECKED = 0
    PASS = 1
    SLOT_MISMATCH = 2
    SEQUENCE_MISMATCH = 3

    @property
    def label(self) -> str:
        return {0: "NotChecked", 1: "Pass", 2: "SlotMismatch", 3: "SequenceMismatch"}[int(self)]


@dataclass
class AuthCost:
    slot_comparisons: int = 0
    sequence_comparisons: int = 0   # element-wise entry comparisons
    sequence_checks: int = 0

    @property
    def comparisons(self) -> int:
        return self.slot_comparisons + self.sequence_comparisons

    def __add__(self, other: "AuthCost") -> "AuthCost":
        return AuthCost(self.slot_comparisons + other.slot_comparisons,
                        self.sequence_comparisons + other.sequence_comparisons,
                        self.sequence_checks + other.sequence_checks)


@dataclass
class AuthIndicator:
    """``K x J`` verdicts with the reason behind each entry."""

    K: int
    J: int
    gamma: np.ndarray = field(init=False)
    reasons: np.ndarray = field(init=False)

    def __post_init__(self):
        self.gamma = np.zeros((self.K, self.J), dtype=np.uint8)
        self.reasons = np.full((self.K, self.J), int(Reason.NOT_CHECKED), dtype=np.int8)

    def set_column(self, j: int, gamma_col, reasons_col) -> None:
        reasons_col = np.asarray(reasons_col, dtype=np.int8)
        gamma_col = np.asarray(gamma_col, dtype=np.uint8)
        if not np.array_equal(gamma_col == 1, reasons_col == Reason.PASS):
            raise ValueError("gamma must be 1 exactly where the reason is Pass")
        self.gamma[:, j] = gamma_col
        self.reasons[:, j] = reasons_col

    def is_consistent(self) -> bool:
        return bool(np.array_equal(self.gamma == 1, self.reasons == Reason.PASS))

    def rows(self, trial: int = 0, checked_only: bool = False):
        """``(trial, slot, device, gamma, reason)`` rows; slots and devices 1-based."""
        for j in range(self.J):
            for k in range(self.K):
                r = Reason(int(self.reasons[k, j]))
                if checked_only and r is Reason.NOT_CHECKED:
                    continue
                yield trial, j + 1, k + 1, int(self.gamma[k, j]), r.label


VERDICT_COLUMNS = ("trial", "slot", "device", "gamma", "reason")


def write_verdicts_csv(path, indicators, checked_only: bool = False) -> None:
    """Write verdicts of ``indicators`` (iterable of ``(trial, AuthIndicator)``)."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VERDICT_COLUMNS)
        for trial, ind in indicators:
            w.writerows(ind.rows(trial, checked_only))


def window_position(j: int, L: int) -> int:
    """0-based schedule position of 0-based slot ``j``: ``j mod L``."""
    return j % L


def sequence_matches(extracted_col, expected_col, rtol: float = DEFAULT_RTOL,
                     max_erased: float = MAX_ERASED_FRACTION) -> bool:
    return bool(kernels.match_sequence(np.ascontiguousarray(extracted_col, dtype=np.complex128),
                                       np.ascontiguousarray(expected_col, dtype=np.complex128),
                                       float(rtol), float(max_erased)))


def authenticate_slot(extracted, schedule_bits, expected_sequences, transmit_evidence, position: int,
                      rtol: float = DEFAULT_RTOL, cost: AuthCost | None = None):
    """Verdicts for one slot.

    Parameters
    ----------
    extracted : ``N x K`` codebook extracted by Hadamard division (NaN = erasure).
    schedule_bits : ``K x L`` expected access bits held by the AP.
    expected_sequences : ``N x K`` sequence the AP expects from each device at ``position``.
    transmit_evidence : length-``K`` booleans, which identities transmitted.
    position : 0-based place in the current schedule window.

    Returns ``(gamma_col, reasons_col)``. A transmission in a slot whose
    expected bit is 0 fails with ``SLOT_MISMATCH`` without looking at the
    sequence; silent devices are ``NOT_CHECKED``.
    """
    schedule_bits = np.asarray(schedule_bits)
    K, L = schedule_bits.shape
    if not 0 <= position < L:
        raise WindowExhausted(f"position {position} outside a window of {L}; refresh first")
    evidence = np.asarray(transmit_evidence, dtype=bool)
    gamma = np.zeros(K, dtype=np.uint8)
    reasons = np.full(K, int(Reason.NOT_CHECKED), dtype=np.int8)
    N = expected_sequences.shape[0]
    for k in np.flatnonzero(evidence):
        if cost is not None:
            cost.slot_comparisons += 1
        if schedule_bits[k, position] != 1:
            reasons[k] = Reason.SLOT_MISMATCH
            continue
        if cost is not None:
            cost.sequence_checks += 1
            cost.sequence_comparisons += N
        if sequence_matches(extracted[:, k], expected_sequences[:, k], rtol):
            gamma[k] = 1
            reasons[k] = Reason.PASS
        else:
            reasons[k] = Reason.SEQUENCE_MISMATCH
    return gamma, reasons


def authenticate_one(extracted_col, schedule_row, expected_col, position: int,
                     rtol: float = DEFAULT_RTOL, cost: AuthCost | None = None) -> Reason:
    """Single-transmission form of :func:`authenticate_slot`."""
    _, reasons = authenticate_slot(np.asarray(extracted_col)[:, None], np.asarray(schedule_row)[None, :],
                                   np.asarray(expected_col)[:, None], [True], position, rtol, cost)
    return Reason(int(reasons[0]))


def gate_data(x_hat, gamma_col) -> np.ndarray:
    x_hat = np.asarray(x_hat)
    gamma_col = np.asarray(gamma_col)
    if x_hat.shape != gamma_col.shape:
        raise ValueError(f"x_hat {x_hat.shape} and gamma {gamma_col.shape} differ")
    return x_hat * gamma_col
