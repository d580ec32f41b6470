import numpy as np
import pytest

from accessauth.auth import (
    AuthCost, AuthIndicator, Reason, authenticate_one, authenticate_slot, gate_data, window_position,
    write_verdicts_csv,
)
from accessauth.errors import WindowExhausted
from accessauth.phy import complex_normal


@pytest.fixture
def setup(rng):
    K, N, L = 4, 6, 4
    expected = complex_normal(rng, (N, K))
    sched = np.array([[1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 0, 1], [1, 1, 1, 1]])
    return K, N, L, expected, sched


def test_legitimate_passes(setup):
    K, N, L, expected, sched = setup
    cost = AuthCost()
    g, r = authenticate_slot(expected.copy(), sched, expected, [1, 1, 0, 1], 0, cost=cost)
    assert list(g) == [1, 1, 0, 1]
    assert [Reason(x) for x in r] == [Reason.PASS, Reason.PASS, Reason.NOT_CHECKED, Reason.PASS]
    assert cost.slot_comparisons == 3 and cost.sequence_comparisons == 3 * N


def test_unscheduled_slot_short_circuits(setup):
    K, N, L, expected, sched = setup
    cost = AuthCost()
    assert authenticate_one(expected[:, 2], sched[2], expected[:, 2], 0, cost=cost) is Reason.SLOT_MISMATCH
    assert cost.sequence_comparisons == 0 and cost.sequence_checks == 0 and cost.slot_comparisons == 1


def test_wrong_sequence(setup, rng):
    K, N, L, expected, sched = setup
    guess = complex_normal(rng, N)
    assert authenticate_one(guess, sched[0], expected[:, 0], 0) is Reason.SEQUENCE_MISMATCH


def test_erasures_and_tolerance(setup):
    K, N, L, expected, sched = setup
    col = expected[:, 3].copy()
    col[:2] = np.nan
    assert authenticate_one(col, sched[3], expected[:, 3], 1) is Reason.PASS
    col[:4] = np.nan
    assert authenticate_one(col, sched[3], expected[:, 3], 1) is Reason.SEQUENCE_MISMATCH
    near = expected[:, 3] * (1 + 1e-8)
    assert authenticate_one(near, sched[3], expected[:, 3], 1) is Reason.PASS
    assert authenticate_one(near, sched[3], expected[:, 3], 1, rtol=1e-10) is Reason.SEQUENCE_MISMATCH


def test_window_exhausted(setup):
    K, N, L, expected, sched = setup
    with pytest.raises(WindowExhausted):
        authenticate_slot(expected, sched, expected, [1] * K, L)


def test_window_position():
    assert [window_position(j, 4) for j in range(9)] == [0, 1, 2, 3, 0, 1, 2, 3, 0]


def test_always_on_flag_count(setup, rng):
    """An adversary transmitting every slot is slot-flagged once per zero bit of the schedule."""
    K, N, L, expected, sched = setup
    for k in range(K):
        flags = sum(authenticate_one(complex_normal(rng, N), sched[k], expected[:, k], pos) is Reason.SLOT_MISMATCH
                    for pos in range(L))
        assert flags == L - sched[k].sum()


def test_indicator_invariant():
    ind = AuthIndicator(3, 2)
    ind.set_column(0, [1, 0, 0], [Reason.PASS, Reason.SLOT_MISMATCH, Reason.NOT_CHECKED])
    assert ind.is_consistent()
    with pytest.raises(ValueError):
        ind.set_column(1, [1, 0, 0], [Reason.SEQUENCE_MISMATCH, 0, 0])
    rows = list(ind.rows(trial=5, checked_only=True))
    assert rows == [(5, 1, 1, 1, "Pass"), (5, 1, 2, 0, "SlotMismatch")]


def test_verdicts_csv(tmp_path):
    ind = AuthIndicator(2, 1)
    ind.set_column(0, [0, 1], [Reason.SEQUENCE_MISMATCH, Reason.PASS])
    path = tmp_path / "v.csv"
    write_verdicts_csv(path, [(0, ind)])
    assert path.read_text() == "trial,slot,device,gamma,reason\n0,1,1,0,SequenceMismatch\n0,1,2,1,Pass\n"


def test_gate(rng):
    x = complex_normal(rng, 5)
    assert np.array_equal(gate_data(x, np.ones(5)), x)
    assert not gate_data(x, np.zeros(5)).any()
    g = np.array([1, 0, 1, 0, 0])
    out = gate_data(x, g)
    assert np.array_equal(np.flatnonzero(out), [0, 2]) and np.array_equal(out[[0, 2]], x[[0, 2]])
    with pytest.raises(ValueError):
        gate_data(x, g[:3])


def test_cost_addition():
    assert (AuthCost(1, 2, 3) + AuthCost(4, 5, 6)).comparisons == 12
