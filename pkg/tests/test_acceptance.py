"""Acceptance criteria at their stated scales and tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in the
terminal summary (see ``conftest.py``).
"""
import pytest

from accessauth import verify
from accessauth.config import SimConfig

pytestmark = pytest.mark.slow

LINES = {}


@pytest.fixture(scope="module")
def default_campaign():
    return verify._campaign(SimConfig(trials=1000, baseline_enabled=True))


def record(result):
    line = result.line()
    LINES[result.number] = line
    print(line)
    assert result.passed, line


def test_criterion_01_zero_false_alarms(default_campaign):
    record(verify.check_zero_false_alarms(1000, 1000, shared=default_campaign))


def test_criterion_02_misdetection_vs_enumeration():
    record(verify.check_random_access_oracle(300))


def test_criterion_03_snr_trend(default_campaign):
    record(verify.check_snr_trend(1000, shared=default_campaign))


def test_criterion_04_collision_trend():
    record(verify.check_collision_trend(100, 2000))


def test_criterion_05_schedule_length_trend():
    record(verify.check_schedule_length_trend(100))


def test_criterion_06_seed_agreement():
    record(verify.check_seed_agreement(10_000))


def test_criterion_07_lfsr():
    record(verify.check_lfsr(10))


def test_criterion_08_numerics():
    record(verify.check_numerics(100_000))


def test_criterion_09_key_space():
    record(verify.check_key_space())


def test_criterion_10_lightweight():
    record(verify.check_lightweight())


def test_criterion_11_reproducibility():
    record(verify.check_reproducibility(40))
