import numpy as np
import pytest
from hypothesis import given, strategies as st

from accessauth.errors import AllZeroSeed, EmptySeed, InvalidPolynomial, NonPrimitivePolynomial
from accessauth.schedule import (
    DEFAULT_POLYNOMIAL, AccessSchedule, LfsrState, MonicPolynomial, bits_to_str, check_polynomial, clock,
    generate_bits, is_primitive, lfsr_init, make_schedule, monic_polynomials, period,
)

P3 = DEFAULT_POLYNOMIAL


def test_polynomial_parsing():
    p = MonicPolynomial.from_string("1101")
    assert p.degree == 3
    assert list(p.taps) == [0, 2]
    assert p.pretty() == "1 + x + x^3"
    assert str(p) == "1101"


@pytest.mark.parametrize("text", ["", "1", "0101", "1100", "12", "abc"])
def test_polynomial_rejects(text):
    with pytest.raises(InvalidPolynomial):
        MonicPolynomial.from_string(text)


def test_init_identity_fold():
    assert lfsr_init("001", P3).bits == (0, 0, 1)


def test_init_thirteen_bit_seed():
    p13 = MonicPolynomial.from_string("11011000000001")
    assert bits_to_str(lfsr_init("1111010000000", p13).bits) == "1111010000000"


def test_init_xor_fold_zero_chunk():
    assert lfsr_init("111000", P3).bits == (1, 1, 1)


def test_init_fold_with_padding():
    # 1010 -> 101 ^ 000 (the trailing 0 padded to 000)
    assert lfsr_init("1010", P3).bits == (1, 0, 1)
    assert lfsr_init("1", P3).bits == (1, 0, 0)


def test_init_errors():
    with pytest.raises(EmptySeed):
        lfsr_init("", P3)
    with pytest.raises(AllZeroSeed):
        lfsr_init("000", P3)
    with pytest.raises(AllZeroSeed):
        lfsr_init("101101", P3)


def test_regression_vector():
    # hand-clocked: 001 -> 100 -> 110 -> 111 -> 011 -> 101 -> 010 -> 001
    assert bits_to_str(generate_bits(LfsrState("001"), P3, 7)) == "1001110"


def test_state_sequence():
    states = []
    s = LfsrState("001")
    for _ in range(7):
        _, s = clock(s, P3, 1)
        states.append(str(s))
    assert states == ["100", "110", "111", "011", "101", "010", "001"]


def test_balance_and_period():
    bits = generate_bits(LfsrState("001"), P3, 7)
    assert bits.sum() == 4
    assert period(P3) == 7


@given(code=st.integers(1, 7))
def test_period_seven_from_any_state(code):
    state = LfsrState(tuple((code >> (2 - i)) & 1 for i in range(3)))
    bits = generate_bits(state, P3, 14)
    assert np.array_equal(bits[:7], bits[7:])
    assert bits[:7].sum() == 4


def test_clock_continues():
    a, mid = clock(LfsrState("001"), P3, 4)
    b, _ = clock(mid, P3, 3)
    assert bits_to_str(np.concatenate([a, b])) == "1001110"


def test_clock_zero_count_keeps_state():
    bits, s = clock(LfsrState("011"), P3, 0)
    assert bits.size == 0 and str(s) == "011"


def test_state_length_must_match():
    with pytest.raises(ValueError):
        clock(LfsrState("01"), P3, 3)


def test_primitivity():
    assert is_primitive(P3)
    assert is_primitive(MonicPolynomial.from_string("1011"))
    assert not is_primitive(MonicPolynomial.from_string("11111"))  # 1+x+x^2+x^3+x^4, period 5
    with pytest.warns(NonPrimitivePolynomial):
        assert not check_polynomial(MonicPolynomial.from_string("11111"))


def test_monic_polynomials_enumeration():
    polys = list(monic_polynomials(3))
    assert len(polys) == 4
    assert all(p.coeffs[0] == 1 and p.coeffs[-1] == 1 for p in polys)


def test_schedule_object():
    sched, final = make_schedule(LfsrState("001"), P3, 4, device_id=3)
    assert str(sched) == "1001" and len(sched) == 4 and sched.device_id == 3
    assert str(final) == "011"
    assert sched == AccessSchedule([1, 0, 0, 1], 3)
    assert sched != AccessSchedule([1, 0, 0, 1], 4)
    with pytest.raises(ValueError):
        sched.bits[0] = 0
