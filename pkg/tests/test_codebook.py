import numpy as np
import pytest

from accessauth.codebook import (
    DEFAULT_ALPHABET, Codebook, build_codebook, candidate_sequences, construct_pools, expected_sequences,
    parse_codebook, read_codebook, sequence_index, tag_pool, write_codebook, format_codebook,
)
from accessauth.errors import InvalidDimensions, LengthMismatch
from accessauth.schedule import AccessSchedule

# symbolic C_(4,6) from the worked example: w_n -> n + 10 so zeros stay distinct
W = {n: complex(n + 10, 1) for n in range(8)}
SYMBOLIC = [
    [W[0], W[4], W[3], W[1], W[6], W[5]],
    [0, W[2], W[6], W[4], W[5], W[0]],
    [W[4], W[7], W[0], W[3], W[0], 0],
    [W[3], W[0], W[2], W[4], W[3], W[6]],
]
C46 = Codebook(np.array(SYMBOLIC))


def test_build_shape_and_determinism():
    a = build_codebook(100, 200, 1 / 12, np.random.default_rng(5))
    b = build_codebook(100, 200, 1 / 12, np.random.default_rng(5))
    assert a.N == 100 and a.K == 200 and a.overloaded and a.overloading_factor == 200
    assert a == b
    assert np.isclose(np.mean(np.sum(np.abs(a.entries) ** 2, axis=0)), 1.0)


def test_zero_sparsity_has_no_zeros(rng):
    cb = build_codebook(20, 30, 0.0, rng)
    assert np.all(cb.entries != 0)


def test_entries_from_alphabet(rng):
    cb = build_codebook(10, 10, 0.3, rng, normalize=False)
    nz = cb.entries[cb.entries != 0]
    assert set(np.round(nz, 9)) <= set(np.round(DEFAULT_ALPHABET, 9))
    assert np.all(np.any(cb.entries != 0, axis=0))


def test_zero_mask_reproduces_worked_pattern(rng):
    mask = np.zeros((4, 6), bool)
    mask[1, 0] = mask[2, 5] = True
    cb = build_codebook(4, 6, 0.0, rng, zero_mask=mask)
    assert np.array_equal(cb.entries == 0, mask)


def test_build_errors(rng):
    with pytest.raises(InvalidDimensions):
        build_codebook(0, 3, 0.1, rng)
    with pytest.raises(InvalidDimensions):
        build_codebook(3, 3, 1.0, rng)
    with pytest.raises(InvalidDimensions):
        build_codebook(2, 2, 0.0, rng, zero_mask=np.ones((2, 2), bool))
    with pytest.raises(InvalidDimensions):
        Codebook(np.zeros((2, 2)))


def test_pools_worked_example():
    pools = construct_pools(C46)
    assert list(pools[0]) == [W[0], 0, W[4], W[3]]
    assert list(pools[5]) == [W[5], W[0], 0, W[6]]


def test_pool_singleton():
    assert list(construct_pools(Codebook(np.array([[2 - 1j]])))[0]) == [2 - 1j]


def test_pool_cycles_rows():
    pools = construct_pools(C46, length=6)
    assert list(pools[1]) == [W[4], W[2], W[7], W[0], W[4], W[2]]


def test_tagging_worked_example():
    pools = construct_pools(C46)
    t1 = tag_pool(pools[0], AccessSchedule([1, 1, 0, 0], 0))
    assert list(t1.tags) == [1, 1, 0, 0] and list(t1.values) == [W[0], 0, W[4], W[3]]
    t4 = tag_pool(pools[3], AccessSchedule([1, 1, 1, 0], 3))
    assert list(t4.tags) == [1, 1, 1, 0]
    assert np.array_equal(t4.untag(), pools[3])
    silent = tag_pool(pools[2], AccessSchedule([0, 0, 0, 0], 2))
    assert not silent.tags.any()


def test_tagging_length_mismatch():
    with pytest.raises(LengthMismatch):
        tag_pool([1, 2, 3], AccessSchedule([1, 0], 0))


def test_candidates_are_cyclic_shifts():
    col = np.arange(1, 6) + 0j
    cands = candidate_sequences(col, 4)
    assert cands.shape == (4, 5)
    assert np.array_equal(cands[1], [5, 1, 2, 3, 4])
    assert sequence_index(2, 3, 4) == 1


def test_expected_sequences_matches_candidates(rng):
    cb = build_codebook(8, 5, 0.1, rng)
    offsets = np.array([0, 1, 2, 3, 1])
    exp = expected_sequences(cb, np.arange(5), 2, offsets, 4)
    for k in range(5):
        assert np.array_equal(exp[:, k], candidate_sequences(cb.column(k), 4)[(2 + offsets[k]) % 4])


def test_text_round_trip(tmp_path, rng):
    cb = build_codebook(5, 7, 0.2, rng)
    path = tmp_path / "cb.txt"
    write_codebook(cb, path)
    assert read_codebook(path) == cb
    assert parse_codebook("# comment\n1+2i,-0.5-1i\n") == Codebook(np.array([[1 + 2j, -0.5 - 1j]]))
    with pytest.raises(InvalidDimensions):
        parse_codebook("1+1i,1+1i\n1+1i\n")
    with pytest.raises(ValueError):
        parse_codebook("1+1j\n")
    assert format_codebook(Codebook(np.array([[1 - 0j]]))).strip() == "1.0+0.0i"
