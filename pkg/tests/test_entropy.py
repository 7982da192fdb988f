import numpy as np
import pytest

from rvw.codec.entropy import (
    MAG_CAP,
    decode_choices,
    decode_levels,
    encode_choices,
    encode_levels,
    entropy_decode,
    entropy_encode,
    estimate_level_bits,
)
from rvw.codec.transforms import DCT_FULL, coeff_count, gft_low
from rvw.errors import CorruptStream, EncodeOverflow


def random_case(rng, n_blocks, density=0.2, mag=400):
    choices = [
        DCT_FULL if rng.random() < 0.5 else gft_low(int(rng.integers(0, 4)))
        for _ in range(n_blocks)
    ]
    levels = []
    for ch in choices:
        n = coeff_count(ch)
        arr = np.where(
            rng.random(n) < density, rng.integers(-mag, mag + 1, n), 0
        ).astype(np.int64)
        levels.append(arr)
    return levels, choices


def test_roundtrip_random(rng):
    for _ in range(15):
        levels, choices = random_case(rng, int(rng.integers(1, 40)))
        blob = entropy_encode(levels, choices)
        out_levels, out_choices = entropy_decode(blob, len(choices))
        assert out_choices == choices
        for a, b in zip(out_levels, levels):
            assert np.array_equal(a, b)


def test_single_nonzero_level_roundtrip():
    for value in (1, -1, 7, -450, MAG_CAP - 1, -(MAG_CAP - 1)):
        levels = [np.zeros(64, dtype=np.int64)]
        levels[0][13] = value
        blob = entropy_encode(levels, [DCT_FULL])
        out_levels, out_choices = entropy_decode(blob, 1)
        assert out_choices == [DCT_FULL]
        assert np.array_equal(out_levels[0], levels[0])


def test_all_zero_blocks_compact():
    n = 100
    levels = [np.zeros(64, dtype=np.int64) for _ in range(n)]
    choices = [DCT_FULL] * n
    blob = entropy_encode(levels, choices)
    # amortized under 1 bit per block for the level payload
    assert len(blob) * 8 < n + 2 * 8 * 8  # stream bits far below one per block plus framing
    clen = int.from_bytes(blob[:4], "little")
    llen = int.from_bytes(blob[4 + clen : 8 + clen], "little")
    assert llen * 8 < n


def test_overflow_cap():
    levels = [np.zeros(64, dtype=np.int64)]
    levels[0][0] = MAG_CAP
    with pytest.raises(EncodeOverflow):
        encode_levels(levels, [DCT_FULL])


def test_wrong_length_vector():
    with pytest.raises(CorruptStream):
        encode_levels([np.zeros(16, dtype=np.int64)], [DCT_FULL])


def test_truncated_buffer():
    levels, choices = [np.ones(64, dtype=np.int64)], [DCT_FULL]
    blob = entropy_encode(levels, choices)
    with pytest.raises(CorruptStream):
        entropy_decode(blob[:3], 1)
    with pytest.raises(CorruptStream):
        entropy_decode(blob[: len(blob) // 2], 1)


def test_choice_stream_roundtrip_alone(rng):
    choices = [int(c) for c in rng.integers(0, 5, 200)]
    data = encode_choices(choices)
    assert decode_choices(data, 200) == choices


def test_levels_decode_matches_encoder_contexts(rng):
    # adaptive state must evolve identically: long mixed stream
    levels, choices = random_case(rng, 60, density=0.35, mag=2000)
    data = encode_levels(levels, choices)
    out = decode_levels(data, choices)
    for a, b in zip(out, levels):
        assert np.array_equal(a, b)


def test_estimate_level_bits_scales():
    zeros = np.zeros(64, dtype=np.int64)
    assert estimate_level_bits(zeros) == 1
    one = zeros.copy()
    one[0] = 1
    dense = np.full(64, 100, dtype=np.int64)
    assert estimate_level_bits(one) < estimate_level_bits(dense)
