import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rvw.codec.contours import (
    chains_from_flags,
    decode_contours,
    detect_contours,
    encode_contours,
    flags_from_chains,
)
from rvw.errors import CorruptStream


def test_constant_plane_no_contours():
    cmap = detect_contours(np.full((16, 16), 9.0))
    assert not cmap.flags.any()
    assert cmap.chains == ()


def test_vertical_step_edge_matches_bruteforce():
    plane = np.zeros((12, 12))
    plane[:, 6:] = 40.0  # jump of 2.5x the default threshold
    cmap = detect_contours(plane, threshold=16.0)
    # oracle: forward differences evaluated directly
    expect = np.zeros((12, 12), dtype=bool)
    for r in range(12):
        for c in range(12):
            if c + 1 < 12 and abs(plane[r, c + 1] - plane[r, c]) > 16.0:
                expect[r, c] = True
            if r + 1 < 12 and abs(plane[r + 1, c] - plane[r, c]) > 16.0:
                expect[r, c] = True
    assert np.array_equal(cmap.flags, expect)
    # the step leaves one straight vertical line of flags at column 5
    assert set(map(tuple, np.argwhere(cmap.flags))) == {(r, 5) for r in range(12)}
    assert len(cmap.chains) == 1
    assert len(cmap.chains[0][2]) == 11


def test_chains_reproduce_flags_random(rng):
    for _ in range(25):
        flags = rng.random((20, 20)) < 0.15
        chains = chains_from_flags(flags)
        assert np.array_equal(flags_from_chains(chains, flags.shape), flags)


def test_encode_decode_empty_map():
    cmap = detect_contours(np.zeros((8, 8)))
    data = encode_contours(cmap)
    assert len(data) <= 6  # u32 count field plus nothing
    again = decode_contours(data, (8, 8))
    assert not again.flags.any()


def test_encode_decode_roundtrip_random(rng):
    for _ in range(10):
        flags = rng.random((24, 16)) < 0.2
        chains = chains_from_flags(flags)
        cmap = decode_contours(
            encode_contours(type("M", (), {"chains": chains})()), (24, 16)
        )
        assert np.array_equal(cmap.flags, flags)


def test_single_chain_roundtrip():
    flags = np.zeros((8, 8), dtype=bool)
    for i in range(8):
        flags[i, i] = True
    chains = chains_from_flags(flags)
    assert len(chains) == 1
    sx, sy, moves = chains[0]
    assert (sx, sy) == (0, 0) and len(moves) == 7
    cmap = decode_contours(encode_contours(type("M", (), {"chains": chains})()), (8, 8))
    assert np.array_equal(cmap.flags, flags)


def test_decode_rejects_walkoff():
    # chain starting at the edge and walking east immediately leaves the plane
    from rvw.codec.bitio import BitWriter

    w = BitWriter()
    w.write_bits(1, 32)
    w.write_bits(7, 16)
    w.write_bits(0, 16)
    w.write_bits(1, 16)
    w.write_bits(0, 3)  # east
    with pytest.raises(CorruptStream):
        decode_contours(w.getvalue(), (8, 8))


def test_decode_rejects_bad_start():
    from rvw.codec.bitio import BitWriter

    w = BitWriter()
    w.write_bits(1, 32)
    w.write_bits(200, 16)
    w.write_bits(0, 16)
    w.write_bits(0, 16)
    with pytest.raises(CorruptStream):
        decode_contours(w.getvalue(), (8, 8))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.02, 0.5))
def test_chain_roundtrip_property(seed, density):
    rng = np.random.default_rng(seed)
    h, w = int(rng.integers(2, 30)), int(rng.integers(2, 30))
    flags = rng.random((h, w)) < density
    chains = chains_from_flags(flags)
    assert np.array_equal(flags_from_chains(chains, (h, w)), flags)
    # each flagged pixel appears in exactly one chain
    total = sum(1 + len(m) for _, _, m in chains)
    assert total == int(flags.sum())
