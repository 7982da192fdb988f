import numpy as np
import pytest

from rvw.codec import CodecParams, CodedPacket, decode, encode, rd_cost
from rvw.errors import (
    CorruptStream,
    CrcMismatch,
    DimensionMismatch,
    QpOutOfRange,
    RvwError,
)
from rvw.image import DifferencePlane, Roi

from conftest import make_piecewise_diff

FAST = CodecParams(qp=28, mu_grid=(0.01,), max_alternations=1)


def roundtrip(diff, params):
    res = encode(diff, Roi(0, 0, diff.width, diff.height), params)
    out = decode(res.packet.to_bytes())
    return res, out


# --- rd_cost -----------------------------------------------------------------

def test_rd_cost_identical_planes():
    a = DifferencePlane(np.zeros((4, 4), dtype=np.int16))
    c = rd_cost(a, a, 100, 2.0)
    assert c.distortion == 0 and c.cost == 200.0


def test_rd_cost_single_pixel():
    a = DifferencePlane(np.zeros((2, 2), dtype=np.int16))
    b_arr = np.zeros((2, 2), dtype=np.int16)
    b_arr[0, 0] = 3
    b = DifferencePlane(b_arr)
    assert rd_cost(a, b, 0, 5.0).cost == 9.0


def test_rd_cost_monotone_in_rate():
    a = DifferencePlane(np.zeros((2, 2), dtype=np.int16))
    costs = [rd_cost(a, a, bits, 1.5).cost for bits in (0, 10, 100, 1000)]
    assert costs == sorted(costs)


def test_rd_cost_dimension_mismatch():
    a = DifferencePlane(np.zeros((2, 2), dtype=np.int16))
    b = DifferencePlane(np.zeros((2, 3), dtype=np.int16))
    with pytest.raises(DimensionMismatch):
        rd_cost(a, b, 0, 1.0)


# --- params ------------------------------------------------------------------

def test_params_validation():
    with pytest.raises(QpOutOfRange):
        CodecParams(qp=52)
    with pytest.raises(ValueError):
        CodecParams(mu_grid=())
    with pytest.raises(ValueError):
        CodecParams(mu_grid=(0.001, 0.01))
    with pytest.raises(ValueError):
        CodecParams(block_size=16)


# --- encode/decode contract ----------------------------------------------------

def test_zero_plane_degenerate():
    diff = DifferencePlane(np.zeros((32, 32), dtype=np.int16))
    res, out = roundtrip(diff, CodecParams(qp=28))
    assert not res.reconstructed.data.any()
    assert np.array_equal(out.data, res.reconstructed.data)
    header_bytes = 18
    assert len(res.packet.to_bytes()) <= 64 + header_bytes


def test_roundtrip_piecewise_plane():
    diff = make_piecewise_diff(48, 48, seed=3)
    res, out = roundtrip(diff, CodecParams(qp=28))
    assert np.array_equal(out.data, res.reconstructed.data)


def test_roundtrip_adversarial_planes(rng):
    cases = [
        DifferencePlane(rng.integers(-255, 256, (8, 8)).astype(np.int16)),
        DifferencePlane(np.full((16, 24), 255, dtype=np.int16)),
        DifferencePlane(np.full((16, 24), -255, dtype=np.int16)),
        DifferencePlane((np.indices((17, 9)).sum(axis=0) % 2 * 510 - 255).astype(np.int16)),
    ]
    for diff in cases:
        res = encode(diff, Roi(0, 0, diff.width, diff.height), FAST)
        out = decode(res.packet.to_bytes())
        assert np.array_equal(out.data, res.reconstructed.data)


def test_non_multiple_of_block_dims(rng):
    diff = DifferencePlane(rng.integers(-100, 100, (13, 21)).astype(np.int16))
    res, out = roundtrip(diff, FAST)
    assert out.width == 21 and out.height == 13
    assert np.array_equal(out.data, res.reconstructed.data)


def test_reconstruction_in_range():
    diff = make_piecewise_diff(24, 24, seed=9, amp=250)
    res, _ = roundtrip(diff, FAST)
    assert res.reconstructed.data.min() >= -255
    assert res.reconstructed.data.max() <= 255


def test_compression_on_piecewise_plane():
    base = np.zeros((128, 128), dtype=np.int16)
    base[:, 64:] = 40
    diff = DifferencePlane(base)
    res = encode(diff, Roi(0, 0, 128, 128), CodecParams(qp=28))
    assert res.packet.bit_length < 0.2 * 131072


def test_codec_determinism():
    diff = make_piecewise_diff(40, 40, seed=11)
    params = CodecParams(qp=30)
    a = encode(diff, Roi(0, 0, 40, 40), params)
    b = encode(diff, Roi(0, 0, 40, 40), params)
    assert a.packet.to_bytes() == b.packet.to_bytes()
    assert np.array_equal(a.reconstructed.data, b.reconstructed.data)


def test_rate_accounting_matches_packet():
    diff = make_piecewise_diff(32, 32, seed=4)
    res = encode(diff, Roi(0, 0, 32, 32), CodecParams(qp=28))
    assert res.trace.rate_bits == res.packet.bit_length


def test_controller_chooses_min_cost_mu():
    diff = make_piecewise_diff(48, 48, seed=5)
    res = encode(diff, Roi(0, 0, 48, 48), CodecParams(qp=28))
    final_sweep = res.trace.sweep_costs[-1]
    best_in_sweep = min(cost for _, cost in final_sweep)
    overall = res.trace.distortion + res.trace.lam * res.trace.rate_bits
    assert overall <= best_in_sweep + 1e-9


def test_alternation_cost_history_nonincreasing():
    for seed in (1, 2, 3):
        diff = make_piecewise_diff(56, 56, seed=seed, noise=5.0)
        res = encode(diff, Roi(0, 0, 56, 56), CodecParams(qp=28))
        hist = res.trace.cost_history
        assert all(a >= b for a, b in zip(hist, hist[1:]))
        assert res.trace.rounds <= 4


def test_chosen_mu_recorded_in_packet():
    diff = make_piecewise_diff(32, 32, seed=6)
    params = CodecParams(qp=28)
    res = encode(diff, Roi(0, 0, 32, 32), params)
    assert params.mu_grid[res.packet.mu_index] == res.trace.chosen_mu


def test_encode_rejects_mismatched_roi():
    diff = DifferencePlane(np.zeros((8, 8), dtype=np.int16))
    with pytest.raises(DimensionMismatch):
        encode(diff, Roi(0, 0, 9, 8), FAST)


def test_decode_bytes_and_packet_agree():
    diff = make_piecewise_diff(24, 24, seed=7)
    res, _ = roundtrip(diff, FAST)
    via_bytes = decode(res.packet.to_bytes())
    via_packet = decode(CodedPacket.from_bytes(res.packet.to_bytes()))
    assert np.array_equal(via_bytes.data, via_packet.data)


def test_truncated_packet_is_error_not_crash():
    diff = make_piecewise_diff(24, 24, seed=8)
    res, _ = roundtrip(diff, FAST)
    data = res.packet.to_bytes()
    for cut in range(0, len(data), max(1, len(data) // 17)):
        with pytest.raises(RvwError):
            decode(data[:cut])


def test_flipped_crc_byte():
    diff = make_piecewise_diff(24, 24, seed=8)
    res, _ = roundtrip(diff, FAST)
    data = bytearray(res.packet.to_bytes())
    data[-2] ^= 0x10
    with pytest.raises(CrcMismatch):
        decode(bytes(data))


def test_roundtrip_random_sizes(rng):
    for _ in range(25):
        h = int(rng.integers(8, 40))
        w = int(rng.integers(8, 40))
        diff = DifferencePlane(rng.integers(-255, 256, (h, w)).astype(np.int16))
        res = encode(diff, Roi(0, 0, w, h), FAST)
        out = decode(res.packet.to_bytes())
        assert np.array_equal(out.data, res.reconstructed.data)
