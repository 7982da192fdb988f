import numpy as np
import pytest

from rvw.codec.transforms import (
    DCT_FULL,
    LOW,
    N_TEMPLATES,
    coeff_count,
    gft_low,
    inverse_coefficients,
    template_basis,
    transform_block,
)
from rvw.errors import BadTemplate


def all_choices():
    return [DCT_FULL] + [gft_low(k) for k in range(N_TEMPLATES)]


def test_zero_residual_zero_coefficients():
    zero = np.zeros((8, 8))
    for choice in all_choices():
        coeffs = transform_block(zero, choice)
        assert coeffs.shape == (coeff_count(choice),)
        assert not coeffs.any()


def test_constant_block_dct_dc_only():
    c = 5.0
    coeffs = transform_block(np.full((8, 8), c), DCT_FULL)
    # orthonormal 2-D DCT of a constant n x n block puts n*c into DC
    assert coeffs[0] == pytest.approx(8 * c, rel=1e-12)
    assert np.abs(coeffs[1:]).max() < 1e-9


def test_constant_block_gft_first_coefficient():
    c = -3.0
    for k in range(N_TEMPLATES):
        coeffs = transform_block(np.full((8, 8), c), gft_low(k))
        assert coeffs[0] == pytest.approx(4 * c, rel=1e-12)  # sqrt(16) * c
        assert np.abs(coeffs[1:]).max() < 1e-9


def test_dct_orthonormal_roundtrip(rng):
    block = rng.normal(0, 30, (8, 8))
    coeffs = transform_block(block, DCT_FULL)
    assert np.linalg.norm(coeffs) == pytest.approx(np.linalg.norm(block), rel=1e-12)
    back = inverse_coefficients(coeffs, DCT_FULL)
    assert back == pytest.approx(block, abs=1e-10)


def test_gft_decimation_and_inverse(rng):
    block = rng.normal(0, 30, (8, 8))
    for k in range(N_TEMPLATES):
        choice = gft_low(k)
        coeffs = transform_block(block, choice)
        low = inverse_coefficients(coeffs, choice)
        assert low.shape == (LOW, LOW)
        # inverse undoes the transform on the decimated samples exactly
        assert low == pytest.approx(block[0::2, 0::2], abs=1e-10)


def test_template_bases_orthonormal():
    for k in range(N_TEMPLATES):
        basis = template_basis(k)
        gram = basis.eigenvectors.T @ basis.eigenvectors
        assert np.abs(gram - np.eye(16)).max() < 1e-9
        assert basis.eigenvalues[0] == pytest.approx(0.0, abs=1e-9)
        assert np.all(np.diff(basis.eigenvalues) >= -1e-12)


def test_templates_differ():
    mats = [template_basis(k).eigenvectors for k in range(N_TEMPLATES)]
    for i in range(N_TEMPLATES):
        for j in range(i + 1, N_TEMPLATES):
            assert np.abs(mats[i] - mats[j]).max() > 1e-3


def test_cut_template_prefers_split_signal():
    """A signal jumping across the horizontal middle compacts better in the
    horizontal-cut basis than in the uniform one."""
    sig = np.zeros((LOW, LOW))
    sig[LOW // 2 :, :] = 60.0
    uniform = template_basis(0).eigenvectors.T @ sig.ravel()
    cut = template_basis(1).eigenvectors.T @ sig.ravel()

    def tail_energy(c):
        mags = np.sort(np.abs(c))[::-1]
        return float((mags[2:] ** 2).sum())

    assert tail_energy(cut) < tail_energy(uniform)


def test_bad_template_errors():
    with pytest.raises(BadTemplate):
        gft_low(N_TEMPLATES)
    with pytest.raises(BadTemplate):
        template_basis(-1)
    with pytest.raises(BadTemplate):
        coeff_count(99)
    with pytest.raises(BadTemplate):
        transform_block(np.zeros((8, 8)), 7)
