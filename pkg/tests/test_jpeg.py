import math

import numpy as np
import pytest

from csjpeg import (
    BlockStats,
    Image,
    count_nonzero_fraction,
    dct2_block,
    dequantize_block,
    idct2_block,
    jpeg_lossy_roundtrip,
    psnr,
    quant_matrix_for_qf,
    quantize_block,
    zigzag_order,
)
from csjpeg.jpeg import QUANT_BASE_50, quality_scale

# Independent copy of the quality-50 divisor table, retyped from its
# canonical layout so a transcription slip in the module would be caught.
BASE_TABLE = [
    [16, 11, 10, 16, 24, 40, 51, 61],
    [12, 12, 14, 19, 26, 58, 60, 55],
    [14, 13, 16, 24, 40, 57, 69, 56],
    [14, 17, 22, 29, 51, 87, 80, 62],
    [18, 22, 37, 56, 68, 109, 103, 77],
    [24, 35, 55, 64, 81, 104, 113, 92],
    [49, 64, 78, 87, 103, 121, 120, 101],
    [72, 92, 95, 98, 112, 100, 103, 99],
]


def dct2_by_summation(block):
    """Brute-force 64-term cosine sum; the oracle the fast path is held to."""
    out = np.zeros((8, 8))
    for k1 in range(8):
        for k2 in range(8):
            c1 = 1.0 / math.sqrt(2.0) if k1 == 0 else 1.0
            c2 = 1.0 / math.sqrt(2.0) if k2 == 0 else 1.0
            acc = 0.0
            for i in range(8):
                for j in range(8):
                    acc += (
                        block[i, j]
                        * math.cos((2 * i + 1) * k1 * math.pi / 16.0)
                        * math.cos((2 * j + 1) * k2 * math.pi / 16.0)
                    )
            out[k1, k2] = c1 * c2 * acc / 4.0
    return out


def zigzag_by_diagonal_walk():
    """Anti-diagonal walk, alternating direction: the classic scan pattern."""
    order = []
    for d in range(15):
        cells = [(i, d - i) for i in range(max(0, d - 7), min(d, 7) + 1)]
        if d % 2 == 0:
            cells.reverse()
        order.extend(cells)
    return order


class TestBlockTransform:
    def test_matches_summation_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            block = rng.uniform(-128, 127, (8, 8))
            assert np.allclose(dct2_block(block), dct2_by_summation(block), atol=1e-9)

    def test_constant_block(self):
        spectrum = dct2_block(np.full((8, 8), 7.0))
        assert spectrum[0, 0] == pytest.approx(56.0, abs=1e-9)
        off_dc = spectrum.copy()
        off_dc[0, 0] = 0.0
        assert np.abs(off_dc).max() < 1e-12

    def test_zero_block(self):
        assert np.array_equal(dct2_block(np.zeros((8, 8))), np.zeros((8, 8)))
        assert np.array_equal(idct2_block(np.zeros((8, 8))), np.zeros((8, 8)))

    def test_energy_preserved(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            block = rng.uniform(-128, 127, (8, 8))
            spectrum = dct2_block(block)
            assert np.sum(spectrum**2) == pytest.approx(np.sum(block**2), rel=1e-9)

    def test_inverse_pair(self):
        rng = np.random.default_rng(9)
        for _ in range(50):
            block = rng.uniform(0, 255, (8, 8))
            assert np.allclose(idct2_block(dct2_block(block)), block, atol=1e-9)

    def test_dc_only_spectrum_gives_constant(self):
        spectrum = np.zeros((8, 8))
        spectrum[0, 0] = 56.0
        assert np.allclose(idct2_block(spectrum), np.full((8, 8), 7.0), atol=1e-12)

    def test_basis_is_orthonormal(self):
        # rows of the flattened transform form an orthonormal 64x64 matrix
        basis = np.zeros((64, 64))
        for k in range(64):
            impulse = np.zeros(64)
            impulse[k] = 1.0
            basis[k] = dct2_block(impulse.reshape(8, 8)).ravel()
        assert np.allclose(basis @ basis.T, np.eye(64), atol=1e-9)

    def test_dimension_errors(self):
        with pytest.raises(ValueError):
            dct2_block(np.zeros((4, 4)))
        with pytest.raises(ValueError):
            idct2_block(np.zeros((8, 7)))
        with pytest.raises(ValueError):
            dct2_block(np.full((8, 8), np.nan))


class TestQuantMatrix:
    def test_qf50_is_base_table(self):
        qm = quant_matrix_for_qf(50)
        assert qm.entries.tolist() == BASE_TABLE
        assert qm.entries[0, 0] == 16

    def test_derived_entries(self):
        assert quality_scale(10) == pytest.approx(5.0)
        assert quant_matrix_for_qf(10).entries[0, 0] == 80
        assert quality_scale(90) == pytest.approx(0.2)
        assert quant_matrix_for_qf(90).entries[0, 0] == 3
        assert quant_matrix_for_qf(90).entries[0, 2] == 2

    def test_scale_continuous_at_50_and_nonincreasing(self):
        assert 2.0 - 0.02 * 50 == 1.0
        assert 50.0 / 50 == 1.0
        scales = [quality_scale(qf) for qf in range(1, 100)]
        assert all(b <= a for a, b in zip(scales, scales[1:]))

    def test_entries_clamped_into_byte_range(self):
        for qf in range(1, 100):
            entries = quant_matrix_for_qf(qf).entries
            assert entries.min() >= 1 and entries.max() <= 255
        # coarse end saturates high, fine end clamps up to 1
        assert quant_matrix_for_qf(1).entries.max() == 255
        assert quant_matrix_for_qf(99).entries.min() == 1

    @pytest.mark.parametrize("qf", [0, 100, -3])
    def test_rejects_out_of_range(self, qf):
        with pytest.raises(ValueError):
            quant_matrix_for_qf(qf)


class TestQuantizeDequantize:
    def test_rounding_examples(self):
        qm = quant_matrix_for_qf(50)
        spectrum = np.zeros((8, 8))
        spectrum[0, 0] = 100.0
        assert quantize_block(spectrum, qm)[0, 0] == 6
        spectrum[0, 0] = -26.0
        assert quantize_block(spectrum, qm)[0, 0] == -2
        assert quantize_block(np.zeros((8, 8)), qm).tolist() == np.zeros((8, 8)).tolist()

    def test_dequantize(self):
        qm = quant_matrix_for_qf(50)
        levels = np.zeros((8, 8), dtype=np.int64)
        levels[0, 0] = 6
        assert dequantize_block(levels, qm)[0, 0] == 96.0
        assert dequantize_block(np.zeros((8, 8)), qm).sum() == 0.0

    def test_roundtrip_error_within_half_step(self):
        rng = np.random.default_rng(10)
        for qf in (10, 50, 90):
            qm = quant_matrix_for_qf(qf)
            for _ in range(20):
                spectrum = rng.uniform(-1024, 1024, (8, 8))
                rebuilt = dequantize_block(quantize_block(spectrum, qm), qm)
                assert np.all(np.abs(rebuilt - spectrum) <= qm.entries / 2 + 1e-9)

    def test_dimension_errors(self):
        qm = quant_matrix_for_qf(50)
        with pytest.raises(ValueError):
            quantize_block(np.zeros((4, 8)), qm)
        with pytest.raises(ValueError):
            dequantize_block(np.zeros((8, 9)), qm)


class TestZigzag:
    def test_matches_diagonal_walk(self):
        assert zigzag_order() == zigzag_by_diagonal_walk()

    def test_known_positions(self):
        order = zigzag_order()
        assert order[0] == (0, 0)
        assert order[1:4] == [(0, 1), (1, 0), (2, 0)]
        assert order[4:6] == [(1, 1), (0, 2)]
        assert order[63] == (7, 7)

    def test_bijection(self):
        assert sorted(zigzag_order()) == [(i, j) for i in range(8) for j in range(8)]


class TestCounting:
    def test_examples(self):
        dc_only = np.zeros((8, 8), dtype=np.int64)
        dc_only[0, 0] = 5
        assert count_nonzero_fraction([dc_only]).nonzero_fraction == pytest.approx(1 / 64)
        zeros = np.zeros((8, 8), dtype=np.int64)
        assert count_nonzero_fraction([zeros, zeros]).nonzero_fraction == 0.0
        a = np.zeros((8, 8), dtype=np.int64)
        a.ravel()[:3] = 1
        b = np.zeros((8, 8), dtype=np.int64)
        b.ravel()[:5] = 2
        stats = count_nonzero_fraction([a, b])
        assert (stats.total_coeffs, stats.nonzero_coeffs) == (128, 8)
        assert stats.nonzero_fraction == pytest.approx(8 / 128)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            count_nonzero_fraction([])

    def test_stats_invariants(self):
        with pytest.raises(ValueError):
            BlockStats(total_coeffs=10, nonzero_coeffs=11)
        with pytest.raises(ValueError):
            BlockStats(total_coeffs=0, nonzero_coeffs=0)


class TestLossyRoundtrip:
    def test_constant_midgray_is_fixed_point(self):
        img = Image(np.full((24, 24), 128.0))
        out, stats = jpeg_lossy_roundtrip(img, 50)
        assert np.array_equal(out.pixels, img.pixels)
        assert stats.nonzero_fraction == 0.0

    def test_level_shift_flag(self):
        img = Image(np.full((8, 8), 128.0))
        _, shifted = jpeg_lossy_roundtrip(img, 50, level_shift=True)
        _, raw = jpeg_lossy_roundtrip(img, 50, level_shift=False)
        assert shifted.nonzero_fraction == 0.0
        assert raw.nonzero_fraction == pytest.approx(1 / 64)

    def test_higher_quality_recovers_better(self, phantom64):
        lo, _ = jpeg_lossy_roundtrip(phantom64, 10)
        hi, _ = jpeg_lossy_roundtrip(phantom64, 99)
        assert psnr(phantom64, hi).psnr_db > psnr(phantom64, lo).psnr_db

    def test_fraction_nondecreasing_in_qf(self, phantom64):
        fractions = [jpeg_lossy_roundtrip(phantom64, qf)[1].nonzero_fraction for qf in (5, 20, 45, 50, 70, 95)]
        assert all(b >= a for a, b in zip(fractions, fractions[1:]))

    def test_pads_and_crops_internally(self):
        rng = np.random.default_rng(11)
        img = Image(rng.integers(0, 256, (20, 13)).astype(float))
        out, stats = jpeg_lossy_roundtrip(img, 75)
        assert (out.rows, out.cols) == (20, 13)
        # stats cover the padded 24x16 grid
        assert stats.total_coeffs == 24 * 16
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 255.0

    def test_output_clamped(self, phantom64):
        out, _ = jpeg_lossy_roundtrip(phantom64, 5)
        assert out.pixels.min() >= 0.0 and out.pixels.max() <= 255.0

    def test_qf_domain_error(self, phantom64):
        with pytest.raises(ValueError):
            jpeg_lossy_roundtrip(phantom64, 0)
