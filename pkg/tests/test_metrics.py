import math

import numpy as np
import pytest

from csjpeg import Image, mse, psnr


def test_mse_examples():
    a = Image(np.zeros((4, 4)))
    assert mse(a, a) == 0.0
    b = Image(np.full((4, 4), 255.0))
    assert mse(a, b) == pytest.approx(65025.0)
    x = Image(np.array([[0.0, 0.0]]))
    y = Image(np.array([[3.0, 4.0]]))
    assert mse(x, y) == pytest.approx(12.5)


def test_psnr_examples():
    a = Image(np.zeros((4, 4)))
    same = psnr(a, a)
    assert math.isinf(same.psnr_db) and same.mse == 0.0
    off_by_one = psnr(a, Image(np.ones((4, 4))), q_max=255.0)
    assert off_by_one.psnr_db == pytest.approx(10 * math.log10(65025.0))
    assert off_by_one.psnr_db == pytest.approx(48.13, abs=0.01)
    assert psnr(a, Image(np.full((4, 4), 255.0)), q_max=255.0).psnr_db == pytest.approx(0.0)


def test_psnr_defaults_to_reference_peak():
    a = Image(np.zeros((2, 2)), q_max=100.0)
    b = Image(np.ones((2, 2)), q_max=100.0)
    assert psnr(a, b).psnr_db == pytest.approx(10 * math.log10(100.0**2))


def test_symmetry_and_shift_invariance():
    rng = np.random.default_rng(4)
    a = Image(rng.uniform(0, 255, (9, 9)))
    b = Image(rng.uniform(0, 255, (9, 9)))
    assert psnr(a, b).psnr_db == pytest.approx(psnr(b, a).psnr_db)
    shifted = mse(Image(a.pixels + 11.5, q_max=300), Image(b.pixels + 11.5, q_max=300))
    assert shifted == pytest.approx(mse(a, b))


def test_scaling_error_decreases_psnr():
    base = np.zeros((8, 8))
    err = np.random.default_rng(5).uniform(-1, 1, (8, 8))
    small = psnr(Image(base + 128), Image(base + 128 + err)).psnr_db
    large = psnr(Image(base + 128), Image(base + 128 + 3.0 * err)).psnr_db
    assert large < small


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        mse(Image(np.zeros((2, 2))), Image(np.zeros((2, 3))))
    with pytest.raises(ValueError):
        psnr(Image(np.zeros((2, 2))), Image(np.zeros((3, 2))))


def test_bad_q_max():
    a = Image(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        psnr(a, a, q_max=0.0)
