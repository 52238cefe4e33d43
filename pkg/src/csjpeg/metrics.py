"""Image fidelity metrics: mean squared error and PSNR."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .image import Image


@dataclass(frozen=True)
class PsnrResult:
    """PSNR in decibels plus the MSE it was derived from.

    ``psnr_db`` is ``math.inf`` exactly when ``mse`` is zero.
    """

    psnr_db: float
    mse: float


def mse(a: Image, b: Image) -> float:
    """Mean squared pixel difference between two same-sized images."""
    if (a.rows, a.cols) != (b.rows, b.cols):
        raise ValueError(f"size mismatch: {a.rows}x{a.cols} vs {b.rows}x{b.cols}")
    diff = a.pixels - b.pixels
    return float(np.mean(diff * diff))


def psnr(a: Image, b: Image, q_max: float | None = None) -> PsnrResult:
    """Peak signal-to-noise ratio, 10*log10(q_max^2 / MSE).

    ``q_max`` defaults to the peak brightness of ``a``. Identical images get
    an infinite PSNR.
    """
    if q_max is None:
        q_max = a.q_max
    if not q_max > 0:
        raise ValueError("q_max must be positive")
    err = mse(a, b)
    if err == 0.0:
        return PsnrResult(math.inf, 0.0)
    return PsnrResult(10.0 * math.log10(q_max * q_max / err), err)
