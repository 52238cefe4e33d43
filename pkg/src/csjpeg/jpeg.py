"""Lossy JPEG core: 8x8 block DCT, quality-scaled quantization, zigzag
ordering, and nonzero-coefficient accounting.

Only the lossy front half of the codec lives here (transform, quantize,
dequantize, inverse transform). Entropy coding is out of scope: the figure of
merit downstream is how many quantized coefficients survive, not how many
bits they cost.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.fft

from .image import Image, pad_to_block_multiple
from .util import round_half_away

BLOCK = 8
LEVEL_SHIFT = 128.0

# Baseline luminance divisor table; the quality-50 operating point.
QUANT_BASE_50 = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


@dataclass(frozen=True, eq=False)
class QuantMatrix:
    """8x8 positive integer divisor table for a given quality factor."""

    entries: np.ndarray
    qf: int

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.int64, copy=True)
        if e.shape != (BLOCK, BLOCK):
            raise ValueError("quantization matrix must be 8x8")
        if e.min() < 1 or e.max() > 255:
            raise ValueError("quantization divisors must lie in [1, 255]")
        e.flags.writeable = False
        object.__setattr__(self, "entries", e)


@dataclass(frozen=True)
class BlockStats:
    """Aggregate count of surviving (nonzero) quantized coefficients."""

    total_coeffs: int
    nonzero_coeffs: int

    def __post_init__(self):
        if self.total_coeffs < 1:
            raise ValueError("total_coeffs must be positive")
        if not 0 <= self.nonzero_coeffs <= self.total_coeffs:
            raise ValueError("nonzero_coeffs out of range")

    @property
    def nonzero_fraction(self) -> float:
        return self.nonzero_coeffs / self.total_coeffs


def quality_scale(qf: int) -> float:
    """Divisor scale for a quality factor: 2 - 0.02*QF above 50, 50/QF below."""
    if not 1 <= qf <= 99:
        raise ValueError(f"quality factor must be in [1, 99], got {qf}")
    return 2.0 - 0.02 * qf if qf >= 50 else 50.0 / qf


def quant_matrix_for_qf(qf: int) -> QuantMatrix:
    """Scale the baseline table by the quality factor.

    Entries are rounded half-away-from-zero and clamped to [1, 255]; a zero
    divisor would break the quantizer, so high qualities saturate at 1.
    """
    q = quality_scale(int(qf))
    entries = np.clip(round_half_away(QUANT_BASE_50 * q), 1, 255).astype(np.int64)
    return QuantMatrix(entries, int(qf))


def _check_block(a, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.shape != (BLOCK, BLOCK):
        raise ValueError(f"{name} must be 8x8, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} must be finite")
    return a


def dct2_block(block) -> np.ndarray:
    """Orthonormal 2D DCT-II of one 8x8 block.

    The normalization makes the 64 basis images orthonormal: a constant
    block of value c transforms to a single (0,0) coefficient of 8c, and
    energy is preserved exactly.
    """
    return scipy.fft.dctn(_check_block(block, "block"), norm="ortho")


def idct2_block(spectrum) -> np.ndarray:
    """Exact inverse of :func:`dct2_block` (orthonormal 2D DCT-III)."""
    return scipy.fft.idctn(_check_block(spectrum, "spectrum"), norm="ortho")


def quantize_block(spectrum, qm: QuantMatrix) -> np.ndarray:
    """Divide by the quantization table and round half-away-from-zero."""
    s = _check_block(spectrum, "spectrum")
    return round_half_away(s / qm.entries).astype(np.int64)


def dequantize_block(q_spectrum, qm: QuantMatrix) -> np.ndarray:
    """Multiply quantized levels back by their divisors."""
    q = np.asarray(q_spectrum)
    if q.shape != (BLOCK, BLOCK):
        raise ValueError(f"quantized spectrum must be 8x8, got shape {q.shape}")
    return q.astype(np.float64) * qm.entries


def zigzag_order() -> list[tuple[int, int]]:
    """The 64 (row, col) block positions in zigzag order, DC first.

    Built by walking the anti-diagonals: odd diagonals run down-left from
    the top row, even ones up-right from the left column.
    """
    return list(_ZIGZAG)


def _build_zigzag() -> tuple[tuple[int, int], ...]:
    order = []
    for d in range(2 * BLOCK - 1):
        lo, hi = max(0, d - BLOCK + 1), min(d, BLOCK - 1)
        rows = range(lo, hi + 1) if d % 2 else range(hi, lo - 1, -1)
        order.extend((i, d - i) for i in rows)
    return tuple(order)


_ZIGZAG = _build_zigzag()


def count_nonzero_fraction(q_blocks) -> BlockStats:
    """Tally nonzero quantized coefficients over a sequence of blocks."""
    blocks = [np.asarray(b) for b in q_blocks]
    if not blocks:
        raise ValueError("need at least one block")
    total = sum(b.size for b in blocks)
    nonzero = sum(int(np.count_nonzero(b)) for b in blocks)
    return BlockStats(total, nonzero)


def jpeg_lossy_roundtrip(img: Image, qf: int, level_shift: bool = True) -> tuple[Image, BlockStats]:
    """Push an image through the lossy path and back.

    Per 8x8 block: level shift by -128 (unless disabled), forward DCT,
    quantize, dequantize, inverse DCT, shift back. The image is padded to a
    block multiple by edge replication first and cropped to its original
    size after; output pixels are clamped to [0, q_max]. The returned stats
    count nonzero quantized coefficients over all (padded) blocks.
    """
    qm = quant_matrix_for_qf(qf)
    padded = pad_to_block_multiple(img, BLOCK)
    work = padded.pixels - LEVEL_SHIFT if level_shift else padded.pixels

    by, bx = work.shape[0] // BLOCK, work.shape[1] // BLOCK
    blocks = work.reshape(by, BLOCK, bx, BLOCK).swapaxes(1, 2)
    spectra = scipy.fft.dctn(blocks, axes=(-2, -1), norm="ortho")
    quantized = round_half_away(spectra / qm.entries).astype(np.int64)
    stats = BlockStats(quantized.size, int(np.count_nonzero(quantized)))

    rebuilt = scipy.fft.idctn(quantized * qm.entries.astype(np.float64), axes=(-2, -1), norm="ortho")
    flat = rebuilt.swapaxes(1, 2).reshape(work.shape)
    if level_shift:
        flat = flat + LEVEL_SHIFT
    out = np.clip(flat[: img.rows, : img.cols], 0.0, img.q_max)
    return Image(out, q_max=img.q_max), stats
