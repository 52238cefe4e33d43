"""Small numeric helpers shared across the package."""

from __future__ import annotations

import numpy as np


def round_half_away(x):
    """Round to the nearest integer, ties away from zero.

    ``np.round`` rounds ties to even, which is the wrong convention for the
    quantizer and the file writers here; 0.5 must become 1 and -0.5 must
    become -1.
    """
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


class SplitMix64:
    """Deterministic 64-bit generator (SplitMix64, public-domain constants).

    Chosen over a stdlib or numpy generator so that a mask drawn from a seed
    can be regenerated exactly by any implementation in any language: the
    whole algorithm is the three mix steps below plus modulo reduction for
    bounded draws.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self._state = seed & self._MASK

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & self._MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform draw in [0, bound) by modulo reduction (bound << 2**64)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % bound
