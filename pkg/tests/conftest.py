import os

import numpy as np
import pytest
import scipy.ndimage

from csjpeg import Image, PhantomSpec, generate_phantom, load_image


def synthetic_scene(size: int = 256, seed: int = 20240817) -> Image:
    """Deterministic textured stand-in for a natural photograph.

    Multi-octave smoothed noise with a roughly 1/f amplitude falloff: detail
    at every scale and nowhere piecewise-constant, which is the regime where
    block-DCT coding is strong and gradient-sparsity priors are weak.
    """
    rng = np.random.default_rng(seed)
    acc = np.zeros((size, size))
    octave = 4
    weight = 1.0
    while octave <= size:
        coarse = rng.standard_normal((octave, octave))
        acc += weight * scipy.ndimage.zoom(
            coarse, size / octave, order=3, mode="reflect", grid_mode=True
        )
        octave *= 2
        weight *= 0.55
    lo, hi = acc.min(), acc.max()
    return Image((acc - lo) * (255.0 / (hi - lo)))


@pytest.fixture(scope="session")
def phantom256() -> Image:
    return generate_phantom(PhantomSpec(size=256))


@pytest.fixture(scope="session")
def phantom64() -> Image:
    return generate_phantom(PhantomSpec(size=64))


@pytest.fixture(scope="session")
def natural_image() -> Image:
    """A 256x256-ish natural grayscale image: the CSJPEG_NATURAL_IMAGE file
    if the tester supplies one, else the synthetic textured scene."""
    path = os.environ.get("CSJPEG_NATURAL_IMAGE")
    if path:
        return load_image(path)
    return synthetic_scene(256)
