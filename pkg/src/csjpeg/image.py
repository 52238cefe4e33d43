"""Grayscale image container, PGM/PNG input and output, padding, and a
synthetic head phantom.

Pixels are held as real values for the whole pipeline; rounding to integers
happens only when a file is written. Color input is reduced to luma with the
BT.601 weights 0.299/0.587/0.114.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .util import round_half_away

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


@dataclass(frozen=True, eq=False)
class Image:
    """A grayscale raster with real-valued pixels in nominal range [0, q_max].

    Attributes
    ----------
    pixels:
        2D float64 array, row-major, made read-only on construction so
        instances can be shared freely.
    q_max:
        Peak brightness the pixel scale refers to (255.0 for 8-bit data).
        Intermediate results may exceed [0, q_max]; file writers clamp.
    """

    pixels: np.ndarray
    q_max: float = 255.0

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64, copy=True)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a nonempty 2D array")
        if not np.all(np.isfinite(px)):
            raise ValueError("pixels must be finite")
        if not self.q_max > 0:
            raise ValueError("q_max must be positive")
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)
        object.__setattr__(self, "q_max", float(self.q_max))

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


# One ellipse: (intensity delta, semi-axis a, semi-axis b, center x, center y,
# rotation in degrees), all in the unit square [-1, 1]^2 with y up.
Ellipse = tuple[float, float, float, float, float, float]

# The ten-ellipse Shepp-Logan head, with the usual display-contrast gray
# levels (the 1974 values leave the interior features below one gray level
# after 8-bit scaling, so nearly every generator in circulation ships these).
SHEPP_LOGAN_ELLIPSES: tuple[Ellipse, ...] = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.605, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


@dataclass(frozen=True)
class PhantomSpec:
    """Parameters for the analytic phantom generator."""

    size: int = 256
    ellipses: tuple[Ellipse, ...] = SHEPP_LOGAN_ELLIPSES

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("size must be a positive integer")
        for e in self.ellipses:
            if len(e) != 6:
                raise ValueError("each ellipse needs 6 parameters")
            if e[1] <= 0 or e[2] <= 0:
                raise ValueError("semi-axes must be strictly positive")
        object.__setattr__(self, "ellipses", tuple(tuple(map(float, e)) for e in self.ellipses))


def generate_phantom(spec: PhantomSpec | None = None) -> Image:
    """Render the phantom described by ``spec`` as an 8-bit-scale image.

    Every pixel receives the sum of the intensity deltas of the ellipses that
    contain its unit-square coordinate; the result is then scaled linearly so
    its value range maps onto [0, 255]. The output is a pure function of the
    spec, so repeated calls are bit-identical.
    """
    if spec is None:
        spec = PhantomSpec()
    n = spec.size
    # Pixel (i, j) sits at x = xs[j], y = ys[i]; y decreases down the rows.
    xs = np.linspace(-1.0, 1.0, n) if n > 1 else np.array([0.0])
    ys = xs[::-1]
    x = xs[np.newaxis, :]
    y = ys[:, np.newaxis]

    acc = np.zeros((n, n), dtype=np.float64)
    for delta, a, b, x0, y0, deg in spec.ellipses:
        theta = np.deg2rad(deg)
        ct, st = np.cos(theta), np.sin(theta)
        u = (x - x0) * ct + (y - y0) * st
        v = -(x - x0) * st + (y - y0) * ct
        acc[(u / a) ** 2 + (v / b) ** 2 <= 1.0] += delta

    # Contrasts are short decimals; regions whose deltas cancel in exact
    # decimal arithmetic must land on the same value, so shave off the
    # float accumulation noise before taking the range.
    acc = np.round(acc, 12)
    lo, hi = acc.min(), acc.max()
    if hi > lo:
        acc = (acc - lo) * (255.0 / (hi - lo))
    else:
        acc = np.zeros_like(acc)
    return Image(acc, q_max=255.0)


def pad_to_block_multiple(img: Image, block: int) -> Image:
    """Grow ``img`` by edge replication until both sides divide by ``block``.

    Replication (rather than zero fill) keeps the padded border free of
    artificial edges that would leak energy into the block transforms.
    """
    if block < 1:
        raise ValueError("block must be >= 1")
    pad_r = (block - img.rows % block) % block
    pad_c = (block - img.cols % block) % block
    if pad_r == 0 and pad_c == 0:
        return img
    padded = np.pad(img.pixels, ((0, pad_r), (0, pad_c)), mode="edge")
    return Image(padded, q_max=img.q_max)


def load_image(path: str | Path) -> Image:
    """Load a grayscale image from a PGM (P5) or PNG file.

    8-bit RGB input is converted with the BT.601 luma weights; the luma value
    is kept as a real number, not rounded. ``q_max`` comes from the file's
    declared scale (the PGM maxval, or 255 for 8-bit PNG).
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pgm":
        return _read_pgm(path)
    if suffix == ".png":
        return _read_png(path)
    raise ValueError(f"unsupported image format: {path.name!r} (expected .pgm or .png)")


def save_image(img: Image, path: str | Path) -> None:
    """Write ``img`` as binary PGM or 8-bit grayscale PNG, chosen by extension.

    Pixels are rounded half-away-from-zero and clamped to [0, q_max] on the
    way out; images whose pixels are already integral round-trip exactly.
    """
    path = Path(path)
    maxval = int(round_half_away(np.float64(img.q_max)))
    if not 1 <= maxval <= 255:
        raise ValueError("only 8-bit output is supported (q_max must round into [1, 255])")
    data = np.clip(round_half_away(img.pixels), 0, maxval).astype(np.uint8)

    suffix = path.suffix.lower()
    if suffix == ".pgm":
        header = f"P5\n{img.cols} {img.rows}\n{maxval}\n".encode("ascii")
        path.write_bytes(header + data.tobytes())
    elif suffix == ".png":
        from PIL import Image as pil

        pil.fromarray(data, mode="L").save(path, format="PNG")
    else:
        raise ValueError(f"unsupported image format: {path.name!r} (expected .pgm or .png)")


def _read_pgm(path: Path) -> Image:
    raw = path.read_bytes()
    if raw[:2] != b"P5":
        raise ValueError(f"{path}: not a binary PGM (missing P5 magic)")

    # Header tokens (width, height, maxval) separated by whitespace, with
    # '#'-to-end-of-line comments allowed, then a single whitespace byte
    # before the sample data.
    pos = 2
    tokens: list[int] = []
    while len(tokens) < 3:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if pos < len(raw) and raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ValueError(f"{path}: truncated PGM header")
        try:
            tokens.append(int(raw[start:pos]))
        except ValueError:
            raise ValueError(f"{path}: malformed PGM header") from None
    pos += 1  # single whitespace after maxval

    cols, rows, maxval = tokens
    if cols < 1 or rows < 1:
        raise ValueError(f"{path}: bad PGM dimensions {cols}x{rows}")
    if not 1 <= maxval <= 255:
        raise ValueError(f"{path}: unsupported PGM maxval {maxval} (8-bit only)")
    expected = rows * cols
    body = raw[pos : pos + expected]
    if len(body) != expected:
        raise ValueError(f"{path}: PGM payload truncated")
    pixels = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols).astype(np.float64)
    return Image(pixels, q_max=float(maxval))


def _read_png(path: Path) -> Image:
    from PIL import Image as pil

    with pil.open(path) as im:
        im.load()
        mode = im.mode
        if mode == "P":
            im = im.convert("RGB")
            mode = "RGB"
        if mode == "L":
            pixels = np.asarray(im, dtype=np.float64)
        elif mode == "RGB":
            rgb = np.asarray(im, dtype=np.float64)
            wr, wg, wb = LUMA_WEIGHTS
            pixels = wr * rgb[:, :, 0] + wg * rgb[:, :, 1] + wb * rgb[:, :, 2]
        else:
            raise ValueError(f"{path}: unsupported PNG mode {mode!r} (8-bit L or RGB only)")
    return Image(pixels, q_max=255.0)
