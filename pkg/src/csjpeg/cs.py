"""Compressive-sensing path: random partial-DCT measurements of an image and
recovery by total-variation minimization.

The measurement operator keeps a seeded random subset of the image's global
2D DCT coefficients. Recovery minimizes a smoothed TV objective over the
affine set of images matching the measurements. Three standard accelerants
make that practical at image scale (a bare gradient loop moves information
one pixel neighborhood per iteration and stalls hopelessly):

- the gradient is preconditioned by an inverse-Laplacian (Sobolev) weighting,
  applied in the DCT domain where it is diagonal;
- the step direction has its measured coefficients zeroed, so every step
  stays exactly data-consistent (for an affine constraint set this equals
  projecting the stepped iterate);
- iterations carry Nesterov-style momentum with function restarts, and the
  smoothing is annealed from coarse down to the configured epsilon.

Each step is still a backtracked descent step on the smoothed TV objective,
so the objective decreases across every accepted step by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.fft

from .image import Image
from .util import SplitMix64

# Sufficient-decrease constant for the TV line search.
_ARMIJO_C = 0.25
# Give up shrinking the step below this fraction of its starting value.
_STEP_FLOOR = 1e-20
# Tikhonov floor of the inverse-Laplacian preconditioner (grid-Laplacian
# eigenvalues live in [0, 8]).
_PRECOND_DELTA = 1e-2
# Smoothing continuation: start at (q_max / 10)^2 and divide by 10 per stage.
_ANNEAL_RATIO = 0.1
# Advance to the next smoothing stage after this many consecutive iterations
# with negligible objective progress.
_STALL_LIMIT = 15
_STALL_REL = 1e-7


@dataclass(frozen=True, eq=False)
class SpectrumGrid:
    """Full-image 2D DCT coefficient array."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.float64, copy=True)
        if c.ndim != 2 or c.size == 0:
            raise ValueError("coeffs must be a nonempty 2D array")
        if not np.all(np.isfinite(c)):
            raise ValueError("coeffs must be finite")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def rows(self) -> int:
        return self.coeffs.shape[0]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[1]


@dataclass(frozen=True, eq=False)
class SamplingMask:
    """Seeded random subset of flat coefficient indices (row-major).

    Regenerating with the same (total, m, seed, include_dc) yields an
    identical mask; see :func:`make_mask`.
    """

    total: int
    selected: np.ndarray
    seed: int
    include_dc: bool

    def __post_init__(self):
        sel = np.array(self.selected, dtype=np.int64, copy=True)
        sel.sort()
        if sel.ndim != 1 or sel.size == 0:
            raise ValueError("selected must be a nonempty 1D index list")
        if sel[0] < 0 or sel[-1] >= self.total:
            raise ValueError("selected indices out of range")
        if np.any(np.diff(sel) == 0):
            raise ValueError("selected indices must be distinct")
        if self.include_dc and sel[0] != 0:
            raise ValueError("include_dc mask must contain index 0")
        sel.flags.writeable = False
        object.__setattr__(self, "selected", sel)

    @property
    def m(self) -> int:
        return int(self.selected.size)


@dataclass(frozen=True, eq=False)
class Measurements:
    """Observed DCT coefficients on a sampling mask."""

    mask: SamplingMask
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != (self.mask.m,):
            raise ValueError("values length must equal the mask size")
        if not np.all(np.isfinite(v)):
            raise ValueError("measurement values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class TvSolverConfig:
    """Knobs for the projected-gradient TV solver.

    ``step_init`` is sized for the preconditioned step direction; the line
    search adapts it up and down between iterations, so the exact value only
    shapes the first few steps.
    """

    max_iters: int = 2000
    rel_tol: float = 1e-6
    smoothing_eps: float = 1e-8
    step_init: float = 1.0
    backtrack_factor: float = 0.5

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not (self.rel_tol > 0 and self.smoothing_eps > 0 and self.step_init > 0):
            raise ValueError("tolerances and step_init must be strictly positive")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise ValueError("backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Outcome of one TV reconstruction."""

    result: Image
    iterations_used: int
    final_tv: float
    final_consistency_residual: float
    converged: bool
    # Objective value before and after each gradient step (pre-projection),
    # mostly for tests and diagnostics.
    tv_before_steps: np.ndarray = field(repr=False, default=None)
    tv_after_steps: np.ndarray = field(repr=False, default=None)


def full_dct2(img: Image) -> SpectrumGrid:
    """Orthonormal 2D DCT-II over the whole raster."""
    return SpectrumGrid(scipy.fft.dctn(img.pixels, norm="ortho"))


def inverse_full_dct2(spec: SpectrumGrid, q_max: float = 255.0) -> Image:
    """Exact inverse of :func:`full_dct2`."""
    return Image(scipy.fft.idctn(spec.coeffs, norm="ortho"), q_max=q_max)


def make_mask(total: int, m: int, seed: int, include_dc: bool = True) -> SamplingMask:
    """Draw ``m`` distinct coefficient indices out of ``total``.

    Selection is a partial Fisher-Yates shuffle driven by SplitMix64, so a
    mask is fully determined by its four parameters. With ``include_dc`` the
    flat index 0 (the DC coefficient) is forced in and the remaining m - 1
    come from the rest; without it the mean of a reconstruction is
    unconstrained, which is only useful for experiments.
    """
    if total < 1:
        raise ValueError("total must be positive")
    if not 1 <= m <= total:
        raise ValueError(f"m must lie in [1, {total}], got {m}")

    rng = SplitMix64(seed)
    if include_dc:
        pool = np.arange(1, total, dtype=np.int64)
        draw = m - 1
    else:
        pool = np.arange(total, dtype=np.int64)
        draw = m
    for k in range(draw):
        j = k + rng.below(pool.size - k)
        pool[k], pool[j] = pool[j], pool[k]
    chosen = pool[:draw]
    if include_dc:
        chosen = np.concatenate(([0], chosen))
    return SamplingMask(total, np.sort(chosen), seed, include_dc)


def measure(img: Image, mask: SamplingMask) -> Measurements:
    """Sample the image's full DCT spectrum at the mask's indices."""
    if mask.total != img.rows * img.cols:
        raise ValueError(f"mask covers {mask.total} coefficients, image has {img.rows * img.cols}")
    spectrum = full_dct2(img)
    return Measurements(mask, spectrum.coeffs.ravel()[mask.selected])


def save_mask(mask: SamplingMask, path: str | Path) -> None:
    """Write a mask as two text lines: 'total m seed include_dc' (include_dc
    as 1/0), then the sorted indices space-separated."""
    header = f"{mask.total} {mask.m} {mask.seed} {1 if mask.include_dc else 0}"
    body = " ".join(str(int(i)) for i in mask.selected)
    Path(path).write_text(header + "\n" + body + "\n", encoding="ascii")


def load_mask(path: str | Path) -> SamplingMask:
    """Inverse of :func:`save_mask`."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if len(lines) < 2:
        raise ValueError(f"{path}: expected header and index lines")
    try:
        total, m, seed, dc = (int(t) for t in lines[0].split())
        selected = np.array([int(t) for t in lines[1].split()], dtype=np.int64)
    except ValueError:
        raise ValueError(f"{path}: malformed mask file") from None
    if selected.size != m:
        raise ValueError(f"{path}: header says {m} indices, found {selected.size}")
    return SamplingMask(total, selected, seed, bool(dc))


def _as_pixels(img) -> np.ndarray:
    if isinstance(img, Image):
        return img.pixels
    a = np.asarray(img, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2D raster")
    return a


def _forward_diffs(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Forward differences with replicate boundary: the virtual neighbor past
    # the last row/column equals the pixel itself, so those differences are 0.
    dv = np.zeros_like(a)
    dh = np.zeros_like(a)
    dv[:-1, :] = a[1:, :] - a[:-1, :]
    dh[:, :-1] = a[:, 1:] - a[:, :-1]
    return dv, dh


def tv_value(img, eps: float = 0.0) -> float:
    """Total variation: the sum over pixels of sqrt(dv^2 + dh^2 + eps).

    (dv, dh) are the forward-difference gradients down rows and along
    columns. eps > 0 smooths the objective for the solver; eps = 0 gives the
    exact TV, which is zero iff the image is constant.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    a = _as_pixels(img)
    dv, dh = _forward_diffs(a)
    return float(np.sum(np.sqrt(dv * dv + dh * dh + eps)))


def tv_gradient(img, eps: float = 1e-8) -> np.ndarray:
    """Pixelwise derivative of the eps-smoothed :func:`tv_value`.

    Each pixel appears in up to three difference terms: its own gradient
    magnitude (negatively) and, as the forward neighbor, in the terms of the
    pixel above and the pixel to the left.
    """
    if eps <= 0:
        raise ValueError("eps must be strictly positive (the objective is not smooth at 0)")
    a = _as_pixels(img)
    dv, dh = _forward_diffs(a)
    mag = np.sqrt(dv * dv + dh * dh + eps)
    gv = dv / mag
    gh = dh / mag
    grad = -(gv + gh)
    grad[1:, :] += gv[:-1, :]
    grad[:, 1:] += gh[:, :-1]
    return grad


def _smoothing_schedule(q_max: float, eps: float) -> list[float]:
    # Coarse-to-fine smoothing; the last stage is the configured epsilon.
    stages: list[float] = []
    s = (q_max / 10.0) ** 2
    while s > 10.0 * eps:
        stages.append(s)
        s *= _ANNEAL_RATIO
    stages.append(eps)
    return stages


def reconstruct_tv(
    meas: Measurements,
    shape: tuple[int, int],
    cfg: TvSolverConfig | None = None,
    q_max: float = 255.0,
) -> ReconstructionReport:
    """Recover an image from partial DCT measurements by TV minimization.

    Starts from the zero-filled spectrum (measured coefficients in place,
    zeros elsewhere) and iterates backtracked, preconditioned gradient steps
    on the smoothed TV objective, re-imposing the measured coefficients each
    iteration. Smoothing anneals down to ``cfg.smoothing_eps`` over the run.
    Stops when the per-iteration max-norm image change at the final
    smoothing level drops below ``rel_tol * q_max``, when no descent
    direction remains, or after ``max_iters`` total iterations; running into
    the cap is reported, not raised. Final pixels are clamped to
    [0, q_max]; the consistency residual is taken before the clamp.
    """
    if cfg is None:
        cfg = TvSolverConfig()
    rows, cols = shape
    if rows < 1 or cols < 1:
        raise ValueError("shape must be positive")
    if meas.mask.total != rows * cols:
        raise ValueError(f"mask covers {meas.mask.total} coefficients, shape has {rows * cols}")

    sel = meas.mask.selected
    y = meas.values

    # Inverse-Laplacian weights, diagonal on the DCT grid (Neumann Laplacian
    # eigenvalues 4 sin^2(pi k / 2n) per axis).
    lam_r = 4.0 * np.sin(np.pi * np.arange(rows) / (2.0 * rows)) ** 2
    lam_c = 4.0 * np.sin(np.pi * np.arange(cols) / (2.0 * cols)) ** 2
    weights = 1.0 / (lam_r[:, np.newaxis] + lam_c[np.newaxis, :] + _PRECOND_DELTA)

    def feasible_direction(grad: np.ndarray) -> np.ndarray:
        coeffs = scipy.fft.dctn(grad, norm="ortho")
        coeffs *= weights
        coeffs.reshape(-1)[sel] = 0.0
        return scipy.fft.idctn(coeffs, norm="ortho")

    def reimpose(a: np.ndarray) -> np.ndarray:
        coeffs = scipy.fft.dctn(a, norm="ortho")
        coeffs.reshape(-1)[sel] = y
        return scipy.fft.idctn(coeffs, norm="ortho")

    spectrum = np.zeros(rows * cols, dtype=np.float64)
    spectrum[sel] = y
    x = scipy.fft.idctn(spectrum.reshape(rows, cols), norm="ortho")

    stages = _smoothing_schedule(q_max, cfg.smoothing_eps)
    final_stage = len(stages) - 1

    tv_before: list[float] = []
    tv_after: list[float] = []
    step = cfg.step_init
    step_floor = cfg.step_init * _STEP_FLOOR
    iterations = 0
    halted = False

    stage = 0
    while stage <= final_stage and not halted and iterations < cfg.max_iters:
        s = stages[stage]
        momentum = 1.0
        extrapolated = x
        f_x = tv_value(x, s)
        stall = 0

        while iterations < cfg.max_iters:
            iterations += 1
            grad = tv_gradient(extrapolated, s)
            direction = feasible_direction(grad)
            slope = float(np.sum(grad * direction))
            if slope <= 0.0:
                # No feasible descent at this smoothing: skip straight to the
                # final stage (a full mask or a flat iterate stays stationary
                # at every smoothing level).
                halted = stage == final_stage
                stage = final_stage
                break

            f_y = tv_value(extrapolated, s)
            t = step
            accepted = 0.0
            while t > step_floor:
                candidate = extrapolated - t * direction
                f_candidate = tv_value(candidate, s)
                if f_candidate <= f_y - _ARMIJO_C * t * slope:
                    accepted = t
                    step = t * 2.0
                    break
                t *= cfg.backtrack_factor
            if accepted == 0.0:
                halted = stage == final_stage
                stage = final_stage
                break

            tv_before.append(f_y)
            tv_after.append(f_candidate)

            # The step direction lies in the measurement null space, so this
            # projection only squashes floating-point drift.
            x_new = reimpose(candidate)

            momentum_new = (1.0 + np.sqrt(1.0 + 4.0 * momentum * momentum)) / 2.0
            extrapolated = x_new + ((momentum - 1.0) / momentum_new) * (x_new - x)
            if f_candidate > f_x:
                momentum_new = 1.0
                extrapolated = x_new

            delta = float(np.max(np.abs(x_new - x)))
            progress = f_x - f_candidate
            x = x_new
            f_x = f_candidate
            momentum = momentum_new

            if delta < cfg.rel_tol * q_max:
                halted = stage == final_stage
                stage += 1
                break
            # Objective stalls advance the annealing; the final stage obeys
            # only the rel_tol / max_iters stopping contract above.
            if stage < final_stage:
                stall = stall + 1 if progress < _STALL_REL * max(abs(f_x), 1.0) else 0
                if stall >= _STALL_LIMIT:
                    stage += 1
                    break
        else:
            break

    final_coeffs = scipy.fft.dctn(x, norm="ortho")
    residual = float(np.max(np.abs(final_coeffs.reshape(-1)[sel] - y)))
    result = Image(np.clip(x, 0.0, q_max), q_max=q_max)

    return ReconstructionReport(
        result=result,
        iterations_used=iterations,
        final_tv=tv_value(result.pixels, cfg.smoothing_eps),
        final_consistency_residual=residual,
        converged=iterations < cfg.max_iters,
        tv_before_steps=np.asarray(tv_before),
        tv_after_steps=np.asarray(tv_after),
    )
