"""Matched-rate comparison driver.

For each quality factor the lossy JPEG path is run first; its surviving
coefficient fraction then fixes the measurement budget M for the
compressive-sensing reconstruction of the same image, so both approaches are
compared at the same retained-sample rate. Results go to a CSV table, an SVG
rate/PSNR chart, a JSON run manifest, and optionally a PNG gallery of the
reconstructions.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
from matplotlib.figure import Figure

from .cs import TvSolverConfig, make_mask, measure, reconstruct_tv
from .image import Image, PhantomSpec, generate_phantom, load_image, save_image
from .jpeg import jpeg_lossy_roundtrip
from .metrics import psnr
from .util import round_half_away

DEFAULT_QF_SWEEP = tuple(range(10, 100, 10))

CSV_HEADER = "qf,nonzero_fraction,psnr_jpeg_db,psnr_cs_db"

# Spacing between per-trial mask seeds; trial 0 uses seed + qf unchanged.
_TRIAL_SEED_STRIDE = 1_000_003


@dataclass(frozen=True)
class ExperimentConfig:
    """One full sweep: image source, quality factors, seed, solver, output."""

    image_source: str | Path | PhantomSpec
    qf_list: tuple[int, ...] = DEFAULT_QF_SWEEP
    seed: int = 0
    trials: int = 1
    solver: TvSolverConfig = field(default_factory=TvSolverConfig)
    output_dir: Path = Path("out")
    level_shift: bool = True

    def __post_init__(self):
        if not self.qf_list:
            raise ValueError("qf_list must be nonempty")
        for qf in self.qf_list:
            if not 1 <= qf <= 99:
                raise ValueError(f"quality factors must lie in [1, 99], got {qf}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        object.__setattr__(self, "qf_list", tuple(int(q) for q in self.qf_list))
        object.__setattr__(self, "output_dir", Path(self.output_dir))


@dataclass(frozen=True)
class ComparisonRow:
    """One sweep point: rate and the two PSNRs at that rate."""

    qf: int
    nonzero_fraction: float
    psnr_jpeg_db: float
    psnr_cs_db: float

    def __post_init__(self):
        if not 0.0 <= self.nonzero_fraction <= 1.0:
            raise ValueError("nonzero_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class TrialRecord:
    """Solver provenance for one mask draw."""

    mask_seed: int
    iterations_used: int
    converged: bool
    psnr_cs_db: float
    final_tv: float
    final_consistency_residual: float


@dataclass(frozen=True)
class RowResult:
    """A comparison row plus everything needed for manifest and gallery."""

    row: ComparisonRow
    m: int
    jpeg_image: Image
    cs_image: Image
    trials: tuple[TrialRecord, ...]


def mask_seed_for(base_seed: int, qf: int, trial: int = 0) -> int:
    """Per-row mask seed: base + qf, offset by a fixed stride per extra trial."""
    return base_seed + qf + _TRIAL_SEED_STRIDE * trial


def resolve_image(cfg: ExperimentConfig) -> tuple[Image, str]:
    """Load or synthesize the configured source image; also name its stem."""
    src = cfg.image_source
    if isinstance(src, PhantomSpec):
        return generate_phantom(src), f"phantom{src.size}"
    path = Path(src)
    return load_image(path), path.stem


def run_comparison_detailed(cfg: ExperimentConfig) -> list[RowResult]:
    """Run the sweep and keep reconstructions and solver records per row.

    Rows come back in ascending quality-factor order. The measurement count
    is matched per row: M = round(nonzero_fraction * pixel count), floored at
    1 so a degenerate all-zero row still measures the DC coefficient.
    """
    img, _ = resolve_image(cfg)
    n = img.rows * img.cols
    results: list[RowResult] = []
    for qf in sorted(cfg.qf_list):
        jpeg_img, stats = jpeg_lossy_roundtrip(img, qf, level_shift=cfg.level_shift)
        frac = stats.nonzero_fraction
        m = max(1, int(round_half_away(frac * n)))
        psnr_jpeg = psnr(img, jpeg_img).psnr_db

        trials: list[TrialRecord] = []
        cs_img: Image | None = None
        for trial in range(cfg.trials):
            seed = mask_seed_for(cfg.seed, qf, trial)
            mask = make_mask(n, m, seed, include_dc=True)
            meas = measure(img, mask)
            report = reconstruct_tv(meas, (img.rows, img.cols), cfg.solver, q_max=img.q_max)
            trials.append(
                TrialRecord(
                    mask_seed=seed,
                    iterations_used=report.iterations_used,
                    converged=report.converged,
                    psnr_cs_db=psnr(img, report.result).psnr_db,
                    final_tv=report.final_tv,
                    final_consistency_residual=report.final_consistency_residual,
                )
            )
            if cs_img is None:
                cs_img = report.result

        psnr_cs = sum(t.psnr_cs_db for t in trials) / len(trials)
        row = ComparisonRow(qf, frac, psnr_jpeg, psnr_cs)
        results.append(RowResult(row, m, jpeg_img, cs_img, tuple(trials)))
    return results


def run_comparison(cfg: ExperimentConfig) -> list[ComparisonRow]:
    """The sweep reduced to its table rows."""
    return [r.row for r in run_comparison_detailed(cfg)]


def emit_csv(rows: list[ComparisonRow], path: str | Path) -> None:
    """Write the comparison table; reals carry 6 significant digits."""
    if not rows:
        raise ValueError("no rows to write")
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(f"{r.qf},{r.nonzero_fraction:#.6g},{r.psnr_jpeg_db:#.6g},{r.psnr_cs_db:#.6g}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def parse_csv(path: str | Path) -> list[ComparisonRow]:
    """Read a table written by :func:`emit_csv`."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError(f"{path}: missing header {CSV_HEADER!r}")
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        qf, frac, pj, pc = line.split(",")
        rows.append(ComparisonRow(int(qf), float(frac), float(pj), float(pc)))
    return rows


def emit_plot(rows: list[ComparisonRow], path: str | Path) -> None:
    """Render PSNR against retained-coefficient percentage for both paths.

    The two series are tagged with gids ``series-jpeg`` and ``series-cs`` so
    the saved SVG stays machine-checkable. Non-finite PSNRs (degenerate
    rows) are dropped from the chart rather than fed to the axes.
    """
    if not rows:
        raise ValueError("no rows to plot")
    path = Path(path)
    xs = [100.0 * r.nonzero_fraction for r in rows]

    def clean(values):
        return [v if math.isfinite(v) else math.nan for v in values]

    with matplotlib.rc_context({"svg.hashsalt": "csjpeg"}):
        fig = Figure(figsize=(6.4, 4.2))
        ax = fig.add_subplot(111)
        (jpeg_line,) = ax.plot(xs, clean([r.psnr_jpeg_db for r in rows]), marker="o", label="JPEG")
        jpeg_line.set_gid("series-jpeg")
        (cs_line,) = ax.plot(xs, clean([r.psnr_cs_db for r in rows]), marker="s", label="CS")
        cs_line.set_gid("series-cs")
        ax.set_xlabel("nonzero coefficients [%]")
        ax.set_ylabel("PSNR [dB]")
        ax.grid(True, alpha=0.4)
        ax.legend()
        fig.tight_layout()
        metadata = {"Date": None} if path.suffix.lower() == ".svg" else None
        fig.savefig(path, metadata=metadata)


def write_manifest(cfg: ExperimentConfig, detailed: list[RowResult], path: str | Path) -> None:
    """Dump the run's full provenance (config, seeds, per-row solver stats).

    The output is deterministic for a given config and result set, so two
    identical runs produce byte-identical manifests.
    """
    src = cfg.image_source
    if isinstance(src, PhantomSpec):
        image_info = {"type": "phantom", "size": src.size, "ellipses": [list(e) for e in src.ellipses]}
    else:
        image_info = {"type": "file", "path": str(src)}

    manifest = {
        "image": image_info,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "qf_list": sorted(cfg.qf_list),
        "level_shift": cfg.level_shift,
        "solver": dataclasses.asdict(cfg.solver),
        "rows": [
            {
                "qf": d.row.qf,
                "nonzero_fraction": d.row.nonzero_fraction,
                "m": d.m,
                "psnr_jpeg_db": _jsonable(d.row.psnr_jpeg_db),
                "psnr_cs_db": _jsonable(d.row.psnr_cs_db),
                "trials": [
                    {
                        "mask_seed": t.mask_seed,
                        "iterations_used": t.iterations_used,
                        "converged": t.converged,
                        "psnr_cs_db": _jsonable(t.psnr_cs_db),
                        "final_tv": t.final_tv,
                        "final_consistency_residual": t.final_consistency_residual,
                    }
                    for t in d.trials
                ],
            }
            for d in detailed
        ],
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="ascii")


def _jsonable(v: float):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def emit_gallery(cfg: ExperimentConfig, qf_subset, detailed: list[RowResult] | None = None) -> list[Path]:
    """Save the per-QF reconstructions as PNGs under the output directory.

    Filenames are ``<stem>_qf<NN>_{jpeg|cs}.png``. An empty subset writes
    nothing. Pass ``detailed`` to reuse sweep results instead of recomputing
    (recomputation is deterministic either way).
    """
    subset = sorted(int(q) for q in qf_subset)
    unknown = [q for q in subset if q not in cfg.qf_list]
    if unknown:
        raise ValueError(f"qf_subset entries {unknown} not in the configured qf_list")
    if not subset:
        return []

    _, stem = resolve_image(cfg)
    if detailed is None:
        sub_cfg = dataclasses.replace(cfg, qf_list=tuple(subset))
        detailed = run_comparison_detailed(sub_cfg)
    by_qf = {d.row.qf: d for d in detailed}

    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for qf in subset:
        d = by_qf[qf]
        for tag, img in (("jpeg", d.jpeg_image), ("cs", d.cs_image)):
            out = cfg.output_dir / f"{stem}_qf{qf:02d}_{tag}.png"
            save_image(img, out)
            written.append(out)
    return written


def run_experiment(cfg: ExperimentConfig) -> dict[str, Path]:
    """Full sweep plus all standard outputs (table.csv, plot.svg, manifest.json)."""
    detailed = run_comparison_detailed(cfg)
    rows = [d.row for d in detailed]
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": cfg.output_dir / "table.csv",
        "plot": cfg.output_dir / "plot.svg",
        "manifest": cfg.output_dir / "manifest.json",
    }
    emit_csv(rows, paths["csv"])
    emit_plot(rows, paths["plot"])
    write_manifest(cfg, detailed, paths["manifest"])
    return paths
