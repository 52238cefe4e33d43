"""Command-line front end.

Subcommands mirror the library one-to-one: ``jpeg`` (lossy round trip),
``cs`` (masked-DCT reconstruction), ``compare`` (full matched-rate sweep),
``phantom`` (test-image generator), and ``psnr``. Exit codes: 0 success,
1 usage error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .cs import TvSolverConfig, make_mask, measure, reconstruct_tv
from .harness import DEFAULT_QF_SWEEP, ExperimentConfig, run_experiment
from .image import PhantomSpec, generate_phantom, load_image, save_image
from .jpeg import jpeg_lossy_roundtrip
from .metrics import psnr
from .util import round_half_away


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage; remap to 1 and keep 2 for runtime errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def parse_fraction(text: str) -> float:
    """Accept '5.52%' or '0.0552'; return a proportion in (0, 1]."""
    text = text.strip()
    try:
        if text.endswith("%"):
            value = float(text[:-1]) / 100.0
        else:
            value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a fraction: {text!r}") from None
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"fraction must lie in (0, 1], got {text!r}")
    return value


def _qf(text: str) -> int:
    value = int(text)
    if not 1 <= value <= 99:
        raise argparse.ArgumentTypeError(f"quality factor must lie in [1, 99], got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="csjpeg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("jpeg", help="lossy JPEG round trip; prints the nonzero coefficient fraction")
    p.add_argument("--in", dest="in_path", required=True, metavar="FILE", help="input image (PGM or PNG)")
    p.add_argument("--qf", type=_qf, required=True, help="quality factor in [1, 99]")
    p.add_argument("--out", required=True, metavar="FILE", help="output image path")
    p.add_argument("--no-level-shift", action="store_true", help="skip the -128 level shift before the DCT")

    p = sub.add_parser("cs", help="reconstruct from a random fraction of DCT coefficients")
    p.add_argument("--in", dest="in_path", required=True, metavar="FILE", help="input image (PGM or PNG)")
    p.add_argument("--fraction", type=parse_fraction, required=True,
                   help="kept-coefficient fraction, e.g. 0.0552 or 5.52%%")
    p.add_argument("--seed", type=int, default=0, help="mask seed (default 0)")
    p.add_argument("--out", required=True, metavar="FILE", help="output image path")
    p.add_argument("--max-iters", type=int, default=TvSolverConfig.max_iters,
                   help="solver iteration cap (default %(default)s)")

    p = sub.add_parser("compare", help="matched-rate JPEG vs CS sweep; writes table, plot, manifest")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--in", dest="in_path", metavar="FILE", help="input image (PGM or PNG)")
    src.add_argument("--phantom", type=int, metavar="N", help="use the generated N x N phantom")
    p.add_argument("--seed", type=int, default=0, help="base mask seed (default 0)")
    p.add_argument("--out-dir", required=True, metavar="DIR", help="directory for table.csv, plot.svg, manifest.json")
    p.add_argument("--qf-list", type=_qf, nargs="+", metavar="QF",
                   help="quality factors to sweep (default 10..90 step 10)")
    p.add_argument("--trials", type=int, default=1, help="masks per row; PSNR is averaged (default 1)")

    p = sub.add_parser("phantom", help="write the generated head phantom")
    p.add_argument("--size", type=int, default=256, help="output side length (default 256)")
    p.add_argument("--out", required=True, metavar="FILE", help="output image path")

    p = sub.add_parser("psnr", help="PSNR between two images, in dB ('inf' when identical)")
    p.add_argument("--a", required=True, metavar="FILE", help="reference image")
    p.add_argument("--b", required=True, metavar="FILE", help="image to compare")

    return parser


def _cmd_jpeg(args) -> int:
    img = load_image(args.in_path)
    out, stats = jpeg_lossy_roundtrip(img, args.qf, level_shift=not args.no_level_shift)
    save_image(out, args.out)
    print(f"{stats.nonzero_fraction:.6g}")
    return 0


def _cmd_cs(args) -> int:
    img = load_image(args.in_path)
    n = img.rows * img.cols
    m = max(1, int(round_half_away(args.fraction * n)))
    mask = make_mask(n, m, args.seed, include_dc=True)
    meas = measure(img, mask)
    cfg = TvSolverConfig(max_iters=args.max_iters)
    report = reconstruct_tv(meas, (img.rows, img.cols), cfg, q_max=img.q_max)
    save_image(report.result, args.out)
    print(f"m={m}")
    print(f"iterations={report.iterations_used}")
    print(f"psnr_db={psnr(img, report.result).psnr_db:.6g}")
    return 0


def _cmd_compare(args) -> int:
    if args.phantom is not None:
        source = PhantomSpec(size=args.phantom)
    else:
        source = args.in_path
    cfg = ExperimentConfig(
        image_source=source,
        qf_list=tuple(args.qf_list) if args.qf_list else DEFAULT_QF_SWEEP,
        seed=args.seed,
        trials=args.trials,
        output_dir=Path(args.out_dir),
    )
    paths = run_experiment(cfg)
    for key in ("csv", "plot", "manifest"):
        print(f"wrote {paths[key]}")
    return 0


def _cmd_phantom(args) -> int:
    save_image(generate_phantom(PhantomSpec(size=args.size)), args.out)
    return 0


def _cmd_psnr(args) -> int:
    result = psnr(load_image(args.a), load_image(args.b))
    print(f"{result.psnr_db:.6g}")
    return 0


_COMMANDS = {
    "jpeg": _cmd_jpeg,
    "cs": _cmd_cs,
    "compare": _cmd_compare,
    "phantom": _cmd_phantom,
    "psnr": _cmd_psnr,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"csjpeg: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
