"""Matched-rate comparison of JPEG's lossy core against compressive-sensing
reconstruction from partial DCT measurements."""

__version__ = "0.1.0"

from .cs import (
    Measurements,
    ReconstructionReport,
    SamplingMask,
    SpectrumGrid,
    TvSolverConfig,
    full_dct2,
    inverse_full_dct2,
    load_mask,
    make_mask,
    measure,
    reconstruct_tv,
    save_mask,
    tv_gradient,
    tv_value,
)
from .harness import (
    ComparisonRow,
    ExperimentConfig,
    RowResult,
    TrialRecord,
    emit_csv,
    emit_gallery,
    emit_plot,
    parse_csv,
    run_comparison,
    run_comparison_detailed,
    run_experiment,
    write_manifest,
)
from .image import (
    Image,
    PhantomSpec,
    SHEPP_LOGAN_ELLIPSES,
    generate_phantom,
    load_image,
    pad_to_block_multiple,
    save_image,
)
from .jpeg import (
    BlockStats,
    QuantMatrix,
    count_nonzero_fraction,
    dct2_block,
    dequantize_block,
    idct2_block,
    jpeg_lossy_roundtrip,
    quant_matrix_for_qf,
    quantize_block,
    zigzag_order,
)
from .metrics import PsnrResult, mse, psnr

__all__ = [
    "__version__",
    "BlockStats",
    "ComparisonRow",
    "ExperimentConfig",
    "Image",
    "Measurements",
    "PhantomSpec",
    "PsnrResult",
    "QuantMatrix",
    "ReconstructionReport",
    "RowResult",
    "SamplingMask",
    "SHEPP_LOGAN_ELLIPSES",
    "SpectrumGrid",
    "TrialRecord",
    "TvSolverConfig",
    "count_nonzero_fraction",
    "dct2_block",
    "dequantize_block",
    "emit_csv",
    "emit_gallery",
    "emit_plot",
    "full_dct2",
    "generate_phantom",
    "idct2_block",
    "inverse_full_dct2",
    "jpeg_lossy_roundtrip",
    "load_image",
    "load_mask",
    "make_mask",
    "measure",
    "mse",
    "pad_to_block_multiple",
    "parse_csv",
    "psnr",
    "quant_matrix_for_qf",
    "quantize_block",
    "reconstruct_tv",
    "run_comparison",
    "run_comparison_detailed",
    "run_experiment",
    "save_image",
    "save_mask",
    "tv_gradient",
    "tv_value",
    "write_manifest",
    "zigzag_order",
]
