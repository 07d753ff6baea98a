"""Pansharpening toolkit.

Fuses a high-resolution panchromatic band with a low-resolution
multispectral image using component-substitution, spectral-contribution,
high-frequency-injection and wavelet methods, and scores the results with
the standard spectral and spatial quality indices.
"""

from .bench import (
    BenchmarkReport,
    DatasetConfig,
    MethodRow,
    SynthDataset,
    best_per_metric,
    emit_report,
    load_config,
    render_report,
    report_from_dict,
    report_to_dict,
    run_benchmark,
    synth_dataset,
    wald_consistency,
)
from .fusion import (
    METHODS,
    FusionDiagnostics,
    FusionParams,
    FusionResult,
    default_hpf_kernel,
    fuse,
    fuse_adaptive_ihs,
    fuse_brovey,
    fuse_dwt,
    fuse_hpf,
    fuse_ihs,
    fuse_pca,
    solve_adaptive_alpha,
)
from .metrics import (
    BandMetrics,
    MetricError,
    MetricReport,
    cc,
    ergas,
    full_report,
    rase,
    rmse,
    scc,
    uqi,
)
from .multires import (
    Kernel2D,
    PcaModel,
    WaveletStack,
    atrous_decompose,
    atrous_reconstruct,
    convolve2d,
    mallat_decompose,
    mallat_reconstruct,
    pca_forward,
    pca_inverse,
)
from .preprocess import downsample, histogram_match, upsample
from .raster import (
    BandStats,
    FormatError,
    MultiBandImage,
    Raster,
    band_stats,
    load_image,
    save_image,
)
from .reference_scores import reference_reports

__version__ = "0.1.0"

__all__ = [
    "BandMetrics",
    "BandStats",
    "BenchmarkReport",
    "DatasetConfig",
    "FormatError",
    "FusionDiagnostics",
    "FusionParams",
    "FusionResult",
    "Kernel2D",
    "METHODS",
    "MethodRow",
    "MetricError",
    "MetricReport",
    "MultiBandImage",
    "PcaModel",
    "Raster",
    "SynthDataset",
    "WaveletStack",
    "atrous_decompose",
    "atrous_reconstruct",
    "band_stats",
    "best_per_metric",
    "cc",
    "convolve2d",
    "default_hpf_kernel",
    "downsample",
    "emit_report",
    "ergas",
    "full_report",
    "fuse",
    "fuse_adaptive_ihs",
    "fuse_brovey",
    "fuse_dwt",
    "fuse_hpf",
    "fuse_ihs",
    "fuse_pca",
    "histogram_match",
    "load_config",
    "load_image",
    "mallat_decompose",
    "mallat_reconstruct",
    "pca_forward",
    "pca_inverse",
    "rase",
    "reference_reports",
    "render_report",
    "report_from_dict",
    "report_to_dict",
    "rmse",
    "run_benchmark",
    "save_image",
    "scc",
    "solve_adaptive_alpha",
    "synth_dataset",
    "uqi",
    "upsample",
    "wald_consistency",
]
