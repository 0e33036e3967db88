"""Vertebral body segmentation and labeling for sagittal grayscale images.

The package segments bright vertebral bodies out of a gray sagittal slice
with fuzzy soft clustering, cleans the result with a binary morphology
chain, names the bodies L5 up to L1, and benchmarks the whole pipeline
against Otsu thresholding and k-means baselines.
"""

from . import errors
from .clustering import (
    FuzzyCMeans,
    KMeans1D,
    OtsuThreshold,
    defuzzify,
    fcm_objective,
    mask_from_assignment,
    otsu_threshold,
    select_vertebra_cluster,
)
from .diffusion import AnisotropicDiffusion, diffuse, quantize
from .metrics import (
    SegReport,
    StatsSummary,
    dice,
    directed_hausdorff,
    hausdorff,
    summarize,
    time_call,
)
from .morphology import (
    Component,
    MorphoParams,
    components_to_csv,
    connected_components,
    erode,
    fill_holes,
    filter_by_area,
    filter_by_aspect_ratio,
    label_vertebrae,
    run_morphology,
)
from .phantom import PhantomSpec, generate_phantom
from .pipeline import (
    BenchmarkResult,
    PipelineConfig,
    PipelineResult,
    load_config,
    parse_config,
    run_benchmark,
    run_pipeline,
)
from .raster import (
    as_float_image,
    as_gray_image,
    as_label_map,
    as_mask,
    default_palette,
    read_pgm,
    read_ppm,
    relabel_sequential,
    write_pgm,
    write_ppm_overlay,
)

__version__ = "0.1.0"

__all__ = [
    "AnisotropicDiffusion",
    "BenchmarkResult",
    "Component",
    "FuzzyCMeans",
    "KMeans1D",
    "MorphoParams",
    "OtsuThreshold",
    "PhantomSpec",
    "PipelineConfig",
    "PipelineResult",
    "SegReport",
    "StatsSummary",
    "as_float_image",
    "as_gray_image",
    "as_label_map",
    "as_mask",
    "components_to_csv",
    "connected_components",
    "default_palette",
    "defuzzify",
    "dice",
    "diffuse",
    "directed_hausdorff",
    "erode",
    "errors",
    "fcm_objective",
    "fill_holes",
    "filter_by_area",
    "filter_by_aspect_ratio",
    "generate_phantom",
    "hausdorff",
    "label_vertebrae",
    "load_config",
    "mask_from_assignment",
    "otsu_threshold",
    "parse_config",
    "quantize",
    "read_pgm",
    "read_ppm",
    "relabel_sequential",
    "run_benchmark",
    "run_morphology",
    "run_pipeline",
    "select_vertebra_cluster",
    "summarize",
    "time_call",
    "write_pgm",
    "write_ppm_overlay",
]
