"""End-to-end orchestration: config, per-image runs, batch benchmarking.

A run takes one gray image through smoothing, one of the three
segmentation methods, and the morphology chain, then scores the result
against a reference mask when one is supplied. The benchmark repeats that
over a list of images and aggregates Dice, Hausdorff, and timing into
N/mean/sd/sem tables, one row per method.

Timing note: ``elapsed_seconds`` covers only the method-specific
segmentation stage (threshold search or cluster fit plus mask
extraction), so the shared preprocessing and morphology do not blur the
comparison between methods. Files carrying elapsed values (``timing.csv``
and ``*.report.csv``) are the only outputs that vary between identical
runs; everything else is byte-stable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .clustering import (
    FuzzyCMeans,
    KMeans1D,
    mask_from_assignment,
    otsu_threshold,
    select_vertebra_cluster,
)
from .diffusion import diffuse, quantize
from .errors import ConfigError, DimensionMismatch, EmptyInput, MissingTruth
from .metrics import (
    REPORT_CSV_HEADER,
    STATS_CSV_HEADER,
    SegReport,
    StatsSummary,
    dice,
    hausdorff,
    summarize,
    time_call,
)
from .morphology import Component, MorphoParams, components_to_csv, run_morphology
from .raster import as_gray_image, as_mask, default_palette, write_pgm, write_ppm_overlay

METHODS = ("otsu", "kmeans", "fcm")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the pipeline, all with working defaults."""

    methods: tuple[str, ...] = METHODS
    out_dir: str = "out"
    vertebra_cluster: str | int = "brightest"
    diffusion_iterations: int = 10
    diffusion_kappa: float = 15.0
    diffusion_step: float = 0.25
    fcm_clusters: int = 3
    fcm_fuzzifier: float = 2.0
    fcm_epsilon: float = 1e-3
    fcm_max_iterations: int = 100
    fcm_seed: int = 0
    kmeans_clusters: int = 3
    kmeans_max_iterations: int = 100
    kmeans_seed: int = 0
    morpho_erosion_iterations: int = 1
    morpho_min_area_fraction: float = 0.005
    morpho_aspect_low: float = 1.5
    morpho_aspect_high: float = 2.0
    morpho_connectivity: int = 8

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("method set must not be empty")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigError(f"unknown method {method!r}, expected one of {METHODS}")
        if self.vertebra_cluster != "brightest" and not isinstance(self.vertebra_cluster, int):
            raise ConfigError(
                "vertebra_cluster must be 'brightest' or a cluster index, "
                f"got {self.vertebra_cluster!r}"
            )

    def morpho_params(self) -> MorphoParams:
        return MorphoParams(
            erosion_iterations=self.morpho_erosion_iterations,
            min_area_fraction=self.morpho_min_area_fraction,
            aspect_low=self.morpho_aspect_low,
            aspect_high=self.morpho_aspect_high,
            connectivity=self.morpho_connectivity,
        )


def _parse_methods(value: str) -> tuple[str, ...]:
    names = tuple(part.strip() for part in value.split(",") if part.strip())
    if not names:
        raise ConfigError("method list must not be empty")
    seen: list[str] = []
    for name in names:
        if name not in METHODS:
            raise ConfigError(f"unknown method {name!r}, expected one of {METHODS}")
        if name not in seen:
            seen.append(name)
    return tuple(seen)


def _parse_cluster_policy(value: str):
    if value == "brightest":
        return value
    try:
        return int(value)
    except ValueError:
        raise ConfigError(
            f"vertebra_cluster must be 'brightest' or an integer, got {value!r}"
        ) from None


def _parse_int(value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"expected an integer, got {value!r}") from None


def _parse_float(value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"expected a number, got {value!r}") from None


_CONFIG_KEYS = {
    "methods": ("methods", _parse_methods),
    "out": ("out_dir", str),
    "vertebra_cluster": ("vertebra_cluster", _parse_cluster_policy),
    "diffusion.iterations": ("diffusion_iterations", _parse_int),
    "diffusion.kappa": ("diffusion_kappa", _parse_float),
    "diffusion.step": ("diffusion_step", _parse_float),
    "fcm.clusters": ("fcm_clusters", _parse_int),
    "fcm.fuzzifier": ("fcm_fuzzifier", _parse_float),
    "fcm.epsilon": ("fcm_epsilon", _parse_float),
    "fcm.max_iterations": ("fcm_max_iterations", _parse_int),
    "fcm.seed": ("fcm_seed", _parse_int),
    "kmeans.clusters": ("kmeans_clusters", _parse_int),
    "kmeans.max_iterations": ("kmeans_max_iterations", _parse_int),
    "kmeans.seed": ("kmeans_seed", _parse_int),
    "morpho.erosion_iterations": ("morpho_erosion_iterations", _parse_int),
    "morpho.min_area_fraction": ("morpho_min_area_fraction", _parse_float),
    "morpho.aspect_low": ("morpho_aspect_low", _parse_float),
    "morpho.aspect_high": ("morpho_aspect_high", _parse_float),
    "morpho.connectivity": ("morpho_connectivity", _parse_int),
}


def parse_config(text: str) -> PipelineConfig:
    """Parse ``key = value`` lines into a config.

    Blank lines are skipped and everything after ``#`` is a comment. Every
    key has a default, so empty text yields the default config. Unknown
    keys are rejected rather than silently ignored.
    """
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        field_name, parser = _CONFIG_KEYS[key]
        overrides[field_name] = parser(value)
    return PipelineConfig(**overrides)


def load_config(path) -> PipelineConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


@dataclass
class PipelineResult:
    report: SegReport
    mask: np.ndarray
    label_map: np.ndarray
    components: list[Component]
    names: dict[int, str]
    paths: dict[str, Path] = field(default_factory=dict)


def _hausdorff_or_ceiling(mask: np.ndarray, truth: np.ndarray) -> float:
    """Symmetric Hausdorff distance, or the image diagonal when either
    mask is empty (nothing overlaps, so report the largest distance the
    frame allows)."""
    if mask.any() and truth.any():
        return hausdorff(mask, truth)
    h, w = mask.shape
    return float(np.hypot(h - 1, w - 1))


def _segment_once(pre: np.ndarray, cfg: PipelineConfig, method: str) -> np.ndarray:
    height, width = pre.shape
    if method == "otsu":
        return pre > otsu_threshold(pre)
    if method == "kmeans":
        model = KMeans1D(
            n_clusters=cfg.kmeans_clusters,
            max_iter=cfg.kmeans_max_iterations,
            random_state=cfg.kmeans_seed,
        ).fit(pre.ravel())
        index = select_vertebra_cluster(model.cluster_centers_, cfg.vertebra_cluster)
        return mask_from_assignment(model.labels_, index, width, height)
    if method == "fcm":
        model = FuzzyCMeans(
            n_clusters=cfg.fcm_clusters,
            fuzzifier=cfg.fcm_fuzzifier,
            tol=cfg.fcm_epsilon,
            max_iter=cfg.fcm_max_iterations,
            random_state=cfg.fcm_seed,
        ).fit(pre.ravel())
        index = select_vertebra_cluster(model.cluster_centers_, cfg.vertebra_cluster)
        return mask_from_assignment(model.labels_, index, width, height)
    raise ConfigError(f"unknown method {method!r}, expected one of {METHODS}")


def run_pipeline(
    image,
    truth=None,
    config: PipelineConfig | None = None,
    method: str = "fcm",
    stem: str = "image",
    out_dir=None,
    require_truth: bool = False,
) -> PipelineResult:
    """Segment one image with one method and optionally write artifacts.

    Metrics are filled in only when a reference mask is supplied;
    ``require_truth`` turns a missing reference into an error instead.
    """
    cfg = config if config is not None else PipelineConfig()
    img = as_gray_image(image)
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}, expected one of {METHODS}")
    if require_truth and truth is None:
        raise MissingTruth("metrics requested but no reference mask supplied")
    truth_mask = None
    if truth is not None:
        truth_mask = as_mask(truth)
        if truth_mask.shape != img.shape:
            raise DimensionMismatch(
                f"reference shape {truth_mask.shape} does not match image {img.shape}"
            )

    pre = quantize(
        diffuse(img, cfg.diffusion_iterations, cfg.diffusion_kappa, cfg.diffusion_step)
    )
    raw_mask, elapsed = time_call(lambda: _segment_once(pre, cfg, method))
    label_map, components, names = run_morphology(raw_mask, cfg.morpho_params())
    final = label_map > 0

    dice_value = hausdorff_value = None
    if truth_mask is not None:
        dice_value = dice(final, truth_mask)
        hausdorff_value = _hausdorff_or_ceiling(final, truth_mask)
    report = SegReport(
        method=method,
        dice=dice_value,
        hausdorff=hausdorff_value,
        elapsed_seconds=elapsed,
    )

    paths: dict[str, Path] = {}
    if out_dir is not None:
        paths = _write_artifacts(Path(out_dir), stem, method, img, final, label_map,
                                 components, names, report)
    return PipelineResult(report, final, label_map, components, names, paths)


def _write_artifacts(
    out_dir: Path,
    stem: str,
    method: str,
    image: np.ndarray,
    final: np.ndarray,
    label_map: np.ndarray,
    components: list[Component],
    names: dict[int, str],
    report: SegReport,
) -> dict[str, Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    prefix = f"{stem}.{method}"
    paths = {
        "mask": out_dir / f"{prefix}.mask.pgm",
        "labels": out_dir / f"{prefix}.labels.pgm",
        "overlay": out_dir / f"{prefix}.overlay.ppm",
        "components": out_dir / f"{prefix}.components.csv",
        "report": out_dir / f"{prefix}.report.csv",
    }
    paths["mask"].write_bytes(write_pgm(final.astype(np.uint8) * 255))
    max_label = int(label_map.max()) if label_map.size else 0
    if max_label > 255:
        raise ConfigError(f"label map holds {max_label} labels, PGM carries at most 255")
    paths["labels"].write_bytes(write_pgm(label_map.astype(np.uint8)))
    palette = default_palette(max_label)
    paths["overlay"].write_bytes(write_ppm_overlay(image, label_map, palette))
    paths["components"].write_text(components_to_csv(components, names), encoding="utf-8")
    paths["report"].write_text(
        REPORT_CSV_HEADER + "\n" + report.csv_row() + "\n", encoding="utf-8"
    )
    return paths


@dataclass
class BenchmarkResult:
    reports: dict[str, list[SegReport]]
    summaries: dict[str, dict[str, StatsSummary]]
    paths: dict[str, Path] = field(default_factory=dict)


def run_benchmark(
    inputs,
    config: PipelineConfig | None = None,
    out_dir=None,
    stems=None,
) -> BenchmarkResult:
    """Run every configured method over (image, truth) pairs serially.

    Produces one summary row per method for each of Dice, Hausdorff, and
    elapsed seconds. Writes ``benchmark.csv`` with the two agreement
    tables and ``timing.csv`` with the timing table when ``out_dir`` is
    given; per-image artifacts land next to them.
    """
    cfg = config if config is not None else PipelineConfig()
    pairs = list(inputs)
    if not pairs:
        raise EmptyInput("benchmark needs at least one (image, truth) pair")
    if stems is None:
        stems = [f"case{i:03d}" for i in range(len(pairs))]

    reports: dict[str, list[SegReport]] = {method: [] for method in cfg.methods}
    for stem, (image, truth) in zip(stems, pairs):
        if truth is None:
            raise MissingTruth(f"benchmark input {stem!r} lacks a reference mask")
        for method in cfg.methods:
            result = run_pipeline(
                image, truth, cfg, method=method, stem=stem, out_dir=out_dir
            )
            reports[method].append(result.report)

    summaries = {
        "dice": {
            m: summarize([r.dice for r in reports[m]]) for m in cfg.methods
        },
        "hausdorff": {
            m: summarize([r.hausdorff for r in reports[m]]) for m in cfg.methods
        },
        "elapsed_seconds": {
            m: summarize([r.elapsed_seconds for r in reports[m]]) for m in cfg.methods
        },
    }

    paths: dict[str, Path] = {}
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        agreement_lines = [STATS_CSV_HEADER]
        for metric in ("dice", "hausdorff"):
            for method in cfg.methods:
                agreement_lines.append(summaries[metric][method].csv_row(f"{metric}.{method}"))
        paths["benchmark"] = out / "benchmark.csv"
        paths["benchmark"].write_text("\n".join(agreement_lines) + "\n", encoding="utf-8")
        timing_lines = [STATS_CSV_HEADER]
        for method in cfg.methods:
            timing_lines.append(
                summaries["elapsed_seconds"][method].csv_row(f"elapsed.{method}")
            )
        paths["timing"] = out / "timing.csv"
        paths["timing"].write_text("\n".join(timing_lines) + "\n", encoding="utf-8")
    return BenchmarkResult(reports, summaries, paths)
