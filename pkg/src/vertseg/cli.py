"""Command-line front end: segment, phantom, and bench subcommands."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import ConfigError, DataError, FormatError
from .metrics import StatsSummary
from .phantom import PhantomSpec, generate_phantom
from .pipeline import METHODS, PipelineConfig, load_config, run_benchmark, run_pipeline
from .raster import read_pgm, write_pgm

EXIT_OK = 0
EXIT_FORMAT = 2
EXIT_DATA = 3
EXIT_CONFIG = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vertseg",
        description="Segment and label vertebral bodies in sagittal PGM images.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment one PGM image")
    seg.add_argument("input", help="path to a binary PGM (P5) image")
    seg.add_argument("--truth", help="reference mask PGM for Dice and Hausdorff")
    seg.add_argument("--method", choices=METHODS, default="fcm")
    seg.add_argument("--config", help="path to a key = value config file")
    seg.add_argument("--out", help="output directory (default from config)")

    pha = sub.add_parser("phantom", help="write a synthetic image and its truth mask")
    pha.add_argument("--seed", type=int, default=0)
    pha.add_argument("--bodies", type=int, default=5)
    pha.add_argument("--noise", type=float, default=0.0)
    pha.add_argument("--bias", type=float, default=0.0)
    pha.add_argument("--out", default="out")

    ben = sub.add_parser("bench", help="benchmark every configured method")
    ben.add_argument("--manifest", required=True,
                     help="text file of image_path,truth_path lines")
    ben.add_argument("--config", help="path to a key = value config file")
    ben.add_argument("--out", help="output directory (default from config)")
    return parser


def _load_pgm(path: str):
    return read_pgm(Path(path).read_bytes())


def _config_from(args) -> PipelineConfig:
    return load_config(args.config) if args.config else PipelineConfig()


def cmd_segment(args) -> int:
    cfg = _config_from(args)
    out_dir = args.out if args.out else cfg.out_dir
    image = _load_pgm(args.input)
    truth = _load_pgm(args.truth) > 0 if args.truth else None
    stem = Path(args.input).stem
    result = run_pipeline(
        image, truth, cfg, method=args.method, stem=stem, out_dir=out_dir
    )
    named = ", ".join(
        f"{result.names[k]}=#{k}" for k in sorted(result.names)
    ) or "none"
    print(f"{stem}: method={args.method} components={len(result.components)} named={named}")
    report = result.report
    if report.dice is not None:
        print(f"{stem}: dice={report.dice:.4f} hausdorff={report.hausdorff:.4f}")
    print(f"{stem}: elapsed={report.elapsed_seconds:.4f}s")
    for kind, path in result.paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


def cmd_phantom(args) -> int:
    spec = PhantomSpec(
        seed=args.seed,
        num_bodies=args.bodies,
        noise_sigma=args.noise,
        bias_amplitude=args.bias,
    )
    image, truth, names = generate_phantom(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    image_path = out / f"phantom-s{args.seed}.pgm"
    truth_path = out / f"phantom-s{args.seed}.truth.pgm"
    image_path.write_bytes(write_pgm(image))
    truth_path.write_bytes(write_pgm(truth.astype("uint8") * 255))
    print(f"wrote image: {image_path}")
    print(f"wrote truth: {truth_path}")
    print(f"bodies bottom-up: {', '.join(names)}")
    print(f"manifest line: {image_path},{truth_path}")
    return EXIT_OK


def _parse_manifest(path: str) -> list[tuple[Path, Path]]:
    manifest = Path(path)
    base = manifest.parent
    pairs: list[tuple[Path, Path]] = []
    for lineno, raw in enumerate(manifest.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 2 or not all(parts):
            raise ConfigError(
                f"{path}:{lineno}: expected 'image_path,truth_path', got {raw!r}"
            )
        image_path = Path(parts[0])
        truth_path = Path(parts[1])
        pairs.append(
            (
                image_path if image_path.is_absolute() else base / image_path,
                truth_path if truth_path.is_absolute() else base / truth_path,
            )
        )
    if not pairs:
        raise ConfigError(f"manifest {path} lists no inputs")
    return pairs


def _print_table(title: str, rows: dict[str, StatsSummary]) -> None:
    print(title)
    print(f"  {'method':<8} {'n':>4} {'mean':>12} {'sd':>12} {'sem':>12}")
    for method, stats in rows.items():
        print(
            f"  {method:<8} {stats.n:>4} {stats.mean:>12.5g} "
            f"{stats.sd:>12.5g} {stats.sem:>12.5g}"
        )


def cmd_bench(args) -> int:
    cfg = _config_from(args)
    out_dir = args.out if args.out else cfg.out_dir
    pairs = _parse_manifest(args.manifest)
    inputs = []
    stems = []
    for image_path, truth_path in pairs:
        inputs.append((_load_pgm(image_path), _load_pgm(truth_path) > 0))
        stems.append(Path(image_path).stem)
    result = run_benchmark(inputs, cfg, out_dir=out_dir, stems=stems)
    _print_table("dice", result.summaries["dice"])
    _print_table("hausdorff", result.summaries["hausdorff"])
    _print_table("elapsed seconds", result.summaries["elapsed_seconds"])
    for kind, path in result.paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"segment": cmd_segment, "phantom": cmd_phantom, "bench": cmd_bench}
    try:
        return handlers[args.command](args)
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
