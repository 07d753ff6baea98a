"""Command line interface.

Subcommands: `run` executes a configured benchmark, `fuse` runs one method
on a PAN/MS pair, `metrics` scores a fused image, `synth` generates a
seeded synthetic dataset plus a ready-to-run config. Exit codes: 0 on
success, 1 when some benchmark methods failed, 2 on config or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import (
    emit_report,
    infer_format,
    load_config,
    metrics_to_dict,
    render_report,
    report_filename,
    run_benchmark,
    synth_dataset,
)
from .fusion import METHODS, FusionParams, fuse
from .metrics import full_report
from .preprocess import upsample
from .raster import FormatError, load_image, save_image

_DEFAULT_METHODS = (
    "brovey",
    "ihs",
    "adaptive_ihs",
    "pca",
    "hpf",
    "dwt_atrous",
    "dwt_mallat",
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pansharp",
        description="Pansharpening toolkit: fusion methods and quality benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a benchmark from a JSON config")
    p_run.add_argument("--config", required=True, help="path to the config document")
    p_run.add_argument(
        "--workers", type=int, default=None, help="parallel method workers"
    )

    p_fuse = sub.add_parser("fuse", help="fuse one PAN/MS pair with one method")
    p_fuse.add_argument("--method", required=True, choices=sorted(METHODS))
    p_fuse.add_argument("--ms", required=True, help="multispectral image path")
    p_fuse.add_argument("--pan", required=True, help="panchromatic image path")
    p_fuse.add_argument("--out", required=True, help="output image path")
    p_fuse.add_argument("--ratio", type=int, default=4)
    p_fuse.add_argument("--levels", type=int, default=2)
    p_fuse.add_argument("--rule", choices=("additive", "substitutive"), default="additive")
    p_fuse.add_argument(
        "--resample", choices=("nearest", "bilinear", "bicubic"), default="bicubic"
    )
    p_fuse.add_argument("--histmatch", choices=("mean_std", "cdf"), default="mean_std")

    p_met = sub.add_parser("metrics", help="score a fused image against a reference")
    p_met.add_argument("--ref", required=True, help="reference MS image path")
    p_met.add_argument("--fused", required=True, help="fused image path")
    p_met.add_argument("--pan", required=True, help="panchromatic image path")
    p_met.add_argument("--ratio-hl", type=float, default=0.25, help="PAN/MS pixel size ratio h/l")
    p_met.add_argument("--json", action="store_true", help="emit JSON instead of text")

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    p_synth.add_argument("--seed", type=int, required=True)
    p_synth.add_argument("--size", type=int, required=True, help="truth/PAN size in pixels")
    p_synth.add_argument("--ratio", type=int, default=4)
    p_synth.add_argument("--bands", type=int, default=3)
    p_synth.add_argument("--out-dir", required=True)
    return parser


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    report = run_benchmark(cfg, workers=args.workers)
    out_dir = Path(cfg.output_dir)
    for fmt in cfg.report_formats:
        emit_report(report, fmt, out_dir / report_filename(cfg.name, fmt))
    sys.stdout.write(render_report(report, "text-table"))
    return 1 if report.failed else 0


def _save_auto(img, path) -> None:
    fmt = infer_format(path)
    if fmt == "raw-f64":
        save_image(img, path, "raw-f64")
    else:
        save_image(img, path, f"{fmt}16", clamp="clamp_to_depth")


def _cmd_fuse(args) -> int:
    ms = load_image(args.ms, infer_format(args.ms))
    pan_img = load_image(args.pan, infer_format(args.pan))
    if pan_img.band_count != 1:
        raise ValueError(f"PAN image must be single-band, got {pan_img.band_count}")
    params = FusionParams(
        method=args.method,
        ratio=args.ratio,
        levels=args.levels,
        dwt_rule=args.rule,
        resample=args.resample,
        histmatch=args.histmatch,
    )
    try:
        result = fuse(ms, pan_img.bands[0], params)
    except Exception as exc:
        print(f"fusion failed: {exc}", file=sys.stderr)
        return 1
    _save_auto(result.fused, args.out)
    d = result.diagnostics
    print(f"{args.method}: wrote {args.out}")
    print(f"injected detail energy: {d.injected_detail_energy:.6g}")
    if d.solved_alpha is not None:
        print("intensity weights:", " ".join(f"{a:.6f}" for a in d.solved_alpha))
    if d.pca_eigenvalues is not None:
        print("pca eigenvalues:", " ".join(f"{v:.6g}" for v in d.pca_eigenvalues))
    return 0


def _cmd_metrics(args) -> int:
    ref = load_image(args.ref, infer_format(args.ref))
    fused = load_image(args.fused, infer_format(args.fused))
    pan_img = load_image(args.pan, infer_format(args.pan))
    if pan_img.band_count != 1:
        raise ValueError(f"PAN image must be single-band, got {pan_img.band_count}")
    if (ref.height, ref.width) != (fused.height, fused.width):
        if fused.height % ref.height or fused.width % ref.width:
            raise ValueError(
                f"reference {ref.height}x{ref.width} does not divide fused "
                f"{fused.height}x{fused.width}"
            )
        factor = fused.height // ref.height
        if ref.width * factor != fused.width:
            raise ValueError("reference/fused aspect ratios differ")
        ref = upsample(ref, factor, "bicubic")
    report = full_report(ref, fused, pan_img.bands[0], args.ratio_hl)
    if args.json:
        print(json.dumps(metrics_to_dict(report), indent=2))
        return 0
    for name in ("cc", "ergas", "quality", "rase", "rmse", "scc"):
        print(f"{name:<8}{getattr(report, name):.4f}")
    for i, b in enumerate(report.per_band):
        print(f"band {i}: cc={b.cc:.4f} rmse={b.rmse:.4f} uqi={b.uqi:.4f}")
    return 0


def _cmd_synth(args) -> int:
    ds = synth_dataset(args.seed, args.size, args.ratio, args.bands)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    save_image(ds.truth, out_dir / "truth.f64", "raw-f64")
    save_image(ds.ms, out_dir / "ms.f64", "raw-f64")
    from .raster import MultiBandImage

    save_image(MultiBandImage((ds.pan,)), out_dir / "pan.f64", "raw-f64")
    config = {
        "name": f"synth-{args.seed}",
        "ms_path": str(out_dir / "ms.f64"),
        "pan_path": str(out_dir / "pan.f64"),
        "truth_path": str(out_dir / "truth.f64"),
        "output_dir": str(out_dir / "results"),
        "ratio": args.ratio,
        "methods": list(_DEFAULT_METHODS),
        "report_formats": ["csv", "json", "text-table"],
    }
    config_path = out_dir / "config.json"
    config_path.write_text(json.dumps(config, indent=2) + "\n")
    print(f"wrote {out_dir / 'truth.f64'}, ms.f64, pan.f64 and {config_path}")
    print(f"run the benchmark with: pansharp run --config {config_path}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "fuse": _cmd_fuse,
    "metrics": _cmd_metrics,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (OSError, ValueError, FormatError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
