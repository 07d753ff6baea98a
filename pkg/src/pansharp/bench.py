"""Benchmark harness: dataset config, synthetic data, consistency checks,
method matrix execution and report rendering (csv / json / text table)."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fusion import FusionParams, fuse
from .metrics import BandMetrics, MetricReport, cc, full_report, rmse, uqi
from .metrics import ergas as ergas_metric
from .metrics import rase as rase_metric
from .preprocess import downsample, upsample
from .raster import MultiBandImage, Raster, load_image, save_image

__all__ = [
    "REPORT_FORMATS",
    "DatasetConfig",
    "MethodRow",
    "BenchmarkReport",
    "SynthDataset",
    "best_per_metric",
    "run_benchmark",
    "wald_consistency",
    "synth_dataset",
    "render_report",
    "emit_report",
    "report_to_dict",
    "report_from_dict",
    "metrics_to_dict",
    "metrics_from_dict",
    "load_config",
    "infer_format",
]

REPORT_FORMATS = ("csv", "json", "text-table")

#: Higher is better for these columns, lower for the rest.
_HIGHER_BETTER = ("cc", "quality", "scc")
_LOWER_BETTER = ("ergas", "rase", "rmse")
_METRIC_ORDER = ("cc", "ergas", "quality", "rase", "rmse", "scc")
_METRIC_LABELS = {
    "cc": "CC",
    "ergas": "ERGAS",
    "quality": "Quality",
    "rase": "RASE",
    "rmse": "RMSE",
    "scc": "SCC",
}

_SUFFIX_FORMATS = {
    ".png": "png",
    ".tif": "tiff",
    ".tiff": "tiff",
    ".f64": "raw-f64",
    ".psrw": "raw-f64",
    ".raw": "raw-f64",
}


def infer_format(path) -> str:
    suffix = Path(path).suffix.lower()
    if suffix not in _SUFFIX_FORMATS:
        raise ValueError(f"cannot infer image format from suffix {suffix!r}")
    return _SUFFIX_FORMATS[suffix]


@dataclass(frozen=True)
class DatasetConfig:
    """One benchmark run: input paths, the method list, output settings.

    truth_path is optional; when set (synthetic datasets) each row gains a
    synthesis section scoring the fused image against the known
    high-resolution truth. ergas_ratio defaults to 1/ratio.
    """

    name: str
    ms_path: str
    pan_path: str
    output_dir: str
    methods: tuple[FusionParams, ...]
    ratio: int = 4
    report_formats: tuple[str, ...] = REPORT_FORMATS
    truth_path: str | None = None
    ergas_ratio: float | None = None

    def __post_init__(self):
        if not self.name:
            raise ValueError("dataset name must be non-empty")
        if not isinstance(self.ratio, int) or self.ratio < 1:
            raise ValueError(f"ratio must be an integer >= 1, got {self.ratio!r}")
        methods = tuple(self.methods)
        if not methods:
            raise ValueError("config needs at least one method")
        for m in methods:
            if not isinstance(m, FusionParams):
                raise ValueError(f"methods entries must be FusionParams, got {m!r}")
        object.__setattr__(self, "methods", methods)
        formats = tuple(self.report_formats)
        for f in formats:
            if f not in REPORT_FORMATS:
                raise ValueError(f"unknown report format {f!r}")
        object.__setattr__(self, "report_formats", formats)
        paths = [self.ms_path, self.pan_path]
        if self.truth_path is not None:
            paths.append(self.truth_path)
        if len(set(paths)) != len(paths):
            raise ValueError("dataset paths must be distinct")

    @property
    def resolved_ergas_ratio(self) -> float:
        return self.ergas_ratio if self.ergas_ratio is not None else 1.0 / self.ratio


@dataclass(frozen=True)
class MethodRow:
    """Outcome for one configured method; metrics is None when it failed."""

    method: str
    metrics: MetricReport | None
    synthesis: MetricReport | None
    error: str | None


@dataclass(frozen=True)
class BenchmarkReport:
    dataset: str
    rows: tuple[MethodRow, ...]
    best_per_metric: dict[str, str]
    runtimes: dict[str, float]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    @property
    def failed(self) -> tuple[str, ...]:
        return tuple(r.method for r in self.rows if r.error is not None)


def best_per_metric(rows) -> dict[str, str]:
    """Winning method per column: max for cc/quality/scc, min for the rest."""
    best: dict[str, str] = {}
    for metric in _METRIC_ORDER:
        candidates = [
            (getattr(r.metrics, metric), r.method)
            for r in rows
            if r.metrics is not None and getattr(r.metrics, metric) is not None
        ]
        if not candidates:
            continue
        pick = max if metric in _HIGHER_BETTER else min
        best[metric] = pick(candidates, key=lambda t: t[0])[1]
    return best


# ---------------------------------------------------------------------------
# Wald consistency and synthetic data
# ---------------------------------------------------------------------------


def wald_consistency(
    fused: MultiBandImage, original_ms: MultiBandImage, ratio: int
) -> MetricReport:
    """Score the fused image against the original MS at MS resolution.

    The fused image is reduced by box-mean and compared band-by-band with
    the untouched original. A faithful method scores near cc=1 here. No
    PAN band exists at this resolution, so scc is None.
    """
    k = int(ratio)
    if (fused.height, fused.width) != (original_ms.height * k, original_ms.width * k):
        raise ValueError(
            f"fused is {fused.height}x{fused.width}, expected "
            f"{original_ms.height * k}x{original_ms.width * k}"
        )
    down = downsample(fused, k, "box_mean")
    per_band = tuple(
        BandMetrics(cc=cc(rb, fb), rmse=rmse(rb, fb), uqi=uqi(rb, fb))
        for rb, fb in zip(original_ms.bands, down.bands)
    )
    n = len(per_band)
    return MetricReport(
        per_band=per_band,
        cc=sum(b.cc for b in per_band) / n,
        ergas=ergas_metric(original_ms, down, 1.0 / k),
        quality=sum(b.uqi for b in per_band) / n,
        rase=rase_metric(original_ms, down),
        rmse=sum(b.rmse for b in per_band) / n,
        scc=None,
        ratio_h_over_l=1.0 / k,
    )


@dataclass(frozen=True, eq=False)
class SynthDataset:
    truth: MultiBandImage
    ms: MultiBandImage
    pan: Raster
    pan_weights: tuple[float, ...]


def _blob_field(rng: np.random.Generator, size: int, n_blobs: int) -> np.ndarray:
    y = np.arange(size, dtype=np.float64)[:, None]
    x = np.arange(size, dtype=np.float64)[None, :]
    field = np.zeros((size, size))
    for _ in range(n_blobs):
        cy, cx = rng.uniform(0.0, size, 2)
        sigma = rng.uniform(size / 20.0, size / 6.0)
        amp = rng.uniform(-1.0, 1.0)
        field += amp * np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2.0 * sigma * sigma))
    return field


def _rescale(field: np.ndarray, lo: float, hi: float) -> np.ndarray:
    span = field.max() - field.min()
    if span < 1e-9:
        y = np.arange(field.shape[0], dtype=np.float64)[:, None]
        x = np.arange(field.shape[1], dtype=np.float64)[None, :]
        field = field + (x + y)
        span = field.max() - field.min()
    return lo + (field - field.min()) * (hi - lo) / span


def synth_dataset(
    seed: int, truth_size: int, ratio: int, band_count: int = 3
) -> SynthDataset:
    """Deterministic synthetic scene: smooth truth, reduced MS, weighted PAN.

    Each truth band is a positive smooth field (shared Gaussian blobs plus
    a per-band blob component and a linear gradient; the shared term gives
    the bands the strong mutual correlation of real MS imagery). The MS
    image is the box-mean reduction of the truth by `ratio`; PAN is a
    seeded positive-weighted band mean of the truth. Identical seeds give
    bit-identical outputs.
    """
    if truth_size % ratio:
        raise ValueError(f"truth_size {truth_size} not divisible by ratio {ratio}")
    if band_count < 1:
        raise ValueError("band_count must be >= 1")
    rng = np.random.default_rng(seed)
    shared = _blob_field(rng, truth_size, 24)
    y = np.arange(truth_size, dtype=np.float64)[:, None] / truth_size
    x = np.arange(truth_size, dtype=np.float64)[None, :] / truth_size
    bands = []
    for _ in range(band_count):
        own = _blob_field(rng, truth_size, 12)
        gx, gy = rng.uniform(-0.5, 0.5, 2)
        bands.append(_rescale(shared + 0.35 * own + gx * x + gy * y, 30.0, 230.0))
    stack = np.stack(bands)
    weights = rng.uniform(0.8, 1.2, band_count)
    weights = weights / weights.sum()
    truth = MultiBandImage.from_stack(stack)
    return SynthDataset(
        truth=truth,
        ms=downsample(truth, ratio, "box_mean"),
        pan=Raster(np.tensordot(weights, stack, axes=1)),
        pan_weights=tuple(float(w) for w in weights),
    )


# ---------------------------------------------------------------------------
# Benchmark execution
# ---------------------------------------------------------------------------


def _unique_labels(methods) -> list[str]:
    seen: dict[str, int] = {}
    labels = []
    for p in methods:
        n = seen.get(p.method, 0) + 1
        seen[p.method] = n
        labels.append(p.method if n == 1 else f"{p.method}-{n}")
    return labels


def run_benchmark(cfg: DatasetConfig, workers: int | None = None) -> BenchmarkReport:
    """Run every configured method, score it, save its fused image.

    Per-method failures are captured in the row's error field and do not
    abort the remaining methods. Rows keep the configured order and the
    result is deterministic for fixed inputs (runtimes aside). Methods run
    concurrently over the shared read-only inputs.
    """
    ms = load_image(cfg.ms_path, infer_format(cfg.ms_path))
    pan_img = load_image(cfg.pan_path, infer_format(cfg.pan_path))
    if pan_img.band_count != 1:
        raise ValueError(f"PAN image must be single-band, got {pan_img.band_count}")
    pan = pan_img.bands[0]
    if (pan.height, pan.width) != (ms.height * cfg.ratio, ms.width * cfg.ratio):
        raise ValueError(
            f"PAN {pan.height}x{pan.width} does not match MS "
            f"{ms.height}x{ms.width} at ratio {cfg.ratio}"
        )
    truth = None
    if cfg.truth_path is not None:
        truth = load_image(cfg.truth_path, infer_format(cfg.truth_path))
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    labels = _unique_labels(cfg.methods)

    def run_one(label: str, params: FusionParams) -> tuple[MethodRow, float]:
        start = time.perf_counter()
        try:
            reference = upsample(ms, cfg.ratio, params.resample)
            result = fuse(ms, pan, params)
            report = full_report(reference, result.fused, pan, cfg.resolved_ergas_ratio)
            synthesis = None
            if truth is not None:
                synthesis = full_report(
                    truth, result.fused, pan, cfg.resolved_ergas_ratio
                )
            save_image(result.fused, out_dir / f"{cfg.name}_{label}.f64", "raw-f64")
            row = MethodRow(method=label, metrics=report, synthesis=synthesis, error=None)
        except Exception as exc:  # per-method isolation
            row = MethodRow(method=label, metrics=None, synthesis=None, error=str(exc))
        return row, time.perf_counter() - start

    n_workers = workers if workers is not None else min(4, len(cfg.methods))
    if n_workers > 1 and len(cfg.methods) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            outcomes = list(pool.map(run_one, labels, cfg.methods))
    else:
        outcomes = [run_one(lbl, p) for lbl, p in zip(labels, cfg.methods)]

    rows = tuple(row for row, _ in outcomes)
    runtimes = {row.method: dt for row, dt in outcomes}
    return BenchmarkReport(
        dataset=cfg.name,
        rows=rows,
        best_per_metric=best_per_metric(rows),
        runtimes=runtimes,
    )


# ---------------------------------------------------------------------------
# Report serialization and rendering
# ---------------------------------------------------------------------------


def metrics_to_dict(m: MetricReport | None):
    if m is None:
        return None
    return {
        "cc": m.cc,
        "ergas": m.ergas,
        "quality": m.quality,
        "rase": m.rase,
        "rmse": m.rmse,
        "scc": m.scc,
        "ratio_h_over_l": m.ratio_h_over_l,
        "per_band": [
            {"cc": b.cc, "rmse": b.rmse, "uqi": b.uqi} for b in m.per_band
        ],
    }


def metrics_from_dict(d) -> MetricReport | None:
    if d is None:
        return None
    return MetricReport(
        per_band=tuple(BandMetrics(**b) for b in d["per_band"]),
        cc=d["cc"],
        ergas=d["ergas"],
        quality=d["quality"],
        rase=d["rase"],
        rmse=d["rmse"],
        scc=d["scc"],
        ratio_h_over_l=d["ratio_h_over_l"],
    )


def report_to_dict(report: BenchmarkReport) -> dict:
    return {
        "dataset": report.dataset,
        "rows": [
            {
                "method": r.method,
                "metrics": metrics_to_dict(r.metrics),
                "synthesis": metrics_to_dict(r.synthesis),
                "error": r.error,
            }
            for r in report.rows
        ],
        "best_per_metric": dict(report.best_per_metric),
        "runtimes": dict(report.runtimes),
    }


def report_from_dict(d: dict) -> BenchmarkReport:
    return BenchmarkReport(
        dataset=d["dataset"],
        rows=tuple(
            MethodRow(
                method=r["method"],
                metrics=metrics_from_dict(r["metrics"]),
                synthesis=metrics_from_dict(r["synthesis"]),
                error=r["error"],
            )
            for r in d["rows"]
        ),
        best_per_metric=dict(d["best_per_metric"]),
        runtimes=dict(d["runtimes"]),
    )


def _render_csv(report: BenchmarkReport) -> str:
    lines = ["method,cc,ergas,quality,rase,rmse,scc"]
    for row in report.rows:
        if row.metrics is None:
            continue
        cells = [row.method]
        for metric in _METRIC_ORDER:
            v = getattr(row.metrics, metric)
            cells.append("" if v is None else f"{v:.4f}")
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _render_text_table(report: BenchmarkReport) -> str:
    rows = [r for r in report.rows if r.metrics is not None]
    widths = [max(len(r.method), 8) + 2 for r in rows]
    label_w = max([len(_METRIC_LABELS[m]) for m in _METRIC_ORDER] + [len("metric")])
    lines = [f"dataset: {report.dataset}"]
    header = "metric".ljust(label_w) + "".join(
        r.method.rjust(w) for r, w in zip(rows, widths)
    )
    lines.append(header)
    for metric in _METRIC_ORDER:
        cells = []
        for r, w in zip(rows, widths):
            v = getattr(r.metrics, metric)
            if v is None:
                cells.append("-".rjust(w))
                continue
            text = f"{v:.4f}"
            if report.best_per_metric.get(metric) == r.method:
                text = "*" + text
            cells.append(text.rjust(w))
        lines.append(_METRIC_LABELS[metric].ljust(label_w) + "".join(cells))
    failed = [r for r in report.rows if r.error is not None]
    if failed:
        lines.append("")
        for r in failed:
            lines.append(f"{r.method} failed: {r.error}")
    lines.append("")
    lines.append("* best value per metric (higher is better for CC/Quality/SCC,")
    lines.append("  lower for ERGAS/RASE/RMSE)")
    return "\n".join(lines) + "\n"


def render_report(report: BenchmarkReport, fmt: str) -> str:
    """Render to one of csv, json or text-table.

    csv: one 4-decimal row per successful method. json: the complete
    structure including per-band values, errors and runtimes; parsing it
    back with report_from_dict reproduces the report. text-table: metric
    rows against method columns with the best value per metric starred.
    """
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt == "text-table":
        return _render_text_table(report)
    raise ValueError(f"unknown report format {fmt!r}")


_FORMAT_SUFFIX = {"csv": ".csv", "json": ".json", "text-table": ".txt"}


def emit_report(report: BenchmarkReport, fmt: str, path) -> Path:
    """Render and write a report; returns the written path."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(report, fmt))
    return path


def report_filename(name: str, fmt: str) -> str:
    return f"{name}_report{_FORMAT_SUFFIX[fmt]}"


# ---------------------------------------------------------------------------
# Config files
# ---------------------------------------------------------------------------

_CONFIG_KEYS = {
    "name",
    "ms_path",
    "pan_path",
    "output_dir",
    "methods",
    "ratio",
    "report_formats",
    "truth_path",
    "ergas_ratio",
}


def _params_from_entry(entry, ratio: int) -> FusionParams:
    if isinstance(entry, str):
        return FusionParams(method=entry, ratio=ratio)
    if not isinstance(entry, dict):
        raise ValueError(f"method entry must be a string or object, got {entry!r}")
    entry = dict(entry)
    entry.setdefault("ratio", ratio)
    if "alpha" in entry and entry["alpha"] is not None:
        entry["alpha"] = tuple(entry["alpha"])
    if "hpf_kernel" in entry and entry["hpf_kernel"] is not None:
        from .multires import Kernel2D

        entry["hpf_kernel"] = Kernel2D(np.asarray(entry["hpf_kernel"], dtype=float))
    return FusionParams(**entry)


def load_config(path) -> DatasetConfig:
    """Parse a JSON config document mirroring DatasetConfig.

    Method entries are either a method id string or an object with
    FusionParams fields; the dataset ratio is inherited unless overridden.
    """
    doc = json.loads(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValueError("config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    for key in ("name", "ms_path", "pan_path", "output_dir", "methods"):
        if key not in doc:
            raise ValueError(f"config missing required key {key!r}")
    ratio = int(doc.get("ratio", 4))
    methods = tuple(_params_from_entry(e, ratio) for e in doc["methods"])
    return DatasetConfig(
        name=doc["name"],
        ms_path=doc["ms_path"],
        pan_path=doc["pan_path"],
        output_dir=doc["output_dir"],
        methods=methods,
        ratio=ratio,
        report_formats=tuple(doc.get("report_formats", REPORT_FORMATS)),
        truth_path=doc.get("truth_path"),
        ergas_ratio=doc.get("ergas_ratio"),
    )
