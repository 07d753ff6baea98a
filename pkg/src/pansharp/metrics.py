"""Spectral and spatial quality indices for pansharpened imagery.

All metrics compare a fused image F against a reference R of identical
dimensions (the benchmark upsamples the original MS image to the fused
grid). Statistics use the population (1/n) convention throughout, which
makes the universal quality index factor exactly into correlation,
luminance and contrast terms. Everything is computed in float64 with no
clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .multires import Kernel2D, convolve2d
from .raster import MultiBandImage, Raster

__all__ = [
    "MetricError",
    "BandMetrics",
    "MetricReport",
    "cc",
    "rmse",
    "rase",
    "uqi",
    "ergas",
    "scc",
    "full_report",
    "SCC_KERNEL",
]


class MetricError(ValueError):
    """Raised when a metric is undefined for the given inputs."""


#: Laplacian used for the spatial correlation metric (replicate boundary).
SCC_KERNEL = Kernel2D.laplacian8()


@dataclass(frozen=True)
class BandMetrics:
    """Per-band scores: correlation, root-mean-square error, quality index."""

    cc: float
    rmse: float
    uqi: float


@dataclass(frozen=True)
class MetricReport:
    """One result row: per-band scores plus the six aggregate columns.

    Aggregate cc/rmse/quality are unweighted means over bands; rase and
    ergas come from their multi-band formulas; scc is None when no PAN
    band was available (consistency checks at MS resolution).
    """

    per_band: tuple[BandMetrics, ...]
    cc: float
    ergas: float
    quality: float
    rase: float
    rmse: float
    scc: float | None
    ratio_h_over_l: float

    def __post_init__(self):
        for name in ("cc", "quality", "scc"):
            v = getattr(self, name)
            if v is not None and abs(v) > 1.0 + 1e-9:
                raise ValueError(f"{name}={v} outside [-1, 1]")
        for name in ("ergas", "rase", "rmse"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        object.__setattr__(self, "per_band", tuple(self.per_band))


def _check_dims(a, b, what: str):
    if (a.height, a.width) != (b.height, b.width):
        raise MetricError(
            f"{what}: dimensions differ ({a.height}x{a.width} vs {b.height}x{b.width})"
        )


def _check_bands(r: MultiBandImage, f: MultiBandImage):
    if r.band_count != f.band_count:
        raise MetricError(
            f"band counts differ ({r.band_count} vs {f.band_count})"
        )
    _check_dims(r, f, "multi-band metric")


def _cc(a, b) -> float:
    da = a - a.mean()
    db = b - b.mean()
    sa = float((da * da).sum())
    sb = float((db * db).sum())
    if sa == 0.0 or sb == 0.0:
        raise MetricError("correlation undefined: constant input")
    return float((da * db).sum()) / math.sqrt(sa * sb)


def _rmse(a, b) -> float:
    d = a - b
    return math.sqrt(float((d * d).mean()))


def _uqi(a, b) -> float:
    ma, mb = float(a.mean()), float(b.mean())
    va = float(((a - ma) ** 2).mean())
    vb = float(((b - mb) ** 2).mean())
    cov = float(((a - ma) * (b - mb)).mean())
    denom = (va + vb) * (ma * ma + mb * mb)
    if denom == 0.0:
        raise MetricError(
            "quality index undefined: both inputs constant or both zero-mean"
        )
    return 4.0 * cov * ma * mb / denom


def cc(r: Raster, f: Raster) -> float:
    """Pearson correlation coefficient, computed globally.

    Symmetric, bounded in [-1, 1], invariant to positive affine maps of
    either argument. Reaches 1 when the images agree up to such a map.
    """
    _check_dims(r, f, "cc")
    return _cc(r.data, f.data)


def rmse(r: Raster, f: Raster) -> float:
    """Root-mean-square sample difference: sqrt(mean |R - F|^2)."""
    _check_dims(r, f, "rmse")
    return _rmse(r.data, f.data)


def rase(r: MultiBandImage, f: MultiBandImage) -> float:
    """Relative average spectral error.

    (100 / mu) * sqrt(mean_i RMSE^2(band_i)) where mu is the mean radiance
    of the reference over all bands and pixels. Zero iff F equals R.
    """
    _check_bands(r, f)
    mu = float(r.to_stack().mean())
    if mu == 0.0:
        raise MetricError("rase undefined: reference mean radiance is zero")
    ms = [_rmse(rb.data, fb.data) ** 2 for rb, fb in zip(r.bands, f.bands)]
    return 100.0 / mu * math.sqrt(sum(ms) / len(ms))


def uqi(r: Raster, f: Raster) -> float:
    """Universal quality index.

    Q = 4·cov·mean_R·mean_F / ((var_R + var_F)(mean_R^2 + mean_F^2)),
    computed globally. Equals the product of correlation, luminance and
    contrast factors; the best value 1 is reached iff R = F.
    """
    _check_dims(r, f, "uqi")
    return _uqi(r.data, f.data)


def ergas(r: MultiBandImage, f: MultiBandImage, ratio_h_over_l: float = 0.25) -> float:
    """Relative dimensionless global synthesis error.

    100 · (h/l) · sqrt(mean_i (RMSE_i / mu_i)^2) with per-band reference
    means mu_i and h/l the PAN-to-MS pixel size ratio (1/4 by default).
    Sensitive to mean shifts and dynamic-range changes.
    """
    _check_bands(r, f)
    terms = []
    for i, (rb, fb) in enumerate(zip(r.bands, f.bands)):
        mu = float(rb.data.mean())
        if mu == 0.0:
            raise MetricError(f"ergas undefined: band {i} of the reference has zero mean")
        terms.append((_rmse(rb.data, fb.data) / mu) ** 2)
    return 100.0 * ratio_h_over_l * math.sqrt(sum(terms) / len(terms))


def scc(f: MultiBandImage, p: Raster) -> float:
    """Spatial correlation coefficient against the PAN band.

    The same Laplacian is applied to every fused band and to PAN; the
    per-band correlations of the filtered images are averaged. Values near
    1 indicate the fused image carries the PAN spatial detail.
    """
    _check_dims(f, p, "scc")
    lap_pan = convolve2d(p, SCC_KERNEL, boundary="replicate").data
    vals = []
    for band in f.bands:
        lap_band = convolve2d(band, SCC_KERNEL, boundary="replicate").data
        vals.append(_cc(lap_band, lap_pan))
    return sum(vals) / len(vals)


def full_report(
    reference: MultiBandImage,
    fused: MultiBandImage,
    pan: Raster,
    ratio_h_over_l: float = 0.25,
) -> MetricReport:
    """All six aggregate metrics plus per-band cc/rmse/uqi in one pass."""
    _check_bands(reference, fused)
    _check_dims(reference, pan, "full_report PAN")
    per_band = tuple(
        BandMetrics(
            cc=_cc(rb.data, fb.data),
            rmse=_rmse(rb.data, fb.data),
            uqi=_uqi(rb.data, fb.data),
        )
        for rb, fb in zip(reference.bands, fused.bands)
    )
    n = len(per_band)
    return MetricReport(
        per_band=per_band,
        cc=sum(b.cc for b in per_band) / n,
        ergas=ergas(reference, fused, ratio_h_over_l),
        quality=sum(b.uqi for b in per_band) / n,
        rase=rase(reference, fused),
        rmse=sum(b.rmse for b in per_band) / n,
        scc=scc(fused, pan),
        ratio_h_over_l=ratio_h_over_l,
    )
