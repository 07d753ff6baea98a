"""The pansharpening algorithms behind one interface: fuse(ms, pan, params).

Every method follows the same pipeline: upsample the MS image to the PAN
grid, derive a spatial-detail signal from the PAN band, inject it. The
intensity-substitution methods are implemented in their additive form
out_i = M_i + (P' - I), which is algebraically identical to substituting
the intensity component and inverting, works for any band count, and has
no hue singularities at gray pixels.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import nnls

from .multires import (
    Kernel2D,
    WaveletStack,
    atrous_decompose,
    convolve2d,
    mallat_decompose,
    mallat_reconstruct,
    pca_forward,
    pca_inverse,
)
from .preprocess import HISTMATCH_MODES, RESAMPLE_METHODS, histogram_match, upsample
from .raster import MultiBandImage, Raster

__all__ = [
    "METHODS",
    "FusionParams",
    "FusionDiagnostics",
    "FusionResult",
    "default_hpf_kernel",
    "fuse",
    "fuse_brovey",
    "fuse_ihs",
    "fuse_adaptive_ihs",
    "fuse_pca",
    "fuse_hpf",
    "fuse_dwt",
    "solve_adaptive_alpha",
]

#: Public method identifiers. "identity" returns the upsampled MS image
#: unchanged and exists as a diagnostic baseline for the benchmark.
METHODS = (
    "brovey",
    "ihs",
    "adaptive_ihs",
    "pca",
    "hpf",
    "dwt_atrous",
    "dwt_mallat",
    "identity",
)

DWT_RULES = ("additive", "substitutive")


def default_hpf_kernel() -> Kernel2D:
    """Zero-sum 3x3 high-pass kernel used by the high-frequency injection method."""
    return Kernel2D(Kernel2D.laplacian8().taps / 9.0)


@dataclass(frozen=True)
class FusionParams:
    """Knobs shared by all methods; per-method fields are ignored elsewhere.

    ratio is the PAN/MS size ratio. alpha (intensity weights) defaults to
    1/N per band; hpf_kernel must be zero-sum; levels is the decomposition
    depth for the wavelet methods (2 spans the missing octaves of a 4x
    ratio).
    """

    method: str
    ratio: int = 4
    resample: str = "bicubic"
    histmatch: str = "mean_std"
    hpf_kernel: Kernel2D = field(default_factory=default_hpf_kernel)
    levels: int = 2
    dwt_rule: str = "additive"
    alpha: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown fusion method {self.method!r}")
        if not isinstance(self.ratio, (int, np.integer)) or self.ratio < 1:
            raise ValueError(f"ratio must be an integer >= 1, got {self.ratio!r}")
        if self.resample not in RESAMPLE_METHODS:
            raise ValueError(f"unknown resample method {self.resample!r}")
        if self.histmatch not in HISTMATCH_MODES:
            raise ValueError(f"unknown histogram match mode {self.histmatch!r}")
        if not isinstance(self.levels, (int, np.integer)) or self.levels < 1:
            raise ValueError(f"levels must be an integer >= 1, got {self.levels!r}")
        if self.dwt_rule not in DWT_RULES:
            raise ValueError(f"unknown dwt rule {self.dwt_rule!r}")
        if not isinstance(self.hpf_kernel, Kernel2D):
            object.__setattr__(self, "hpf_kernel", Kernel2D(self.hpf_kernel))
        if self.alpha is not None:
            alpha = tuple(float(a) for a in self.alpha)
            if sum(alpha) <= 0.0:
                raise ValueError("alpha weights must have a positive sum")
            object.__setattr__(self, "alpha", alpha)


@dataclass(frozen=True)
class FusionDiagnostics:
    solved_alpha: tuple[float, ...] | None = None
    pca_eigenvalues: tuple[float, ...] | None = None
    injected_detail_energy: float = 0.0


@dataclass(frozen=True, eq=False)
class FusionResult:
    fused: MultiBandImage
    method: str
    diagnostics: FusionDiagnostics


def _prepare(ms: MultiBandImage, pan: Raster, params: FusionParams) -> np.ndarray:
    """Validate geometry and return the upsampled MS stack at PAN size."""
    k = int(params.ratio)
    if (pan.height, pan.width) != (ms.height * k, ms.width * k):
        raise ValueError(
            f"PAN is {pan.height}x{pan.width} but MS {ms.height}x{ms.width} "
            f"with ratio {k} requires {ms.height * k}x{ms.width * k}"
        )
    return upsample(ms, k, params.resample).to_stack()


def _result(method, up_stack, fused_stack, **diag) -> FusionResult:
    energy = float(np.sum((fused_stack - up_stack) ** 2))
    return FusionResult(
        fused=MultiBandImage.from_stack(fused_stack),
        method=method,
        diagnostics=FusionDiagnostics(injected_detail_energy=energy, **diag),
    )


def _matched_pan(pan: np.ndarray, ref: np.ndarray, mode: str) -> np.ndarray:
    """Histogram-match PAN to a reference plane, tolerating a flat PAN.

    A constant PAN carries no detail; mapping it to the reference mean
    keeps the downstream injection at zero instead of failing the match.
    """
    if mode == "mean_std" and pan.std() == 0.0 and ref.std() != 0.0:
        return np.full_like(ref, ref.mean())
    return histogram_match(Raster(pan), Raster(ref), mode).data


# ---------------------------------------------------------------------------
# Methods
# ---------------------------------------------------------------------------


def fuse_brovey(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Brovey transform: scale each band by PAN over the band sum.

    out_i = ms_i / (sum_j ms_j) · pan, computed per pixel on the upsampled
    bands; pixels whose band sum is zero output zero in every band.
    Requires exactly 3 bands.
    """
    if ms.band_count != 3:
        raise ValueError(f"brovey requires exactly 3 bands, got {ms.band_count}")
    up = _prepare(ms, pan, params)
    total = up.sum(axis=0)
    ok = total != 0.0
    fused = np.zeros_like(up)
    for i in range(3):
        ratio = np.divide(up[i], total, out=np.zeros_like(total), where=ok)
        fused[i] = ratio * pan.data
    return _result("brovey", up, fused)


def _intensity_weights(params: FusionParams, n: int) -> np.ndarray:
    if params.alpha is None:
        return np.full(n, 1.0 / n)
    if len(params.alpha) != n:
        raise ValueError(
            f"alpha has {len(params.alpha)} weights for {n} bands"
        )
    return np.asarray(params.alpha, dtype=np.float64)


def _ihs_core(method, up, pan, alpha, histmatch) -> FusionResult:
    # A degenerate histogram match (flat PAN against a varying intensity)
    # propagates as an error; a flat intensity collapses the match to a
    # constant and injects nothing.
    intensity = np.tensordot(alpha, up, axes=1)
    matched = histogram_match(Raster(pan.data), Raster(intensity), histmatch).data
    fused = up + (matched - intensity)[None, :, :]
    return _result(method, up, fused, solved_alpha=tuple(float(a) for a in alpha))


def fuse_ihs(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Intensity substitution with fixed weights.

    I = sum_i alpha_i · M_i on the upsampled bands (alpha defaults to 1/N),
    P' = PAN histogram-matched to I, and out_i = M_i + (P' - I). When PAN
    equals I the output is the upsampled MS image.
    """
    if ms.band_count < 2:
        raise ValueError(f"ihs requires at least 2 bands, got {ms.band_count}")
    up = _prepare(ms, pan, params)
    alpha = _intensity_weights(params, ms.band_count)
    return _ihs_core("ihs", up, pan, alpha, params.histmatch)


def solve_adaptive_alpha(ms: MultiBandImage, pan: Raster) -> tuple[float, ...]:
    """Non-negative weights making sum_i alpha_i · M_i approximate PAN best.

    Solves min ||sum alpha_i M_i - pan||^2 with alpha >= 0 by non-negative
    least squares. MS must already be on the PAN grid. Collinear bands make
    the minimizer non-unique and raise.
    """
    if (ms.height, ms.width) != (pan.height, pan.width):
        raise ValueError("solve_adaptive_alpha expects MS upsampled to the PAN grid")
    a = ms.to_stack().reshape(ms.band_count, -1).T
    gram = a.T @ a
    if np.linalg.matrix_rank(gram) < ms.band_count:
        raise ValueError(
            "adaptive intensity weights are non-unique: bands are collinear"
        )
    weights, _ = nnls(a, pan.data.ravel())
    return tuple(float(w) for w in weights)


def fuse_adaptive_ihs(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Intensity substitution with weights fitted to the PAN band."""
    if ms.band_count < 2:
        raise ValueError(f"adaptive_ihs requires at least 2 bands, got {ms.band_count}")
    up = _prepare(ms, pan, params)
    alpha = np.asarray(
        solve_adaptive_alpha(MultiBandImage.from_stack(up), pan), dtype=np.float64
    )
    return _ihs_core("adaptive_ihs", up, pan, alpha, params.histmatch)


def fuse_pca(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Replace the first principal component with the matched PAN band.

    Components 1..N-1 are kept unaltered; the inverse projection yields the
    fused bands.
    """
    if ms.band_count < 2:
        raise ValueError(f"pca requires at least 2 bands, got {ms.band_count}")
    up = _prepare(ms, pan, params)
    comps, model = pca_forward(MultiBandImage.from_stack(up))
    comp_stack = comps.to_stack()
    comp_stack[0] = _matched_pan(pan.data, comp_stack[0], params.histmatch)
    fused = pca_inverse(MultiBandImage.from_stack(comp_stack), model)
    return _result(
        "pca",
        up,
        fused.to_stack(),
        pca_eigenvalues=tuple(float(v) for v in model.eigenvalues),
    )


def fuse_hpf(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Add the high-pass-filtered PAN band to every upsampled MS band.

    The kernel must be zero-sum so the injection carries no DC shift; the
    same detail plane is added to every band, preserving band differences
    exactly.
    """
    taps = params.hpf_kernel.taps
    if abs(taps.sum()) > 1e-12 * max(1.0, np.abs(taps).sum()):
        raise ValueError("hpf kernel must be zero-sum (high-pass)")
    up = _prepare(ms, pan, params)
    detail = convolve2d(pan, params.hpf_kernel, boundary="replicate").data
    return _result("hpf", up, up + detail[None, :, :])


def fuse_dwt(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Wavelet fusion, undecimated ("dwt_atrous") or Haar ("dwt_mallat").

    Per band, PAN is histogram-matched to the band, both are decomposed to
    `levels`, and the fusion rule combines coefficients: "additive" adds the
    PAN detail to the MS detail, "substitutive" replaces the MS detail with
    the PAN detail. The MS residual is always kept; a flat PAN under the
    additive rule therefore leaves the image unchanged.
    """
    scheme = params.method if params.method in ("dwt_atrous", "dwt_mallat") else None
    if scheme is None:
        raise ValueError(f"fuse_dwt got non-wavelet method {params.method!r}")
    up = _prepare(ms, pan, params)
    fused = np.empty_like(up)
    for i in range(up.shape[0]):
        band = up[i]
        matched = Raster(_matched_pan(pan.data, band, params.histmatch))
        if scheme == "dwt_atrous":
            pan_stack = atrous_decompose(matched, params.levels)
            pan_detail = sum(p.data for p in pan_stack.detail_planes)
            if params.dwt_rule == "additive":
                fused[i] = band + pan_detail
            else:
                ms_stack = atrous_decompose(Raster(band), params.levels)
                fused[i] = pan_detail + ms_stack.residual.data
        else:
            pan_stack = mallat_decompose(matched, params.levels)
            ms_stack = mallat_decompose(Raster(band), params.levels)
            if params.dwt_rule == "additive":
                planes = tuple(
                    Raster(m.data + p.data)
                    for m, p in zip(ms_stack.detail_planes, pan_stack.detail_planes)
                )
            else:
                planes = pan_stack.detail_planes
            combined = WaveletStack(planes, ms_stack.residual, "mallat_haar")
            fused[i] = mallat_reconstruct(combined).data
    return _result(params.method, up, fused)


def _fuse_identity(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    up = _prepare(ms, pan, params)
    return _result("identity", up, up.copy())


_DISPATCH = {
    "brovey": fuse_brovey,
    "ihs": fuse_ihs,
    "adaptive_ihs": fuse_adaptive_ihs,
    "pca": fuse_pca,
    "hpf": fuse_hpf,
    "dwt_atrous": fuse_dwt,
    "dwt_mallat": fuse_dwt,
    "identity": _fuse_identity,
}


def fuse(ms: MultiBandImage, pan: Raster, params: FusionParams) -> FusionResult:
    """Run the method named in params; see the per-method functions."""
    return _DISPATCH[params.method](ms, pan, params)
