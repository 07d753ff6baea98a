"""Numerical engines shared by the fusion methods.

2-D kernel convolution, the undecimated (à trous) wavelet decomposition
with a B3-spline smoothing kernel, the decimated orthonormal Haar
transform, and principal component analysis over image bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import MultiBandImage, Raster

__all__ = [
    "Kernel2D",
    "WaveletStack",
    "PcaModel",
    "convolve2d",
    "atrous_decompose",
    "atrous_reconstruct",
    "mallat_decompose",
    "mallat_reconstruct",
    "pca_forward",
    "pca_inverse",
]

_BOUNDARY_MODES = {"replicate": "nearest", "symmetric": "reflect"}

# Separable smoothing taps used by the undecimated decomposition.
_B3_SPLINE = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class Kernel2D:
    """An odd x odd grid of finite filter coefficients, applied unflipped."""

    taps: np.ndarray

    def __post_init__(self):
        taps = np.array(self.taps, dtype=np.float64, copy=True)
        if taps.ndim != 2:
            raise ValueError("kernel taps must be 2-D")
        if taps.shape[0] % 2 == 0 or taps.shape[1] % 2 == 0:
            raise ValueError(f"kernel dimensions must be odd, got {taps.shape}")
        if not np.all(np.isfinite(taps)):
            raise ValueError("kernel taps must be finite")
        taps.setflags(write=False)
        object.__setattr__(self, "taps", taps)

    @classmethod
    def identity(cls) -> "Kernel2D":
        taps = np.zeros((3, 3))
        taps[1, 1] = 1.0
        return cls(taps)

    @classmethod
    def laplacian8(cls) -> "Kernel2D":
        """8-neighbor Laplacian; zero-sum, so constant regions map to zero."""
        return cls(np.array([[-1.0, -1.0, -1.0], [-1.0, 8.0, -1.0], [-1.0, -1.0, -1.0]]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Kernel2D):
            return NotImplemented
        return self.taps.shape == other.taps.shape and bool(
            np.all(self.taps == other.taps)
        )


@dataclass(frozen=True, eq=False)
class WaveletStack:
    """Detail planes (fine to coarse) plus the low-frequency residual.

    For scheme "atrous" every plane has the original dimensions. For
    "mallat_haar" each level contributes three decimated sub-bands in the
    order (LH, HL, HH), level j at 1/2^j of the original size, and the
    residual is the coarsest LL.
    """

    detail_planes: tuple[Raster, ...]
    residual: Raster
    scheme: str

    def __post_init__(self):
        planes = tuple(
            p if isinstance(p, Raster) else Raster(p) for p in self.detail_planes
        )
        residual = (
            self.residual if isinstance(self.residual, Raster) else Raster(self.residual)
        )
        if self.scheme not in ("atrous", "mallat_haar"):
            raise ValueError(f"unknown wavelet scheme {self.scheme!r}")
        if not planes:
            raise ValueError("wavelet stack needs at least one detail plane")
        if self.scheme == "atrous":
            dims = (residual.height, residual.width)
            for i, p in enumerate(planes):
                if (p.height, p.width) != dims:
                    raise ValueError(
                        f"atrous plane {i} is {p.height}x{p.width}, expected {dims}"
                    )
        else:
            if len(planes) % 3:
                raise ValueError("mallat stack needs 3 detail sub-bands per level")
            levels = len(planes) // 3
            for lvl in range(levels):
                h = residual.height * (2 ** (levels - 1 - lvl))
                w = residual.width * (2 ** (levels - 1 - lvl))
                for s in range(3):
                    p = planes[3 * lvl + s]
                    if (p.height, p.width) != (h, w):
                        raise ValueError(
                            f"mallat level {lvl + 1} sub-band {s} is "
                            f"{p.height}x{p.width}, expected {h}x{w}"
                        )
        object.__setattr__(self, "detail_planes", planes)
        object.__setattr__(self, "residual", residual)

    @property
    def levels(self) -> int:
        if self.scheme == "atrous":
            return len(self.detail_planes)
        return len(self.detail_planes) // 3


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Orthonormal band basis (rows are principal directions), band means,
    and the eigenvalue spectrum in descending order."""

    basis: np.ndarray
    band_means: np.ndarray
    eigenvalues: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=np.float64, copy=True)
        means = np.array(self.band_means, dtype=np.float64, copy=True)
        eig = np.array(self.eigenvalues, dtype=np.float64, copy=True)
        n = basis.shape[0]
        if basis.shape != (n, n):
            raise ValueError("basis must be square")
        if means.shape != (n,) or eig.shape != (n,):
            raise ValueError("band_means and eigenvalues must have one entry per band")
        if not np.allclose(basis @ basis.T, np.eye(n), atol=1e-10):
            raise ValueError("basis is not orthonormal within 1e-10")
        if np.any(np.diff(eig) > 0):
            raise ValueError("eigenvalues must be sorted descending")
        if np.any(eig < -1e-12):
            raise ValueError("eigenvalues must be non-negative (within round-off)")
        for a in (basis, means, eig):
            a.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "band_means", means)
        object.__setattr__(self, "eigenvalues", eig)

    @property
    def band_count(self) -> int:
        return self.basis.shape[0]


# ---------------------------------------------------------------------------
# Convolution
# ---------------------------------------------------------------------------


def convolve2d(r: Raster, k: Kernel2D, boundary: str = "replicate") -> Raster:
    """Apply the kernel as a sliding window (no flipping), same-size output.

    boundary "replicate" extends the edge sample, "symmetric" mirrors
    half-sample style (..., a, a, b, c, ...).
    """
    if boundary not in _BOUNDARY_MODES:
        raise ValueError(f"unknown boundary {boundary!r}")
    out = ndimage.correlate(r.data, k.taps, mode=_BOUNDARY_MODES[boundary])
    return Raster(out)


# ---------------------------------------------------------------------------
# À trous (undecimated) transform
# ---------------------------------------------------------------------------


def _dilated_b3(step: int) -> np.ndarray:
    taps = np.zeros(4 * step + 1)
    taps[::step] = _B3_SPLINE
    return taps


def _atrous_smooth(a: np.ndarray, step: int) -> np.ndarray:
    taps = _dilated_b3(step)
    out = ndimage.correlate1d(a, taps, axis=0, mode="reflect")
    return ndimage.correlate1d(out, taps, axis=1, mode="reflect")


def atrous_decompose(r: Raster, levels: int) -> WaveletStack:
    """Undecimated decomposition into `levels` detail planes plus residual.

    Detail plane j is the difference of successive smoothings with the
    B3-spline kernel dilated by 2^j; summing all planes and the residual
    reconstructs the input.
    """
    if not isinstance(levels, (int, np.integer)) or levels < 1:
        raise ValueError(f"levels must be an integer >= 1, got {levels!r}")
    smooth = r.data
    planes = []
    for j in range(int(levels)):
        nxt = _atrous_smooth(smooth, 2**j)
        planes.append(Raster(smooth - nxt))
        smooth = nxt
    return WaveletStack(tuple(planes), Raster(smooth), "atrous")


def atrous_reconstruct(s: WaveletStack) -> Raster:
    """Sum of all detail planes and the residual."""
    if s.scheme != "atrous":
        raise ValueError(f"expected an atrous stack, got scheme {s.scheme!r}")
    out = s.residual.data.copy()
    for p in s.detail_planes:
        out += p.data
    return Raster(out)


# ---------------------------------------------------------------------------
# Mallat (decimated, orthonormal Haar) transform
# ---------------------------------------------------------------------------


def _haar_forward_once(a: np.ndarray):
    lo = (a[0::2, :] + a[1::2, :]) / _SQRT2
    hi = (a[0::2, :] - a[1::2, :]) / _SQRT2
    ll = (lo[:, 0::2] + lo[:, 1::2]) / _SQRT2
    lh = (lo[:, 0::2] - lo[:, 1::2]) / _SQRT2
    hl = (hi[:, 0::2] + hi[:, 1::2]) / _SQRT2
    hh = (hi[:, 0::2] - hi[:, 1::2]) / _SQRT2
    return ll, lh, hl, hh


def _haar_inverse_once(ll, lh, hl, hh) -> np.ndarray:
    h2, w2 = ll.shape
    lo = np.empty((h2, 2 * w2))
    lo[:, 0::2] = (ll + lh) / _SQRT2
    lo[:, 1::2] = (ll - lh) / _SQRT2
    hi = np.empty((h2, 2 * w2))
    hi[:, 0::2] = (hl + hh) / _SQRT2
    hi[:, 1::2] = (hl - hh) / _SQRT2
    a = np.empty((2 * h2, 2 * w2))
    a[0::2, :] = (lo + hi) / _SQRT2
    a[1::2, :] = (lo - hi) / _SQRT2
    return a


def mallat_decompose(r: Raster, levels: int) -> WaveletStack:
    """Decimated orthonormal Haar analysis; dims must divide by 2^levels."""
    if not isinstance(levels, (int, np.integer)) or levels < 1:
        raise ValueError(f"levels must be an integer >= 1, got {levels!r}")
    levels = int(levels)
    div = 2**levels
    if r.height % div or r.width % div:
        raise ValueError(
            f"dimensions {r.height}x{r.width} not divisible by 2^levels = {div}"
        )
    planes = []
    ll = r.data
    for _ in range(levels):
        ll, lh, hl, hh = _haar_forward_once(ll)
        planes.extend([Raster(lh), Raster(hl), Raster(hh)])
    return WaveletStack(tuple(planes), Raster(ll), "mallat_haar")


def mallat_reconstruct(s: WaveletStack) -> Raster:
    """Orthonormal Haar synthesis; exact inverse of mallat_decompose."""
    if s.scheme != "mallat_haar":
        raise ValueError(f"expected a mallat_haar stack, got scheme {s.scheme!r}")
    ll = s.residual.data
    for lvl in reversed(range(s.levels)):
        lh, hl, hh = (p.data for p in s.detail_planes[3 * lvl : 3 * lvl + 3])
        ll = _haar_inverse_once(ll, lh, hl, hh)
    return Raster(ll)


# ---------------------------------------------------------------------------
# PCA over bands
# ---------------------------------------------------------------------------


def _fix_signs(basis: np.ndarray) -> np.ndarray:
    # Deterministic orientation: non-negative row sum, first nonzero entry
    # positive on ties.
    out = basis.copy()
    for i, row in enumerate(out):
        s = row.sum()
        if abs(s) > 1e-12:
            if s < 0:
                out[i] = -row
            continue
        nz = np.nonzero(np.abs(row) > 1e-12)[0]
        if nz.size and row[nz[0]] < 0:
            out[i] = -row
    return out


def pca_forward(ms: MultiBandImage) -> tuple[MultiBandImage, PcaModel]:
    """Project bands onto principal directions of the band covariance.

    Returns the component images (component 0 carries maximum variance)
    and the model needed to invert the projection. The covariance uses the
    population convention; tiny negative eigenvalues from round-off are
    clamped to zero.
    """
    n = ms.band_count
    if n < 2:
        raise ValueError(f"PCA needs at least 2 bands, got {n}")
    stack = ms.to_stack()
    flat = stack.reshape(n, -1)
    means = flat.mean(axis=1)
    centered = flat - means[:, None]
    if not np.any(centered):
        raise ValueError("PCA undefined: all bands are constant (rank-0 covariance)")
    cov = (centered @ centered.T) / flat.shape[1]
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    basis = _fix_signs(eigvecs[:, order].T)
    comps = (basis @ centered).reshape(stack.shape)
    model = PcaModel(basis=basis, band_means=means, eigenvalues=eigvals)
    return MultiBandImage.from_stack(comps), model


def pca_inverse(components: MultiBandImage, model: PcaModel) -> MultiBandImage:
    """Reconstruct bands: basis^T · components + band means."""
    if components.band_count != model.band_count:
        raise ValueError(
            f"component count {components.band_count} does not match "
            f"model band count {model.band_count}"
        )
    stack = components.to_stack()
    flat = stack.reshape(model.band_count, -1)
    pixels = model.basis.T @ flat + model.band_means[:, None]
    return MultiBandImage.from_stack(pixels.reshape(stack.shape))
