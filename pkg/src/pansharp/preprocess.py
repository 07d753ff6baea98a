"""Spatial resampling and histogram matching applied ahead of fusion.

Resampling uses a sample-center grid convention: upsampling by k maps
output center (i + 0.5)/k - 0.5 into input coordinates, which keeps
up/down round trips unbiased. Out-of-range taps replicate the edge sample.
"""

from __future__ import annotations

import numpy as np

from .raster import MultiBandImage, Raster

__all__ = [
    "upsample",
    "downsample",
    "histogram_match",
    "RESAMPLE_METHODS",
    "DOWNSAMPLE_FILTERS",
    "HISTMATCH_MODES",
]

RESAMPLE_METHODS = ("nearest", "bilinear", "bicubic")
DOWNSAMPLE_FILTERS = ("box_mean", "decimate")
HISTMATCH_MODES = ("mean_std", "cdf")


def _catmull_rom_weights(f: np.ndarray) -> list[np.ndarray]:
    # Cubic convolution with a = -0.5 on taps (i0-1, i0, i0+1, i0+2).
    f2 = f * f
    f3 = f2 * f
    return [
        0.5 * (-f3 + 2.0 * f2 - f),
        0.5 * (3.0 * f3 - 5.0 * f2 + 2.0),
        0.5 * (-3.0 * f3 + 4.0 * f2 + f),
        0.5 * (f3 - f2),
    ]


def _interp_axis(a: np.ndarray, k: int, method: str, axis: int) -> np.ndarray:
    n = a.shape[axis]
    x = (np.arange(n * k) + 0.5) / k - 0.5
    i0 = np.floor(x).astype(np.intp)
    f = x - i0
    if method == "bilinear":
        offsets = (0, 1)
        weights = [1.0 - f, f]
    else:  # bicubic
        offsets = (-1, 0, 1, 2)
        weights = _catmull_rom_weights(f)
    out = None
    for off, w in zip(offsets, weights):
        idx = np.clip(i0 + off, 0, n - 1)
        shape = [1, 1]
        shape[axis] = w.size
        term = w.reshape(shape) * np.take(a, idx, axis=axis)
        out = term if out is None else out + term
    return out


def _upsample_plane(a: np.ndarray, k: int, method: str) -> np.ndarray:
    if k == 1:
        return a.copy()
    if method == "nearest":
        return np.repeat(np.repeat(a, k, axis=0), k, axis=1)
    return _interp_axis(_interp_axis(a, k, method, axis=0), k, method, axis=1)


def _box_mean_plane(a: np.ndarray, k: int) -> np.ndarray:
    # Power-of-two factors reduce by pairwise halving so that blocks of
    # identical samples average back to the sample exactly.
    if k & (k - 1) == 0:
        while k > 1:
            a = 0.5 * (a[0::2, :] + a[1::2, :])
            a = 0.5 * (a[:, 0::2] + a[:, 1::2])
            k //= 2
        return a
    h, w = a.shape
    return a.reshape(h // k, k, w // k, k).sum(axis=(1, 3)) / float(k * k)


def upsample(img: MultiBandImage, factor: int, method: str = "bicubic") -> MultiBandImage:
    """Enlarge every band by an integer factor.

    "bilinear" and "bicubic" (Catmull-Rom) reproduce linear ramps exactly
    away from the borders; "nearest" replicates each sample into a
    factor x factor block.
    """
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ValueError(f"upsample factor must be an integer >= 1, got {factor!r}")
    if method not in RESAMPLE_METHODS:
        raise ValueError(f"unknown resample method {method!r}")
    return MultiBandImage(
        tuple(Raster(_upsample_plane(b.data, int(factor), method)) for b in img.bands)
    )


def downsample(img: MultiBandImage, factor: int, filter: str = "box_mean") -> MultiBandImage:
    """Shrink every band by an integer factor.

    "box_mean" replaces each factor x factor block by its mean; "decimate"
    keeps the top-left sample of each block. Dimensions must divide evenly.
    """
    if not isinstance(factor, (int, np.integer)) or factor < 1:
        raise ValueError(f"downsample factor must be an integer >= 1, got {factor!r}")
    if filter not in DOWNSAMPLE_FILTERS:
        raise ValueError(f"unknown downsample filter {filter!r}")
    k = int(factor)
    if img.height % k or img.width % k:
        raise ValueError(
            f"dimensions {img.height}x{img.width} not divisible by factor {k}"
        )
    if k == 1:
        return MultiBandImage(img.bands)
    out = []
    for b in img.bands:
        if filter == "decimate":
            out.append(Raster(b.data[::k, ::k]))
        else:
            out.append(Raster(_box_mean_plane(b.data, k)))
    return MultiBandImage(tuple(out))


def histogram_match(src: Raster, reference: Raster, mode: str = "mean_std") -> Raster:
    """Map src's histogram onto reference's.

    mean_std: affine map (src - mean)·(std_ref/std_src) + mean_ref, exact
    moment matching. cdf: rank-order mapping of src quantiles onto the
    reference quantile function; ties in src map to the same output.
    """
    if mode not in HISTMATCH_MODES:
        raise ValueError(f"unknown histogram match mode {mode!r}")
    s = src.data
    r = reference.data
    if mode == "mean_std":
        std_ref = r.std()
        if std_ref == 0.0:
            return Raster(np.full_like(s, r.mean()))
        std_src = s.std()
        if std_src == 0.0:
            raise ValueError(
                "histogram_match: constant source cannot be matched to a "
                "non-constant reference in mean_std mode"
            )
        return Raster((s - s.mean()) * (std_ref / std_src) + r.mean())
    # cdf mode: mid-rank quantile of each distinct source value, mapped
    # through the reference quantile function.
    flat = s.ravel()
    uniq, inverse, counts = np.unique(flat, return_inverse=True, return_counts=True)
    cum = np.cumsum(counts)
    src_q = (cum - 0.5 * counts) / flat.size
    ref_sorted = np.sort(r.ravel())
    ref_q = (np.arange(ref_sorted.size) + 0.5) / ref_sorted.size
    mapped = np.interp(src_q, ref_q, ref_sorted)
    return Raster(mapped[inverse].reshape(s.shape))
