"""Core image model: single-band rasters, multi-band images, file I/O.

All samples are 64-bit floats internally; integer bit depths exist only at
the file boundary and are converted without rescaling (a stored byte 255
loads as 255.0). Rasters are frozen after construction, so instances are
safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _codecs
from ._codecs import FormatError

__all__ = [
    "Raster",
    "MultiBandImage",
    "BandStats",
    "band_stats",
    "load_image",
    "save_image",
    "FormatError",
    "LOAD_FORMATS",
    "SAVE_FORMATS",
]

#: Formats accepted by :func:`load_image`. The bare family names "png" and
#: "tiff" accept either depth; the suffixed forms require the exact depth.
LOAD_FORMATS = ("png", "png8", "png16", "tiff", "tiff8", "tiff16", "raw-f64")

#: Formats accepted by :func:`save_image`. Integer formats need an explicit
#: depth so clamping and rounding are unambiguous.
SAVE_FORMATS = ("png8", "png16", "tiff8", "tiff16", "raw-f64")


def _freeze_plane(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64, copy=True, order="C")
    if arr.ndim != 2:
        raise ValueError(f"raster samples must be 2-D, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"raster must be at least 1x1, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("raster samples must all be finite (no NaN/Inf)")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Raster:
    """One band: a finite-valued 2-D grid in row-major order.

    Sample units are opaque linear radiance values; the toolkit never
    rescales them.
    """

    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _freeze_plane(self.data))

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Raster):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.all(self.data == other.data)
        )

    def __repr__(self) -> str:
        return f"Raster({self.height}x{self.width})"


@dataclass(frozen=True, eq=False)
class MultiBandImage:
    """N co-registered bands of identical dimensions; band order is meaningful."""

    bands: tuple[Raster, ...]

    def __post_init__(self):
        bands = tuple(
            b if isinstance(b, Raster) else Raster(b) for b in self.bands
        )
        if len(bands) < 1:
            raise ValueError("image needs at least one band")
        h, w = bands[0].height, bands[0].width
        for i, b in enumerate(bands):
            if (b.height, b.width) != (h, w):
                raise ValueError(
                    f"band {i} is {b.height}x{b.width}, expected {h}x{w}"
                )
        object.__setattr__(self, "bands", bands)

    @classmethod
    def from_stack(cls, stack: np.ndarray) -> "MultiBandImage":
        """Build from an (n_bands, height, width) array."""
        stack = np.asarray(stack, dtype=np.float64)
        if stack.ndim != 3:
            raise ValueError(f"stack must be 3-D, got ndim={stack.ndim}")
        return cls(tuple(Raster(plane) for plane in stack))

    def to_stack(self) -> np.ndarray:
        """Return a writable (n_bands, height, width) copy of the samples."""
        return np.stack([b.data for b in self.bands])

    @property
    def band_count(self) -> int:
        return len(self.bands)

    @property
    def height(self) -> int:
        return self.bands[0].height

    @property
    def width(self) -> int:
        return self.bands[0].width

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiBandImage):
            return NotImplemented
        return len(self.bands) == len(other.bands) and all(
            a == b for a, b in zip(self.bands, other.bands)
        )

    def __repr__(self) -> str:
        return f"MultiBandImage({self.band_count} bands, {self.height}x{self.width})"


@dataclass(frozen=True)
class BandStats:
    """First-order statistics of one band; std uses the population (1/n) convention."""

    mean: float
    std: float
    min: float
    max: float


def band_stats(r: Raster) -> BandStats:
    """Mean, population standard deviation, min and max of a band."""
    a = r.data
    return BandStats(
        mean=float(a.mean()),
        std=float(a.std()),
        min=float(a.min()),
        max=float(a.max()),
    )


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

_INT_DEPTH = {"png8": 8, "png16": 16, "tiff8": 8, "tiff16": 16}


def _infer_family(fmt: str) -> str:
    return "png" if fmt.startswith("png") else "tiff"


def load_image(path, fmt: str) -> MultiBandImage:
    """Load a file parsed as the declared format.

    Integer sample values are converted to float64 verbatim. `fmt` must be
    one of LOAD_FORMATS; "png"/"tiff" accept either bit depth while
    "png8"-style names reject files of the other depth.
    """
    if fmt not in LOAD_FORMATS:
        raise FormatError(f"unknown load format {fmt!r}, expected one of {LOAD_FORMATS}")
    blob = Path(path).read_bytes()
    if fmt == "raw-f64":
        return MultiBandImage.from_stack(_codecs.decode_raw_f64(blob))
    if fmt.startswith("png"):
        arr = _codecs.decode_png(blob)
    else:
        arr = _codecs.decode_tiff(blob)
    depth = 8 if arr.dtype == np.uint8 else 16
    declared = _INT_DEPTH.get(fmt)
    if declared is not None and declared != depth:
        raise FormatError(f"file is {depth}-bit but was declared {fmt}")
    planes = arr.astype(np.float64).transpose(2, 0, 1)
    return MultiBandImage.from_stack(planes)


def save_image(img: MultiBandImage, path, fmt: str, clamp: str = "none") -> None:
    """Write an image; raw-f64 is lossless, integer formats round half up.

    With clamp="clamp_to_depth" samples are clipped to [0, 2^depth - 1]
    before rounding; with clamp="none" any sample that would round outside
    that range is an error.
    """
    if fmt not in SAVE_FORMATS:
        raise FormatError(f"unknown save format {fmt!r}, expected one of {SAVE_FORMATS}")
    if clamp not in ("none", "clamp_to_depth"):
        raise ValueError(f"clamp must be 'none' or 'clamp_to_depth', got {clamp!r}")
    path = Path(path)
    if fmt == "raw-f64":
        path.write_bytes(_codecs.encode_raw_f64(img.to_stack()))
        return
    depth = _INT_DEPTH[fmt]
    if img.band_count not in (1, 3):
        raise FormatError(
            f"{fmt} supports 1 or 3 bands, image has {img.band_count}"
        )
    maxv = float(2**depth - 1)
    values = img.to_stack().transpose(1, 2, 0)
    if clamp == "clamp_to_depth":
        values = np.clip(values, 0.0, maxv)
    rounded = np.floor(values + 0.5)  # round half up
    if clamp == "none" and (np.any(rounded < 0.0) or np.any(rounded > maxv)):
        raise FormatError(
            f"samples outside [0, {int(maxv)}] for {fmt} with clamp='none'"
        )
    ints = rounded.astype(np.uint16 if depth == 16 else np.uint8)
    encode = _codecs.encode_png if _infer_family(fmt) == "png" else _codecs.encode_tiff
    path.write_bytes(encode(ints, depth))
