"""Minimal self-contained codecs for the three supported containers.

PNG: bit depth 8 or 16, gray or RGB, non-interlaced. Pillow cannot write
16-bit RGB PNGs and silently truncates them on read, so the full codec
lives here. TIFF: baseline, little- or big-endian on read, single
uncompressed strip. raw-f64: "PSRW" header followed by band-major
little-endian float64 samples, the toolkit's lossless interchange format.
"""

from __future__ import annotations

import struct
import zlib

import numpy as np


class FormatError(ValueError):
    """Raised when a file cannot be parsed or written as the declared format."""


# ---------------------------------------------------------------------------
# PNG
# ---------------------------------------------------------------------------

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_PNG_COLOR_GRAY = 0
_PNG_COLOR_RGB = 2


def _png_chunk(tag: bytes, payload: bytes) -> bytes:
    crc = zlib.crc32(tag + payload) & 0xFFFFFFFF
    return struct.pack(">I", len(payload)) + tag + payload + struct.pack(">I", crc)


def encode_png(samples: np.ndarray, depth: int) -> bytes:
    """Encode an (h, w, c) unsigned integer array, c in {1, 3}, depth 8 or 16."""
    h, w, c = samples.shape
    color = _PNG_COLOR_GRAY if c == 1 else _PNG_COLOR_RGB
    ihdr = struct.pack(">IIBBBBB", w, h, depth, color, 0, 0, 0)
    dtype = ">u2" if depth == 16 else np.uint8
    raw = np.ascontiguousarray(samples, dtype=dtype).tobytes()
    stride = w * c * (depth // 8)
    scanlines = b"".join(
        b"\x00" + raw[y * stride : (y + 1) * stride] for y in range(h)
    )
    return (
        _PNG_SIGNATURE
        + _png_chunk(b"IHDR", ihdr)
        + _png_chunk(b"IDAT", zlib.compress(scanlines, 6))
        + _png_chunk(b"IEND", b"")
    )


def _paeth(a: int, b: int, c: int) -> int:
    p = a + b - c
    pa, pb, pc = abs(p - a), abs(p - b), abs(p - c)
    if pa <= pb and pa <= pc:
        return a
    return b if pb <= pc else c


def _png_unfilter(raw: bytes, height: int, stride: int, bpp: int) -> bytes:
    out = bytearray()
    prev = bytes(stride)
    pos = 0
    for _ in range(height):
        ftype = raw[pos]
        pos += 1
        line = bytearray(raw[pos : pos + stride])
        pos += stride
        if ftype == 0:
            pass
        elif ftype == 1:  # Sub
            for i in range(bpp, stride):
                line[i] = (line[i] + line[i - bpp]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(stride):
                line[i] = (line[i] + prev[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(stride):
                a = line[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + ((a + prev[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(stride):
                a = line[i - bpp] if i >= bpp else 0
                c = prev[i - bpp] if i >= bpp else 0
                line[i] = (line[i] + _paeth(a, prev[i], c)) & 0xFF
        else:
            raise FormatError(f"PNG: unknown scanline filter {ftype}")
        out += line
        prev = bytes(line)
    return bytes(out)


def decode_png(blob: bytes) -> np.ndarray:
    """Decode a PNG into an (h, w, c) uint8 or uint16 array."""
    if blob[:8] != _PNG_SIGNATURE:
        raise FormatError("PNG: bad signature")
    pos = 8
    ihdr = None
    idat = bytearray()
    while pos < len(blob):
        if pos + 8 > len(blob):
            raise FormatError("PNG: truncated chunk header")
        (length,) = struct.unpack(">I", blob[pos : pos + 4])
        tag = blob[pos + 4 : pos + 8]
        payload = blob[pos + 8 : pos + 8 + length]
        if len(payload) != length:
            raise FormatError("PNG: truncated chunk payload")
        (crc,) = struct.unpack(">I", blob[pos + 8 + length : pos + 12 + length])
        if crc != (zlib.crc32(tag + payload) & 0xFFFFFFFF):
            raise FormatError(f"PNG: CRC mismatch in {tag!r} chunk")
        pos += 12 + length
        if tag == b"IHDR":
            ihdr = payload
        elif tag == b"IDAT":
            idat += payload
        elif tag == b"IEND":
            break
    if ihdr is None or not idat:
        raise FormatError("PNG: missing IHDR or IDAT")
    w, h, depth, color, comp, filt, interlace = struct.unpack(">IIBBBBB", ihdr)
    if w == 0 or h == 0:
        raise FormatError("PNG: zero-sized image")
    if depth not in (8, 16):
        raise FormatError(f"PNG: unsupported bit depth {depth}")
    if color not in (_PNG_COLOR_GRAY, _PNG_COLOR_RGB):
        raise FormatError(f"PNG: unsupported color type {color} (gray or RGB only)")
    if comp != 0 or filt != 0:
        raise FormatError("PNG: unsupported compression or filter method")
    if interlace != 0:
        raise FormatError("PNG: interlaced images unsupported")
    c = 1 if color == _PNG_COLOR_GRAY else 3
    stride = w * c * (depth // 8)
    bpp = max(1, c * (depth // 8))
    raw = zlib.decompress(bytes(idat))
    if len(raw) != h * (stride + 1):
        raise FormatError("PNG: decompressed size mismatch")
    flat = _png_unfilter(raw, h, stride, bpp)
    dtype = ">u2" if depth == 16 else np.uint8
    arr = np.frombuffer(flat, dtype=dtype).reshape(h, w, c)
    return arr.astype(np.uint16) if depth == 16 else arr.copy()


# ---------------------------------------------------------------------------
# TIFF (baseline, single strip, uncompressed)
# ---------------------------------------------------------------------------

_TIFF_SHORT = 3
_TIFF_LONG = 4


def encode_tiff(samples: np.ndarray, depth: int) -> bytes:
    """Encode an (h, w, c) unsigned integer array as little-endian baseline TIFF."""
    h, w, c = samples.shape
    dtype = "<u2" if depth == 16 else np.uint8
    strip = np.ascontiguousarray(samples, dtype=dtype).tobytes()
    strip_offset = 8
    ifd_offset = strip_offset + len(strip)

    entries = [
        (256, _TIFF_LONG, 1, w),  # ImageWidth
        (257, _TIFF_LONG, 1, h),  # ImageLength
        (258, _TIFF_SHORT, c, None),  # BitsPerSample, value set below
        (259, _TIFF_SHORT, 1, 1),  # Compression = none
        (262, _TIFF_SHORT, 1, 1 if c == 1 else 2),  # Photometric
        (273, _TIFF_LONG, 1, strip_offset),  # StripOffsets
        (277, _TIFF_SHORT, 1, c),  # SamplesPerPixel
        (278, _TIFF_LONG, 1, h),  # RowsPerStrip
        (279, _TIFF_LONG, 1, len(strip)),  # StripByteCounts
        (284, _TIFF_SHORT, 1, 1),  # PlanarConfiguration = chunky
    ]
    ifd_size = 2 + len(entries) * 12 + 4
    external_offset = ifd_offset + ifd_size
    external = b""

    body = struct.pack("<H", len(entries))
    for tag, typ, count, value in entries:
        if tag == 258:
            if c <= 2:
                value_bytes = struct.pack("<HH", depth, 0)
            else:
                value_bytes = struct.pack("<I", external_offset + len(external))
                external += struct.pack(f"<{c}H", *([depth] * c))
        elif typ == _TIFF_SHORT:
            value_bytes = struct.pack("<HH", value, 0)
        else:
            value_bytes = struct.pack("<I", value)
        body += struct.pack("<HHI", tag, typ, count) + value_bytes
    body += struct.pack("<I", 0)  # no next IFD

    header = struct.pack("<2sHI", b"II", 42, ifd_offset)
    return header + strip + body + external


def _tiff_values(blob: bytes, order: str, typ: int, count: int, value_field: bytes):
    size = 2 if typ == _TIFF_SHORT else 4
    fmt = ("H" if typ == _TIFF_SHORT else "I")
    if count * size <= 4:
        return struct.unpack(f"{order}{count}{fmt}", value_field[: count * size])
    (offset,) = struct.unpack(f"{order}I", value_field)
    return struct.unpack(f"{order}{count}{fmt}", blob[offset : offset + count * size])


def decode_tiff(blob: bytes) -> np.ndarray:
    """Decode a baseline single-strip TIFF into an (h, w, c) uint8/uint16 array."""
    if len(blob) < 8:
        raise FormatError("TIFF: file too short")
    if blob[:2] == b"II":
        order = "<"
    elif blob[:2] == b"MM":
        order = ">"
    else:
        raise FormatError("TIFF: bad byte-order mark")
    magic, ifd_offset = struct.unpack(f"{order}HI", blob[2:8])
    if magic != 42:
        raise FormatError("TIFF: bad magic number")

    (n_entries,) = struct.unpack(f"{order}H", blob[ifd_offset : ifd_offset + 2])
    tags: dict[int, tuple] = {}
    for i in range(n_entries):
        at = ifd_offset + 2 + i * 12
        tag, typ, count = struct.unpack(f"{order}HHI", blob[at : at + 8])
        if typ in (_TIFF_SHORT, _TIFF_LONG):
            tags[tag] = _tiff_values(blob, order, typ, count, blob[at + 8 : at + 12])

    def req(tag: int, name: str):
        if tag not in tags:
            raise FormatError(f"TIFF: missing required tag {name}")
        return tags[tag]

    w = req(256, "ImageWidth")[0]
    h = req(257, "ImageLength")[0]
    if w == 0 or h == 0:
        raise FormatError("TIFF: zero-sized image")
    if tags.get(259, (1,))[0] != 1:
        raise FormatError("TIFF: compressed files unsupported")
    c = tags.get(277, (1,))[0]
    if c not in (1, 3):
        raise FormatError(f"TIFF: {c} samples per pixel unsupported (1 or 3)")
    bits = tags.get(258, (1,) * c)
    if len(set(bits)) != 1 or bits[0] not in (8, 16):
        raise FormatError(f"TIFF: unsupported bit depth {bits}")
    depth = bits[0]
    photometric = tags.get(262, (1,))[0]
    if photometric not in (0, 1, 2):
        raise FormatError(f"TIFF: unsupported photometric interpretation {photometric}")
    if tags.get(284, (1,))[0] != 1:
        raise FormatError("TIFF: planar configuration unsupported (chunky only)")
    offsets = req(273, "StripOffsets")
    counts = req(279, "StripByteCounts")
    if len(offsets) != 1 or len(counts) != 1:
        raise FormatError("TIFF: multi-strip files unsupported")

    expected = h * w * c * (depth // 8)
    if counts[0] < expected:
        raise FormatError("TIFF: strip shorter than image data")
    strip = blob[offsets[0] : offsets[0] + expected]
    if len(strip) != expected:
        raise FormatError("TIFF: truncated strip")
    dtype = f"{order}u2" if depth == 16 else np.uint8
    arr = np.frombuffer(strip, dtype=dtype).reshape(h, w, c)
    return arr.astype(np.uint16) if depth == 16 else arr.copy()


# ---------------------------------------------------------------------------
# raw-f64 ("PSRW")
# ---------------------------------------------------------------------------

_RAW_MAGIC = b"PSRW"
_RAW_HEADER = struct.Struct("<4sIII")


def encode_raw_f64(stack: np.ndarray) -> bytes:
    """Encode an (n_bands, h, w) float64 array; band-major, little-endian."""
    n, h, w = stack.shape
    header = _RAW_HEADER.pack(_RAW_MAGIC, w, h, n)
    return header + np.ascontiguousarray(stack, dtype="<f8").tobytes()


def decode_raw_f64(blob: bytes) -> np.ndarray:
    """Decode a PSRW container into an (n_bands, h, w) float64 array."""
    if len(blob) < _RAW_HEADER.size:
        raise FormatError("raw-f64: file too short")
    magic, w, h, n = _RAW_HEADER.unpack_from(blob)
    if magic != _RAW_MAGIC:
        raise FormatError("raw-f64: bad magic")
    if w == 0 or h == 0 or n == 0:
        raise FormatError("raw-f64: zero-sized image")
    expected = _RAW_HEADER.size + n * h * w * 8
    if len(blob) != expected:
        raise FormatError(f"raw-f64: expected {expected} bytes, got {len(blob)}")
    return np.frombuffer(blob, dtype="<f8", offset=_RAW_HEADER.size).reshape(n, h, w).copy()
