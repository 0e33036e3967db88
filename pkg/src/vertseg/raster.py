"""Raster conventions, validation helpers, and bit-exact PNM codecs.

Images are plain numpy arrays in row-major order with row 0 at the top of
the image, so "inferior" (toward the feet in a sagittal view) means the
highest row index. Four dtype conventions are used throughout the package:

* gray image: ``uint8``, shape ``(height, width)``
* float image: ``float64``, shape ``(height, width)``, all values finite
* binary mask: ``bool``, shape ``(height, width)``, True marks foreground
* label map: ``int32``, shape ``(height, width)``, 0 is background and the
  positive labels form the contiguous range ``1..L``

The helpers below coerce array-likes into these conventions and raise
:class:`~vertseg.errors.FormatError` subclasses when they cannot.
"""

from __future__ import annotations

import colorsys

import numpy as np

from .errors import (
    BadHeader,
    BadMagic,
    DimensionMismatch,
    FormatError,
    PaletteTooSmall,
    TruncatedData,
)

_WHITESPACE = b" \t\n\r\x0b\x0c"


def as_gray_image(image) -> np.ndarray:
    """Validate and coerce an array-like into a uint8 gray image."""
    arr = np.asarray(image)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError("gray image must be a non-empty 2-D array")
    if arr.dtype != np.uint8:
        values = np.asarray(arr, dtype=np.float64)
        if not np.all(np.isfinite(values)):
            raise FormatError("gray image values must be finite")
        if values.min() < 0 or values.max() > 255 or np.any(values != np.floor(values)):
            raise FormatError("gray image values must be integers in [0, 255]")
        arr = values.astype(np.uint8)
    return arr


def as_float_image(image) -> np.ndarray:
    """Validate and coerce an array-like into a finite float64 image."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError("float image must be a non-empty 2-D array")
    if not np.all(np.isfinite(arr)):
        raise FormatError("float image values must be finite")
    return arr


def as_mask(mask) -> np.ndarray:
    """Validate and coerce an array-like into a boolean mask."""
    arr = np.asarray(mask)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError("mask must be a non-empty 2-D array")
    if arr.dtype != np.bool_:
        arr = arr.astype(bool)
    return arr


def as_label_map(labels) -> np.ndarray:
    """Validate a label map: non-negative, contiguous labels 1..L."""
    arr = np.asarray(labels)
    if arr.ndim != 2 or arr.size == 0:
        raise FormatError("label map must be a non-empty 2-D array")
    if not np.issubdtype(arr.dtype, np.integer):
        raise FormatError("label map must hold integers")
    if arr.min() < 0:
        raise FormatError("label values must be non-negative")
    distinct = np.unique(arr)
    nonzero = distinct[distinct > 0]
    if nonzero.size and (nonzero[0] != 1 or nonzero[-1] != nonzero.size):
        raise FormatError("nonzero labels must form the contiguous range 1..L")
    return arr.astype(np.int32, copy=False)


def relabel_sequential(labels) -> np.ndarray:
    """Remap arbitrary non-negative labels onto 0..L in row-major
    first-encounter order, keeping 0 as background."""
    arr = np.asarray(labels)
    if arr.ndim != 2:
        raise FormatError("label map must be 2-D")
    if arr.size and arr.min() < 0:
        raise FormatError("label values must be non-negative")
    flat = arr.ravel()
    distinct, first_index = np.unique(flat, return_index=True)
    keep = distinct > 0
    distinct, first_index = distinct[keep], first_index[keep]
    mapping = np.zeros(int(distinct[-1]) + 1 if distinct.size else 1, dtype=np.int32)
    for rank, old in enumerate(distinct[np.argsort(first_index)], start=1):
        mapping[old] = rank
    return mapping[arr]


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Return the next header token, skipping whitespace runs and '#' comments."""
    n = len(data)
    while pos < n:
        byte = data[pos : pos + 1]
        if byte in _WHITESPACE:
            pos += 1
        elif byte == b"#":
            newline = data.find(b"\n", pos)
            pos = n if newline < 0 else newline + 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    return data[start:pos], pos


def _header_int(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise BadHeader(f"{what} is not a non-negative integer: {token!r}")
    return int(token)


def read_pgm(data: bytes) -> np.ndarray:
    """Decode a binary PGM ("P5", maxval up to 255) into a gray image.

    Header tokens may be separated by any run of whitespace and '#' comment
    lines. Exactly one whitespace byte separates the maxval from the pixel
    payload. Trailing bytes after the payload are ignored.
    """
    magic, pos = _next_token(bytes(data), 0)
    if magic != b"P5":
        raise BadMagic(f"expected magic 'P5', found {magic!r}")
    width_tok, pos = _next_token(data, pos)
    height_tok, pos = _next_token(data, pos)
    maxval_tok, pos = _next_token(data, pos)
    width = _header_int(width_tok, "width")
    height = _header_int(height_tok, "height")
    maxval = _header_int(maxval_tok, "maxval")
    if width < 1 or height < 1:
        raise BadHeader(f"dimensions must be positive, got {width}x{height}")
    if maxval < 1 or maxval > 255:
        raise BadHeader(f"maxval must be in 1..255, got {maxval}")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise BadHeader("missing whitespace byte between maxval and payload")
    pos += 1
    count = width * height
    if len(data) - pos < count:
        raise TruncatedData(f"payload holds {len(data) - pos} bytes, need {count}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    return pixels.reshape(height, width).copy()


def write_pgm(image) -> bytes:
    """Encode a gray image as binary PGM; round-trips through read_pgm."""
    img = as_gray_image(image)
    height, width = img.shape
    header = f"P5\n{width} {height}\n255\n".encode("ascii")
    return header + img.tobytes()


def write_ppm_overlay(image, labels, palette) -> bytes:
    """Encode a binary PPM where labeled pixels take palette colors.

    Background (label 0) pixels carry the gray value replicated to RGB;
    a pixel with label k carries ``palette[k]``.
    """
    img = as_gray_image(image)
    lab = np.asarray(labels)
    if lab.shape != img.shape:
        raise DimensionMismatch(
            f"label map shape {lab.shape} does not match image shape {img.shape}"
        )
    max_label = int(lab.max()) if lab.size else 0
    if max_label > 0 and max_label >= len(palette):
        raise PaletteTooSmall(
            f"palette has {len(palette)} entries, labels reach {max_label}"
        )
    rgb = np.repeat(img[:, :, None], 3, axis=2)
    if max_label > 0:
        lut = np.zeros((max_label + 1, 3), dtype=np.uint8)
        for k in range(1, max_label + 1):
            lut[k] = palette[k]
        fg = lab > 0
        rgb[fg] = lut[lab[fg]]
    height, width = img.shape
    header = f"P6\n{width} {height}\n255\n".encode("ascii")
    return header + rgb.tobytes()


def read_ppm(data: bytes) -> np.ndarray:
    """Decode a binary PPM ("P6", maxval up to 255) into an (H, W, 3) array."""
    magic, pos = _next_token(bytes(data), 0)
    if magic != b"P6":
        raise BadMagic(f"expected magic 'P6', found {magic!r}")
    width_tok, pos = _next_token(data, pos)
    height_tok, pos = _next_token(data, pos)
    maxval_tok, pos = _next_token(data, pos)
    width = _header_int(width_tok, "width")
    height = _header_int(height_tok, "height")
    maxval = _header_int(maxval_tok, "maxval")
    if width < 1 or height < 1:
        raise BadHeader(f"dimensions must be positive, got {width}x{height}")
    if maxval < 1 or maxval > 255:
        raise BadHeader(f"maxval must be in 1..255, got {maxval}")
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise BadHeader("missing whitespace byte between maxval and payload")
    pos += 1
    count = width * height * 3
    if len(data) - pos < count:
        raise TruncatedData(f"payload holds {len(data) - pos} bytes, need {count}")
    pixels = np.frombuffer(data, dtype=np.uint8, count=count, offset=pos)
    return pixels.reshape(height, width, 3).copy()


# Saturated, well separated colors for the first few labels (L5 up).
_BASE_COLORS = (
    (230, 25, 75),
    (60, 180, 75),
    (0, 130, 200),
    (255, 225, 25),
    (240, 50, 230),
    (70, 240, 240),
    (245, 130, 48),
)


def default_palette(max_label: int) -> list[tuple[int, int, int]]:
    """Deterministic color palette indexed by label; entry 0 is unused."""
    palette = [(0, 0, 0)]
    palette.extend(_BASE_COLORS[: max(max_label, 0)])
    hue = 0.11
    while len(palette) <= max_label:
        hue = (hue + 0.381966) % 1.0
        r, g, b = colorsys.hsv_to_rgb(hue, 0.85, 0.95)
        palette.append((int(round(r * 255)), int(round(g * 255)), int(round(b * 255))))
    return palette
