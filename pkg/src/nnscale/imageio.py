"""Bit-exact Netpbm (PGM P2/P5, PPM P6) reading and writing.

Only maxval 255 is supported. The canonical serialization uses single
newline separators and no comments, so written bytes are stable golden
files: ``P5\\n<cols> <rows>\\n255\\n`` followed by the raw payload.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    FormatMismatch,
    MalformedHeader,
    NotColor,
    TruncatedPayload,
    UnsupportedMaxval,
)

__all__ = [
    "ImageRaster",
    "read_pnm",
    "write_pnm",
    "split_channels",
    "merge_channels",
]

_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True)
class ImageRaster:
    """An 8-bit luminance or RGB grid.

    ``data`` has shape (rows, cols) for grayscale or (rows, cols, 3) for
    color, dtype uint8.
    """

    data: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.data)
        if arr.dtype != np.uint8:
            if not np.issubdtype(arr.dtype, np.integer):
                raise ValueError("raster data must be integer-typed")
            if arr.size and (arr.min() < 0 or arr.max() > 255):
                raise ValueError("raster values must lie in [0, 255]")
            arr = arr.astype(np.uint8)
        if arr.ndim not in (2, 3) or (arr.ndim == 3 and arr.shape[2] != 3):
            raise ValueError("raster shape must be (N, M) or (N, M, 3)")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("raster must have at least one pixel")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.data.ndim == 2 else 3

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ImageRaster):
            return NotImplemented
        return self.data.shape == other.data.shape and bool(
            np.array_equal(self.data, other.data)
        )


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Next whitespace-delimited token, skipping '#' comments; new position."""
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c in (b"#",):
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c in _WHITESPACE:
            pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos : pos + 1] not in _WHITESPACE and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("unexpected end of header")
    return data[start:pos], pos


def _read_header_int(data: bytes, pos: int, what: str) -> tuple[int, int]:
    token, pos = _read_header_token(data, pos)
    if not token.isdigit():
        raise MalformedHeader(f"{what} is not a decimal integer: {token!r}")
    return int(token), pos


def read_pnm(data: bytes) -> ImageRaster:
    """Parse P2 (ASCII gray), P5 (raw gray), or P6 (raw RGB) bytes."""
    magic = data[:2]
    if magic not in (b"P2", b"P5", b"P6"):
        raise MalformedHeader(f"unsupported magic number: {magic!r}")
    pos = 2
    cols, pos = _read_header_int(data, pos, "width")
    rows, pos = _read_header_int(data, pos, "height")
    maxval, pos = _read_header_int(data, pos, "maxval")
    if cols < 1 or rows < 1:
        raise MalformedHeader("dimensions must be positive")
    if maxval != 255:
        raise UnsupportedMaxval(f"maxval {maxval} is not supported (need 255)")

    if magic == b"P2":
        tokens = data[pos:].split()
        need = rows * cols
        if len(tokens) < need:
            raise TruncatedPayload(f"expected {need} pixel values, got {len(tokens)}")
        if not all(t.isdigit() for t in tokens[:need]):
            raise MalformedHeader("non-numeric pixel token in ASCII payload")
        values = np.array([int(t.decode("ascii")) for t in tokens[:need]], dtype=np.int64)
        if values.max() > 255:
            raise MalformedHeader("pixel value outside [0, 255]")
        return ImageRaster(values.astype(np.uint8).reshape(rows, cols))

    # Raw formats: exactly one whitespace byte separates maxval from payload.
    if pos >= len(data) or data[pos : pos + 1] not in _WHITESPACE:
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1
    channels = 1 if magic == b"P5" else 3
    need = rows * cols * channels
    payload = data[pos : pos + need]
    if len(payload) < need:
        raise TruncatedPayload(f"expected {need} payload bytes, got {len(payload)}")
    arr = np.frombuffer(payload, dtype=np.uint8, count=need)
    shape = (rows, cols) if channels == 1 else (rows, cols, 3)
    return ImageRaster(arr.reshape(shape).copy())


def write_pnm(raster: ImageRaster, format: str = "auto") -> bytes:
    """Serialize to canonical bytes; format is "P2", "P5", "P6", or "auto".

    "auto" selects P5 for grayscale and P6 for color. Round-trips bitwise
    with :func:`read_pnm`.
    """
    if format == "auto":
        format = "P5" if raster.channels == 1 else "P6"
    if format in ("P2", "P5") and raster.channels != 1:
        raise FormatMismatch(f"{format} requires a single-channel raster")
    if format == "P6" and raster.channels != 3:
        raise FormatMismatch("P6 requires a three-channel raster")
    if format not in ("P2", "P5", "P6"):
        raise ValueError(f"unknown format: {format!r}")

    header = f"{format}\n{raster.cols} {raster.rows}\n255\n".encode("ascii")
    if format == "P2":
        body = "\n".join(
            " ".join(str(v) for v in row) for row in raster.data.tolist()
        )
        return header + body.encode("ascii") + b"\n"
    return header + raster.data.tobytes()


def split_channels(raster: ImageRaster) -> list[ImageRaster]:
    """Split an RGB raster into [R, G, B] grayscale rasters."""
    if raster.channels != 3:
        raise NotColor("split_channels requires a three-channel raster")
    return [ImageRaster(raster.data[:, :, c].copy()) for c in range(3)]


def merge_channels(channels: list[ImageRaster]) -> ImageRaster:
    """Inverse of :func:`split_channels`; inputs must share dimensions."""
    if len(channels) != 3 or any(c.channels != 1 for c in channels):
        raise ValueError("merge_channels requires three grayscale rasters")
    dims = {(c.rows, c.cols) for c in channels}
    if len(dims) != 1:
        raise ValueError("channel dimensions differ")
    return ImageRaster(np.stack([c.data for c in channels], axis=2))
