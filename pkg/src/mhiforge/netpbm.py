"""Binary PGM (P5) and PPM (P6) reading and writing, maxval 255 only."""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import FileNotFound, UnsupportedFormat

_CHANNELS = {b"P5": 1, b"P6": 3}
_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True)
class NetpbmHeader:
    magic: bytes
    width: int
    height: int
    maxval: int
    offset: int  # byte offset of the raster

    @property
    def channels(self) -> int:
        return _CHANNELS[self.magic]

    @property
    def raster_size(self) -> int:
        return self.width * self.height * self.channels


def parse_header(data: bytes, source: str = "<bytes>") -> NetpbmHeader:
    magic = data[:2]
    if magic not in _CHANNELS:
        raise UnsupportedFormat(f"{source}: magic {magic!r} is not P5 or P6")
    pos = 2
    fields = []
    while len(fields) < 3:
        # skip whitespace and '#' comments between header tokens
        while pos < len(data) and data[pos] in _WHITESPACE:
            pos += 1
        if pos < len(data) and data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and data[pos] not in _WHITESPACE and data[pos:pos + 1] != b"#":
            pos += 1
        token = data[start:pos]
        if not token.isdigit():
            raise UnsupportedFormat(f"{source}: malformed header token {token!r}")
        fields.append(int(token))
    if pos >= len(data) or data[pos] not in _WHITESPACE:
        raise UnsupportedFormat(f"{source}: truncated header")
    width, height, maxval = fields
    if maxval != 255:
        raise UnsupportedFormat(f"{source}: maxval {maxval} (only 255 is supported)")
    if width < 1 or height < 1:
        raise UnsupportedFormat(f"{source}: empty raster {width}x{height}")
    return NetpbmHeader(magic, width, height, maxval, pos + 1)


def read_header(path: str | os.PathLike) -> NetpbmHeader:
    """Parse only the header of a PGM/PPM file."""
    try:
        with open(path, "rb") as fh:
            head = fh.read(512)
    except FileNotFoundError:
        raise FileNotFound(f"{path}: no such file") from None
    return parse_header(head, str(path))


def decode(data: bytes, source: str = "<bytes>") -> np.ndarray:
    header = parse_header(data, source)
    raster = data[header.offset:header.offset + header.raster_size]
    if len(raster) != header.raster_size:
        raise UnsupportedFormat(f"{source}: raster truncated")
    arr = np.frombuffer(raster, dtype=np.uint8)
    return _shape(arr, header)


def read(path: str | os.PathLike, header: NetpbmHeader | None = None) -> np.ndarray:
    """Decode a PGM to (H, W) or a PPM to (H, W, 3) uint8.

    The raster is read straight into its array so only one buffer of frame
    size is allocated per call.
    """
    if header is None:
        header = read_header(path)
    try:
        arr = np.fromfile(path, dtype=np.uint8, count=header.raster_size, offset=header.offset)
    except FileNotFoundError:
        raise FileNotFound(f"{path}: no such file") from None
    if arr.size != header.raster_size:
        raise UnsupportedFormat(f"{path}: raster truncated")
    return _shape(arr, header)


def _shape(arr: np.ndarray, header: NetpbmHeader) -> np.ndarray:
    if header.channels == 1:
        return arr.reshape(header.height, header.width)
    return arr.reshape(header.height, header.width, 3)


def encode(pixels: np.ndarray) -> bytes:
    pixels = np.asarray(pixels)
    if pixels.dtype != np.uint8:
        raise UnsupportedFormat(f"expected uint8 pixels, got {pixels.dtype}")
    if pixels.ndim == 2:
        magic = b"P5"
    elif pixels.ndim == 3 and pixels.shape[2] == 3:
        magic = b"P6"
    else:
        raise UnsupportedFormat(f"cannot encode array of shape {pixels.shape}")
    h, w = pixels.shape[:2]
    return magic + f"\n{w} {h}\n255\n".encode("ascii") + np.ascontiguousarray(pixels).tobytes()


def write(path: str | os.PathLike, pixels: np.ndarray) -> None:
    with open(path, "wb") as fh:
        fh.write(encode(pixels))
