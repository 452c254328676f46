"""MHT1 dense tensor files.

Layout: ``MHT1`` magic, little-endian u32 rank, rank little-endian u32 dims,
then the values as row-major little-endian float32. Values are widened to
float64 on load.
"""

from __future__ import annotations

import io
import os
import struct
from typing import BinaryIO

import numpy as np

from .errors import FileNotFound, UnsupportedFormat

MAGIC = b"MHT1"


def write_tensor(fh: BinaryIO, arr: np.ndarray) -> None:
    arr = np.asarray(arr)
    fh.write(MAGIC)
    fh.write(struct.pack("<I", arr.ndim))
    fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
    fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def read_tensor(fh: BinaryIO, source: str = "<stream>") -> np.ndarray:
    magic = fh.read(4)
    if magic != MAGIC:
        raise UnsupportedFormat(f"{source}: bad tensor magic {magic!r}")
    raw = fh.read(4)
    if len(raw) != 4:
        raise UnsupportedFormat(f"{source}: truncated tensor header")
    (rank,) = struct.unpack("<I", raw)
    raw = fh.read(4 * rank)
    if len(raw) != 4 * rank:
        raise UnsupportedFormat(f"{source}: truncated tensor dims")
    dims = struct.unpack(f"<{rank}I", raw)
    count = int(np.prod(dims, dtype=np.int64))
    data = fh.read(4 * count)
    if len(data) != 4 * count:
        raise UnsupportedFormat(f"{source}: truncated tensor data")
    return np.frombuffer(data, dtype="<f4").astype(np.float64).reshape(dims)


def save(path: str | os.PathLike, *arrays: np.ndarray) -> None:
    """Write one or more concatenated tensors."""
    with open(path, "wb") as fh:
        for arr in arrays:
            write_tensor(fh, arr)


def load_all(path: str | os.PathLike) -> list[np.ndarray]:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except FileNotFoundError:
        raise FileNotFound(f"{path}: no such file") from None
    buf = io.BytesIO(data)
    out = []
    while buf.tell() < len(data):
        out.append(read_tensor(buf, str(path)))
    return out


def load(path: str | os.PathLike) -> np.ndarray:
    tensors = load_all(path)
    if len(tensors) != 1:
        raise UnsupportedFormat(f"{path}: expected one tensor, found {len(tensors)}")
    return tensors[0]
