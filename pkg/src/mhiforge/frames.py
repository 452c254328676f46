"""Lazily decoded frame streams backed by PGM/PPM files or in-memory arrays."""

from __future__ import annotations

import os
import weakref
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import netpbm
from .errors import DimensionMismatch, EmptyStream, FileNotFound, InvalidBoundingBox

FRAME_SUFFIXES = (".pgm", ".ppm")


class _DecodeCounter:
    """Counts decoded frame buffers that are still alive.

    Used by tests to check that streaming consumers keep a bounded number of
    frames resident.
    """

    def __init__(self):
        self.live = 0
        self.peak = 0

    def reset(self):
        self.peak = self.live

    def track(self, arr: np.ndarray) -> None:
        self.live += 1
        self.peak = max(self.peak, self.live)
        weakref.finalize(arr, self._release)

    def _release(self):
        self.live -= 1


decode_counter = _DecodeCounter()


@dataclass(frozen=True)
class Frame:
    index: int  # 1-based position in the stream
    pixels: np.ndarray  # (H, W) uint8 or (H, W, 3) uint8, RGB order

    @property
    def color_mode(self) -> str:
        return "gray8" if self.pixels.ndim == 2 else "rgb8"


@dataclass(frozen=True)
class BoundingBox:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise InvalidBoundingBox(f"box extent must be positive, got {self.w}x{self.h}")

    @classmethod
    def parse(cls, text: str) -> "BoundingBox":
        parts = text.replace(",", " ").split()
        if len(parts) != 4:
            raise InvalidBoundingBox(f"expected 4 integers, got {text!r}")
        try:
            return cls(*(int(p) for p in parts))
        except ValueError:
            raise InvalidBoundingBox(f"non-integer box {text!r}") from None


@dataclass
class FrameStream:
    """Ordered frames with identical size and color mode.

    ``source`` holds either file paths (decoded on demand) or arrays. Iterating
    yields each frame exactly once, in order; nothing is cached.
    """

    width: int
    height: int
    color_mode: str
    source: Sequence = field(repr=False)
    bbox: BoundingBox | None = None

    @property
    def frame_count(self) -> int:
        return len(self.source)

    def __len__(self) -> int:
        return len(self.source)

    def __iter__(self) -> Iterator[Frame]:
        for t, item in enumerate(self.source, start=1):
            if isinstance(item, np.ndarray):
                pixels = item
            else:
                pixels = netpbm.read(item)
                decode_counter.track(pixels)
            yield Frame(t, pixels)

    @classmethod
    def from_arrays(cls, frames, bbox: BoundingBox | None = None) -> "FrameStream":
        """Wrap a sequence of uint8 arrays, or an (N, H, W[, 3]) array, as a stream."""
        if isinstance(frames, np.ndarray):
            frames = list(frames)
        if len(frames) == 0:
            raise EmptyStream("no frames")
        first = np.asarray(frames[0])
        arrays = []
        for i, f in enumerate(frames):
            f = np.asarray(f)
            if f.dtype != np.uint8:
                raise DimensionMismatch(f"frame {i + 1}: expected uint8, got {f.dtype}")
            if f.shape != first.shape:
                raise DimensionMismatch(f"frame {i + 1} has shape {f.shape}, expected {first.shape}")
            arrays.append(f)
        if first.ndim == 2:
            mode = "gray8"
        elif first.ndim == 3 and first.shape[2] == 3:
            mode = "rgb8"
        else:
            raise DimensionMismatch(f"unsupported frame shape {first.shape}")
        return cls(first.shape[1], first.shape[0], mode, arrays, bbox)

    def to_arrays(self) -> list[np.ndarray]:
        return [f.pixels for f in self]


def _from_paths(paths: list[Path], bbox: BoundingBox | None) -> FrameStream:
    if not paths:
        raise EmptyStream("stream lists no frames")
    headers = []
    for p in paths:
        if not p.is_file():
            raise FileNotFound(f"{p}: no such file")
        headers.append(netpbm.read_header(p))
    ref = headers[0]
    for p, h in zip(paths, headers):
        if (h.width, h.height, h.channels) != (ref.width, ref.height, ref.channels):
            raise DimensionMismatch(
                f"{p} is {h.width}x{h.height}x{h.channels}, "
                f"expected {ref.width}x{ref.height}x{ref.channels}"
            )
    mode = "gray8" if ref.channels == 1 else "rgb8"
    return FrameStream(ref.width, ref.height, mode, list(paths), bbox)


def read_manifest(manifest_path: str | os.PathLike) -> tuple[list[Path], BoundingBox | None]:
    """Parse a manifest: one relative frame path per line, optional final ``bbox x y w h``."""
    manifest_path = Path(manifest_path)
    try:
        text = manifest_path.read_text(encoding="utf-8")
    except FileNotFoundError:
        raise FileNotFound(f"{manifest_path}: no such file") from None
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    bbox = None
    if lines and lines[-1].split()[0] == "bbox":
        bbox = BoundingBox.parse(lines.pop()[len("bbox"):])
    base = manifest_path.parent
    return [base / ln for ln in lines], bbox


def open_stream(manifest_path: str | os.PathLike) -> FrameStream:
    paths, bbox = read_manifest(manifest_path)
    return _from_paths(paths, bbox)


def list_frame_files(dir_path: str | os.PathLike) -> list[Path]:
    dir_path = Path(dir_path)
    if not dir_path.is_dir():
        raise FileNotFound(f"{dir_path}: no such directory")
    names = [n for n in os.listdir(dir_path) if n.lower().endswith(FRAME_SUFFIXES)]
    names.sort(key=os.fsencode)
    return [dir_path / n for n in names]


def open_directory(dir_path: str | os.PathLike) -> FrameStream:
    """Open every .pgm/.ppm file in a directory, ordered by byte-wise filename."""
    return _from_paths(list_frame_files(dir_path), None)


def open_input(path: str | os.PathLike) -> FrameStream:
    """Directory or manifest, whichever ``path`` is."""
    if Path(path).is_dir():
        return open_directory(path)
    return open_stream(path)


def luma(pixels: np.ndarray) -> np.ndarray:
    """BT.601 luma of an (..., 3) uint8 array, rounded half up, exact integer arithmetic."""
    if pixels.ndim == 2:
        return pixels
    rgb = pixels.astype(np.uint32)
    y = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return y.astype(np.uint8)


def to_grayscale(frame: Frame) -> Frame:
    if frame.color_mode == "gray8":
        return frame
    return Frame(frame.index, luma(frame.pixels))


def hflip(pixels: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(pixels[:, ::-1])
