"""Weighted frame-difference Motion History Image.

    M(i, j) = sum_{t=2..N} |I_{t-1}(i, j) - I_t(i, j)| * t / N

The weighted sum is accumulated as sum(|d| * t), which is integer valued and
therefore exact in float64 for any realistic N, and divided by N once when
``accum`` is read. The result is the correctly rounded value of the formula and
does not depend on summation order, so chunked or parallel reductions match
the sequential fold bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DimensionMismatch, InsufficientFrames
from .frames import FrameStream, luma

# pixels per scratch chunk; bounds temporaries (scratch plus numpy cast buffers) to about 48 KiB
CHUNK = 2048


@dataclass
class MotionHistoryImage:
    width: int
    height: int
    weighted_sum: np.ndarray  # (H, W) float64, sum of |d| * weight numerator
    divisor: float  # N, or 1 for uniform weights
    source_frame_count: int

    @property
    def accum(self) -> np.ndarray:
        return self.weighted_sum / self.divisor


class _Accumulator:
    """Streaming fold of weighted absolute differences into one float64 grid."""

    def __init__(self, height: int, width: int, out: np.ndarray | None = None):
        if out is None:
            out = np.zeros((height, width), dtype=np.float64)
        self.sum = out
        self._flat = self.sum.reshape(-1)
        self._scratch = np.empty(min(CHUNK, self._flat.size), dtype=np.float64)

    def add(self, prev: np.ndarray, cur: np.ndarray, weight: float) -> None:
        a = prev.reshape(-1)
        b = cur.reshape(-1)
        n = a.size
        for s in range(0, n, CHUNK):
            e = min(s + CHUNK, n)
            tmp = self._scratch[: e - s]
            np.subtract(a[s:e], b[s:e], out=tmp, dtype=np.float64)
            np.abs(tmp, out=tmp)
            tmp *= weight
            self._flat[s:e] += tmp


def _gray_frames(stream: FrameStream) -> Iterable[np.ndarray]:
    for frame in stream:
        yield luma(frame.pixels)


def compute_mhi(stream: FrameStream, uniform_weights: bool = False) -> MotionHistoryImage:
    """One pass over ``stream``; keeps only the previous frame and the accumulator.

    Colour frames are converted to BT.601 luma first. With ``uniform_weights``
    every difference gets weight 1 instead of t/N.
    """
    n = stream.frame_count
    if n < 2:
        raise InsufficientFrames(f"need at least 2 frames, got {n}")
    acc = _Accumulator(stream.height, stream.width)
    prev = None
    for t, cur in enumerate(_gray_frames(stream), start=1):
        if cur.shape != acc.sum.shape:
            raise DimensionMismatch(f"frame {t} has shape {cur.shape}, expected {acc.sum.shape}")
        if prev is not None:
            acc.add(prev, cur, 1.0 if uniform_weights else float(t))
        prev = cur
    return MotionHistoryImage(
        stream.width, stream.height, acc.sum, 1.0 if uniform_weights else float(n), n
    )


def quantize(values: np.ndarray, peak: float | None = None) -> np.ndarray:
    """Scale so ``peak`` (default: the max) maps to 255, rounding half up."""
    if peak is None:
        peak = float(values.max()) if values.size else 0.0
    if peak <= 0:
        return np.zeros(values.shape, dtype=np.uint8)
    out = np.floor(255.0 * values / peak + 0.5)
    return np.clip(out, 0, 255).astype(np.uint8)


def quantize_mhi(mhi: MotionHistoryImage) -> np.ndarray:
    """8-bit grayscale rendering normalised by the image's own maximum."""
    return quantize(mhi.accum)
