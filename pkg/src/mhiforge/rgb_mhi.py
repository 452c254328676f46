"""Tri-temporal RGB-MHI: one motion history per third of the video.

The first third goes to the blue channel, the middle third to green and the
last third to red. Each third is a self-contained MHI with local weights
t_local / N_part, so its channel equals ``compute_mhi`` of that sub-stream.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InsufficientFrames
from .frames import FrameStream, luma
from .mhi import MotionHistoryImage, _Accumulator, quantize

CHANNELS = ("B", "G", "R")


def split_thirds(n: int) -> list[tuple[int, int]]:
    """Split frames 1..n into three contiguous inclusive ranges.

    Part sizes differ by at most one; remainder frames go to the earliest parts.

    >>> split_thirds(10)
    [(1, 4), (5, 7), (8, 10)]
    """
    if n < 6:
        raise InsufficientFrames(f"RGB-MHI needs at least 6 frames, got {n}")
    base, rem = divmod(n, 3)
    bounds = []
    start = 1
    for p in range(3):
        size = base + (1 if p < rem else 0)
        bounds.append((start, start + size - 1))
        start += size
    return bounds


@dataclass
class RgbMhiImage:
    width: int
    height: int
    channel_sums: np.ndarray  # (3, H, W) float64 weighted sums in B, G, R order
    divisors: tuple[float, float, float]
    part_bounds: list[tuple[int, int]]

    @property
    def channel_accums(self) -> np.ndarray:
        """(3, H, W) accumulators in B, G, R order."""
        return self.channel_sums / np.asarray(self.divisors)[:, None, None]

    def channel(self, name: str) -> np.ndarray:
        p = CHANNELS.index(name)
        return self.channel_sums[p] / self.divisors[p]

    def part_mhi(self, name: str) -> MotionHistoryImage:
        p = CHANNELS.index(name)
        first, last = self.part_bounds[p]
        return MotionHistoryImage(
            self.width, self.height, self.channel_sums[p], self.divisors[p], last - first + 1
        )


def compute_rgb_mhi(stream: FrameStream, uniform_weights: bool = False) -> RgbMhiImage:
    """Single pass over the stream; differences never cross part boundaries."""
    bounds = split_thirds(stream.frame_count)
    sums = np.zeros((3, stream.height, stream.width), dtype=np.float64)
    accs = [_Accumulator(stream.height, stream.width, out=sums[p]) for p in range(3)]
    part = 0
    prev = None
    for frame in stream:
        t = frame.index
        cur = luma(frame.pixels)
        if cur.shape != accs[0].sum.shape:
            raise DimensionMismatch(f"frame {t} has shape {cur.shape}, expected {accs[0].sum.shape}")
        while t > bounds[part][1]:
            part += 1
        local_t = t - bounds[part][0] + 1
        if local_t > 1:
            accs[part].add(prev, cur, 1.0 if uniform_weights else float(local_t))
        prev = cur
    if uniform_weights:
        divisors = (1.0, 1.0, 1.0)
    else:
        divisors = tuple(float(last - first + 1) for first, last in bounds)
    return RgbMhiImage(stream.width, stream.height, sums, divisors, bounds)


def quantize_rgb_mhi(img: RgbMhiImage) -> np.ndarray:
    """(H, W, 3) uint8 in R, G, B pixel order, one shared scale for all channels."""
    accums = img.channel_accums
    peak = float(accums.max()) if accums.size else 0.0
    bgr = quantize(accums, peak)
    return np.ascontiguousarray(bgr[::-1].transpose(1, 2, 0))
