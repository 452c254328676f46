"""Frame sampling, square cropping around a person box, and the x6 augmentation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BoxTooLarge, EmptyStream, InvalidBoundingBox
from .frames import BoundingBox, hflip

EXPANSIONS = ("center", "left-first", "right-first")
VARIANT_NAMES = ("c0", "l0", "r0", "c1", "l1", "r1")


@dataclass(frozen=True)
class SamplingPlan:
    source_count: int
    skip_head: int
    skip_tail: int
    indices: tuple[int, ...]  # 1-based source frame positions


def skip_count(n_frames: int, target: int = 32, max_skip: int = 10) -> int:
    """Frames dropped from each end: min(max_skip, max(0, (F - target) // 4))."""
    return min(max_skip, max(0, (n_frames - target) // 4))


def plan_sampling(n_frames: int, target: int = 32, max_skip: int = 10) -> SamplingPlan:
    """Pick exactly ``target`` frames, evenly spaced over the trimmed middle.

    Positions are rounded half up, so short clips repeat frames instead of
    extrapolating.
    """
    if n_frames < 1:
        raise EmptyStream(f"cannot sample from {n_frames} frames")
    if target < 1:
        raise ValueError(f"target must be positive, got {target}")
    skip = skip_count(n_frames, target, max_skip)
    remaining = n_frames - 2 * skip
    if target == 1:
        offsets = [remaining // 2]
    else:
        den = 2 * (target - 1)
        offsets = [(2 * k * (remaining - 1) + target - 1) // den for k in range(target)]
    return SamplingPlan(n_frames, skip, skip, tuple(1 + skip + o for o in offsets))


@dataclass(frozen=True)
class AugmentationVariant:
    expansion: str = "center"
    vertical_shift: int = 0
    hflip: bool = False

    def __post_init__(self):
        if self.expansion not in EXPANSIONS:
            raise ValueError(f"unknown expansion {self.expansion!r}")


def _place(start: int, extent: int, grow: int, mode: str) -> int:
    """New start coordinate after growing an interval by ``grow`` pixels."""
    if mode == "center":
        return start - grow // 2  # odd pixel goes to the far side
    if mode == "left-first":
        return start - grow
    return start


def square_crop(frame_shape: tuple[int, int], bbox: BoundingBox, variant: AugmentationVariant = AugmentationVariant()) -> BoundingBox:
    """Square box of side max(w, h) around ``bbox`` inside a frame of shape (H, W).

    The short side is grown according to ``variant.expansion`` (for wide boxes
    "left-first" grows upward and "right-first" downward). The box is then
    shifted vertically and moved back inside the frame by translation; it is
    never shrunk.
    """
    frame_h, frame_w = frame_shape[:2]
    if bbox.x >= frame_w or bbox.y >= frame_h or bbox.x + bbox.w <= 0 or bbox.y + bbox.h <= 0:
        raise InvalidBoundingBox(f"{bbox} does not intersect a {frame_w}x{frame_h} frame")
    side = max(bbox.w, bbox.h)
    if side > min(frame_w, frame_h):
        raise BoxTooLarge(f"square side {side} exceeds frame {frame_w}x{frame_h}")
    x, y = bbox.x, bbox.y
    if bbox.h >= bbox.w:
        x = _place(x, bbox.w, side - bbox.w, variant.expansion)
    else:
        y = _place(y, bbox.h, side - bbox.h, variant.expansion)
    y += variant.vertical_shift
    x = min(max(x, 0), frame_w - side)
    y = min(max(y, 0), frame_h - side)
    return BoundingBox(x, y, side, side)


def _axis_taps(n_src: int, n_dst: int):
    """Integer source indices and weights for half-pixel-centre sampling.

    Source coordinate of destination pixel d is ((2d + 1) * n_src - n_dst) / (2 * n_dst);
    weights are kept as integer numerators over ``den`` so the result is exact
    and mirror symmetric.
    """
    den = 2 * n_dst
    num = (2 * np.arange(n_dst, dtype=np.int64) + 1) * n_src - n_dst
    i0 = np.floor_divide(num, den)
    rem = num - i0 * den
    low = i0 < 0
    i0[low], rem[low] = 0, 0
    high = i0 >= n_src - 1
    i0[high], rem[high] = n_src - 1, 0
    i1 = np.minimum(i0 + 1, n_src - 1)
    return i0, i1, den - rem, rem, den


def resize_bilinear(pixels: np.ndarray, size=224) -> np.ndarray:
    """Bilinear resize of (H, W) or (H, W, C) uint8 with half-pixel centres, rounded half up."""
    out_h, out_w = (size, size) if np.isscalar(size) else size
    src = np.asarray(pixels)
    h, w = src.shape[:2]
    if (h, w) == (out_h, out_w):
        return src.copy()
    y0, y1, wy0, wy1, dy = _axis_taps(h, out_h)
    x0, x1, wx0, wx1, dx = _axis_taps(w, out_w)
    s = src.astype(np.int64)
    extra = (1,) * (s.ndim - 2)
    wy0 = wy0.reshape((-1, 1) + extra)
    wy1 = wy1.reshape((-1, 1) + extra)
    wx0 = wx0.reshape((1, -1) + extra)
    wx1 = wx1.reshape((1, -1) + extra)
    top = s[y0][:, x0] * wx0 + s[y0][:, x1] * wx1
    bottom = s[y1][:, x0] * wx0 + s[y1][:, x1] * wx1
    total = top * wy0 + bottom * wy1
    d = dy * dx
    return ((2 * total + d) // (2 * d)).astype(np.uint8)


def draw_variants(seed: int, shift_limit: int = 16) -> dict[str, AugmentationVariant]:
    """The six variants: {center, left-first, right-first} x {no flip, flip}.

    The two off-centre expansions get one random vertical shift each, shared by
    their flipped twins.
    """
    rng = np.random.default_rng(seed)
    shift_l, shift_r = (int(s) for s in rng.integers(-shift_limit, shift_limit + 1, size=2))
    variants = {}
    for flip in (False, True):
        tag = "1" if flip else "0"
        variants["c" + tag] = AugmentationVariant("center", 0, flip)
        variants["l" + tag] = AugmentationVariant("left-first", shift_l, flip)
        variants["r" + tag] = AugmentationVariant("right-first", shift_r, flip)
    return {name: variants[name] for name in VARIANT_NAMES}


def crop_video(frames, box: BoundingBox, size=224, flip: bool = False) -> list[np.ndarray]:
    out = []
    for f in frames:
        patch = resize_bilinear(f[box.y:box.y + box.h, box.x:box.x + box.w], size)
        out.append(hflip(patch) if flip else patch)
    return out


def augment_set(frames, bbox: BoundingBox, seed: int = 42, shift_limit: int = 16, size=224) -> dict[str, list[np.ndarray]]:
    """Six cropped, resized (and half of them flipped) copies of a video, keyed c0 l0 r0 c1 l1 r1."""
    frames = list(frames)
    if not frames:
        raise EmptyStream("no frames to augment")
    shape = frames[0].shape
    out = {}
    for name, variant in draw_variants(seed, shift_limit).items():
        box = square_crop(shape, bbox, variant)
        out[name] = crop_video(frames, box, size, variant.hflip)
    return out
