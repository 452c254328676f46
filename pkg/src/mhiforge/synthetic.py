"""Synthetic gesture videos and a nearest-centroid benchmark on RGB-MHI features.

Each video is a bright anti-aliased disc on a black background following one
of eight trajectories. The set pairs gestures that share a shape but differ in
direction (circle-cw / circle-ccw, sweeps) and gestures that share a path but
differ in repetition count (tap x1 / tap x3).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import IncompleteTrainSet
from .fusion import FUSION_WEIGHT_GRID, sweep_fuse
from .frames import FrameStream
from .preprocess import plan_sampling
from .rgb_mhi import compute_rgb_mhi

TRAJECTORIES = (
    "sweep-left",
    "sweep-right",
    "sweep-up",
    "sweep-down",
    "circle-cw",
    "circle-ccw",
    "tap-x1",
    "tap-x3",
)

# golden accuracy of the default benchmark (8 classes x 50, seed 42, 80/20 split)
GOLDEN_ACCURACY = 0.95


@dataclass(frozen=True)
class GestureSpec:
    class_id: int
    trajectory: str
    blob_radius: float = 4.0
    speed_jitter: float = 0.5  # log-range of the time-warp exponent
    start_jitter: float = 8.0  # max offset of the whole path, pixels
    noise_sigma: float = 5.0
    frame_count: int = 36
    frame_size: int = 64

    def __post_init__(self):
        if self.trajectory not in TRAJECTORIES:
            raise ValueError(f"unknown trajectory {self.trajectory!r}")
        if self.frame_count < 6:
            raise ValueError("frame_count must be at least 6")


def default_specs(n_classes: int = 8, **overrides) -> list[GestureSpec]:
    if not 1 <= n_classes <= len(TRAJECTORIES):
        raise ValueError(f"n_classes must be in 1..{len(TRAJECTORIES)}")
    return [GestureSpec(i, TRAJECTORIES[i], **overrides) for i in range(n_classes)]


def path_point(trajectory: str, s: float) -> tuple[float, float]:
    """Position (x, y) in unit frame coordinates at progress s in [0, 1]; y points down."""
    if trajectory == "sweep-left":
        return 0.75 - 0.5 * s, 0.5
    if trajectory == "sweep-right":
        return 0.25 + 0.5 * s, 0.5
    if trajectory == "sweep-up":
        return 0.5, 0.75 - 0.5 * s
    if trajectory == "sweep-down":
        return 0.5, 0.25 + 0.5 * s
    if trajectory.startswith("circle"):
        sign = 1.0 if trajectory == "circle-cw" else -1.0
        a = -math.pi / 2 + sign * 2 * math.pi * s
        return 0.5 + 0.25 * math.cos(a), 0.5 + 0.25 * math.sin(a)
    reps = int(trajectory[-1])
    return 0.5, 0.4 + 0.15 * abs(math.sin(math.pi * reps * s))


def render_disc(size: int, cx: float, cy: float, radius: float) -> np.ndarray:
    """Coverage in [0, 1] of a disc, with a one-pixel linear edge ramp."""
    coords = np.arange(size, dtype=np.float64) + 0.5
    dist = np.hypot(coords[None, :] - cx, coords[:, None] - cy)
    return np.clip(radius + 0.5 - dist, 0.0, 1.0)


def render_video(spec: GestureSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """(N, S, S) uint8 video; ``rng=None`` renders the un-jittered, noise-free template."""
    n, size = spec.frame_count, spec.frame_size
    if rng is None:
        gamma, dx, dy = 1.0, 0.0, 0.0
    else:
        gamma = math.exp(rng.uniform(-spec.speed_jitter, spec.speed_jitter))
        dx, dy = rng.uniform(-spec.start_jitter, spec.start_jitter, size=2)
    video = np.empty((n, size, size), dtype=np.uint8)
    for t in range(n):
        s = (t / (n - 1)) ** gamma
        px, py = path_point(spec.trajectory, s)
        frame = 255.0 * render_disc(size, px * size + dx, py * size + dy, spec.blob_radius)
        if rng is not None and spec.noise_sigma > 0:
            frame += rng.normal(0.0, spec.noise_sigma, size=frame.shape)
        video[t] = np.clip(np.floor(frame + 0.5), 0, 255)
    return video


@dataclass
class LabeledVideo:
    video: np.ndarray
    label: int
    sample: int


def _render_one(args) -> LabeledVideo:
    spec, sample, seed = args
    rng = np.random.default_rng([seed, spec.class_id, sample])
    return LabeledVideo(render_video(spec, rng), spec.class_id, sample)


def generate_dataset(specs, samples_per_class: int, seed: int, jobs: int = 1) -> list[LabeledVideo]:
    """Class-major list of videos; each one seeded from (seed, class, sample) so
    the output does not depend on ``jobs``."""
    if samples_per_class < 1:
        raise ValueError("samples_per_class must be at least 1")
    work = [(spec, i, seed) for spec in specs for i in range(samples_per_class)]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(_render_one, work))
    return [_render_one(w) for w in work]


def _downsample(img: np.ndarray, grid: int) -> np.ndarray:
    """Block-mean an (..., H, W) array down to (..., grid, grid)."""
    h, w = img.shape[-2:]
    rows = np.array_split(np.arange(h), grid)
    cols = np.array_split(np.arange(w), grid)
    out = np.empty(img.shape[:-2] + (grid, grid))
    for i, r in enumerate(rows):
        band = img[..., r[0]:r[-1] + 1, :]
        for j, c in enumerate(cols):
            out[..., i, j] = band[..., c[0]:c[-1] + 1].mean(axis=(-2, -1))
    return out


def _unit(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    return v / norm if norm > 0 else v


def rgb_mhi_features(video: np.ndarray, grid: int = 32) -> np.ndarray:
    """Flattened, L2-normalised (3, grid, grid) RGB-MHI accumulators."""
    img = compute_rgb_mhi(FrameStream.from_arrays(video))
    return _unit(_downsample(img.channel_accums, grid).reshape(-1))


def frame_stack_features(video: np.ndarray, frames: int = 4, grid: int = 16) -> np.ndarray:
    """Appearance baseline: a few uniformly sampled raw frames, downsampled, concatenated, L2-normalised."""
    idx = [i - 1 for i in plan_sampling(len(video), frames, max_skip=0).indices]
    return _unit(_downsample(video[idx].astype(np.float64), grid).reshape(-1))


class NearestCentroid:
    def __init__(self, n_classes: int | None = None):
        self.n_classes = n_classes
        self.centroids = None

    def fit(self, X, y) -> "NearestCentroid":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        k = self.n_classes if self.n_classes is not None else int(y.max()) + 1
        missing = sorted(set(range(k)) - set(y.tolist()))
        if missing:
            raise IncompleteTrainSet(f"classes {missing} have no training samples")
        self.centroids = np.stack([X[y == c].mean(axis=0) for c in range(k)])
        self.n_classes = k
        return self

    def decision_function(self, X) -> np.ndarray:
        """Negative squared distance to each centroid, usable as logits."""
        X = np.asarray(X, dtype=np.float64)
        diff = X[:, None, :] - self.centroids[None, :, :]
        return -np.einsum("ijk,ijk->ij", diff, diff)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)


def nearest_centroid_eval(train_X, train_y, test_X, test_y, n_classes: int | None = None) -> float:
    test_y = np.asarray(test_y)
    if n_classes is None:
        n_classes = int(max(np.max(train_y), np.max(test_y))) + 1
    model = NearestCentroid(n_classes).fit(train_X, train_y)
    return float(np.mean(model.predict(test_X) == test_y))


def split_per_class(labels, train_frac: float) -> tuple[np.ndarray, np.ndarray]:
    """First round(train_frac * n_c) samples of every class train, the rest test."""
    labels = np.asarray(labels)
    train, test = [], []
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        cut = int(round(train_frac * len(idx)))
        train.extend(idx[:cut])
        test.extend(idx[cut:])
    return np.array(sorted(train), dtype=int), np.array(sorted(test), dtype=int)


def fusion_bench(mhi_logits, second_logits, labels, weight_grid=None) -> dict[tuple[float, float], float]:
    """Accuracy of fused logits over the grid; (1, 0) and (0, 1) give the standalone rows."""
    if weight_grid is None:
        weight_grid = ((1.0, 0.0),) + FUSION_WEIGHT_GRID + ((0.0, 1.0),)
    return sweep_fuse(mhi_logits, second_logits, labels, weight_grid)


def confusion_matrix(y_true, y_pred, n_classes: int) -> np.ndarray:
    cm = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(cm, (np.asarray(y_true), np.asarray(y_pred)), 1)
    return cm


def total_mass(video: np.ndarray) -> float:
    return float(compute_rgb_mhi(FrameStream.from_arrays(video)).channel_accums.sum())


def tap_mass_ratio(**spec_kwargs) -> float:
    """Summed RGB-MHI accumulation of tap x3 over tap x1, on noise-free templates."""
    one = render_video(GestureSpec(0, "tap-x1", **spec_kwargs))
    three = render_video(GestureSpec(0, "tap-x3", **spec_kwargs))
    return total_mass(three) / total_mass(one)


def circle_feature_distance(grid: int = 32, **spec_kwargs) -> float:
    cw = rgb_mhi_features(render_video(GestureSpec(0, "circle-cw", **spec_kwargs)), grid)
    ccw = rgb_mhi_features(render_video(GestureSpec(0, "circle-ccw", **spec_kwargs)), grid)
    return float(np.linalg.norm(cw - ccw))


def run_benchmark(n_classes: int = 8, samples: int = 50, seed: int = 42, train_frac: float = 0.8,
                  jobs: int = 1, grid: int = 32) -> dict:
    """Generate, featurise, classify and fuse; returns a JSON-ready report."""
    start = time.perf_counter()
    specs = default_specs(n_classes)
    data = generate_dataset(specs, samples, seed, jobs)
    labels = np.array([d.label for d in data])

    def featurise(d):
        return rgb_mhi_features(d.video, grid), frame_stack_features(d.video)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            feats = list(pool.map(featurise, data))
    else:
        feats = [featurise(d) for d in data]
    mhi_X = np.stack([f[0] for f in feats])
    stack_X = np.stack([f[1] for f in feats])

    train, test = split_per_class(labels, train_frac)
    mhi_model = NearestCentroid(n_classes).fit(mhi_X[train], labels[train])
    stack_model = NearestCentroid(n_classes).fit(stack_X[train], labels[train])
    mhi_logits = mhi_model.decision_function(mhi_X[test])
    stack_logits = stack_model.decision_function(stack_X[test])
    y_test = labels[test]
    pred = np.argmax(mhi_logits, axis=1)

    cm = confusion_matrix(y_test, pred, n_classes)
    per_class = {
        TRAJECTORIES[c]: float(cm[c, c] / cm[c].sum()) if cm[c].sum() else None
        for c in range(n_classes)
    }
    table = fusion_bench(mhi_logits, stack_logits, y_test)
    return {
        "config": {"classes": n_classes, "samples": samples, "seed": seed,
                   "train_frac": train_frac, "grid": grid,
                   "gesture": {k: v for k, v in asdict(specs[0]).items()
                               if k not in ("class_id", "trajectory")}},
        "train_size": int(len(train)),
        "test_size": int(len(test)),
        "accuracy": float(np.mean(pred == y_test)),
        "frame_stack_accuracy": float(np.mean(np.argmax(stack_logits, axis=1) == y_test)),
        "per_class_accuracy": per_class,
        "confusion_matrix": cm.tolist(),
        "fusion": [{"w1": w1, "w2": w2, "accuracy": acc} for (w1, w2), acc in table.items()],
        "tap_mass_ratio": tap_mass_ratio(frame_count=specs[0].frame_count, frame_size=specs[0].frame_size),
        "circle_feature_distance": circle_feature_distance(grid),
        "runtime_s": time.perf_counter() - start,
    }
