"""Weighted late fusion of two classifiers' pre-softmax outputs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .attention import softmax
from .errors import DimensionMismatch, InvalidWeights, NonFiniteInput

FUSION_WEIGHT_GRID = ((0.7, 0.3), (0.6, 0.4), (0.5, 0.5))


@dataclass(frozen=True)
class FusionWeights:
    w1: float
    w2: float

    def __post_init__(self):
        if self.w1 < 0 or self.w2 < 0:
            raise InvalidWeights(f"weights must be non-negative, got ({self.w1}, {self.w2})")
        if self.w1 + self.w2 <= 0:
            raise InvalidWeights("w1 and w2 are both zero")

    @classmethod
    def coerce(cls, w) -> "FusionWeights":
        return w if isinstance(w, cls) else cls(*w)

    def as_tuple(self) -> tuple[float, float]:
        return (self.w1, self.w2)


@dataclass
class FusionResult:
    probabilities: np.ndarray
    predicted_class: int


def _check_logits(x1, x2) -> tuple[np.ndarray, np.ndarray]:
    x1 = np.asarray(x1, dtype=np.float64)
    x2 = np.asarray(x2, dtype=np.float64)
    if x1.shape != x2.shape or x1.shape[-1:] == (0,):
        raise DimensionMismatch(f"logit shapes differ or are empty: {x1.shape} vs {x2.shape}")
    if not (np.all(np.isfinite(x1)) and np.all(np.isfinite(x2))):
        raise NonFiniteInput("logits contain NaN or infinity")
    return x1, x2


def fuse(x1, x2, w=(0.6, 0.4)) -> FusionResult:
    """softmax(w1*x1 + w2*x2); argmax ties go to the lowest class index."""
    w = FusionWeights.coerce(w)
    x1, x2 = _check_logits(x1, x2)
    if x1.ndim != 1:
        raise DimensionMismatch(f"expected 1-D logit vectors, got shape {x1.shape}")
    combined = w.w1 * x1 + w.w2 * x2
    return FusionResult(softmax(combined), int(np.argmax(combined)))


def fuse_batch(x1, x2, w=(0.6, 0.4)) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise ``fuse`` over (B, K) arrays; returns (probabilities, predictions)."""
    w = FusionWeights.coerce(w)
    x1, x2 = _check_logits(x1, x2)
    if x1.ndim != 2:
        raise DimensionMismatch(f"expected (B, K) logit batches, got shape {x1.shape}")
    combined = w.w1 * x1 + w.w2 * x2
    return softmax(combined, axis=1), np.argmax(combined, axis=1)


def sweep_fuse(x1_batch, x2_batch, labels: Sequence[int], weight_grid) -> dict[tuple[float, float], float]:
    """Top-1 accuracy of the fused prediction for every weight pair in the grid."""
    x1 = np.asarray(x1_batch, dtype=np.float64)
    x2 = np.asarray(x2_batch, dtype=np.float64)
    labels = np.asarray(labels)
    if len(x1) != len(x2) or len(x1) != len(labels):
        raise DimensionMismatch(
            f"batch sizes differ: {len(x1)} / {len(x2)} logits, {len(labels)} labels"
        )
    if len(labels) == 0:
        raise DimensionMismatch("empty batch")
    table = {}
    for w in weight_grid:
        w = FusionWeights.coerce(w)
        _, pred = fuse_batch(x1, x2, w)
        table[w.as_tuple()] = float(np.mean(pred == labels))
    return table
