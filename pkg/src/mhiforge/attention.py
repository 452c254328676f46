"""Motion-based spatial attention and the embedded-Gaussian non-local block."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFiniteInput


def softmax(x: np.ndarray, axis=None) -> np.ndarray:
    shifted = x - np.max(x, axis=axis, keepdims=True)
    e = np.exp(shifted)
    return e / np.sum(e, axis=axis, keepdims=True)


def channel_global_average_pool(features: np.ndarray) -> np.ndarray:
    """Mean over the leading channel axis; all other axes are kept."""
    features = np.asarray(features, dtype=np.float64)
    return features.mean(axis=0)


@dataclass
class SaliencyMap:
    alpha: np.ndarray  # (H, W), softmax over all positions
    alpha_norm: np.ndarray  # (H, W), min-max rescaled to [0, 1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.alpha.shape


def min_max_normalize(alpha: np.ndarray) -> np.ndarray:
    lo, hi = alpha.min(), alpha.max()
    if hi == lo:
        # a uniform map must not attenuate anything
        return np.ones_like(alpha)
    return (alpha - lo) / (hi - lo)


def saliency_from_features(features: np.ndarray) -> SaliencyMap:
    """Attention weights from a (C, H, W) feature map of the RGB-MHI model.

    The channel-averaged map is passed through a softmax taken jointly over
    all H*W positions, then min-max normalised.
    """
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 3:
        raise DimensionMismatch(f"expected (C, H, W) features, got shape {features.shape}")
    if not np.all(np.isfinite(features)):
        raise NonFiniteInput("feature map contains NaN or infinity")
    pooled = channel_global_average_pool(features)
    alpha = softmax(pooled.reshape(-1)).reshape(pooled.shape)
    return SaliencyMap(alpha, min_max_normalize(alpha))


def apply_saliency(features: np.ndarray, saliency: SaliencyMap) -> np.ndarray:
    """Multiply (C, T, H, W) or (C, H, W) features by alpha_norm, broadcast over C and T."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim < 2 or features.shape[-2:] != saliency.alpha_norm.shape:
        raise DimensionMismatch(
            f"saliency is {saliency.alpha_norm.shape}, features spatial dims are {features.shape[-2:]}"
        )
    return features * saliency.alpha_norm


@dataclass
class NonLocalParams:
    """1x1x1 convolution weights as channel-mixing matrices (no bias)."""

    theta: np.ndarray  # (C/2, C)
    phi: np.ndarray  # (C/2, C)
    g: np.ndarray  # (C/2, C)
    w_z: np.ndarray  # (C, C/2)
    pool_factor: int = 1

    def __post_init__(self):
        self.theta, self.phi, self.g, self.w_z = (
            np.asarray(m, dtype=np.float64) for m in (self.theta, self.phi, self.g, self.w_z)
        )
        if self.theta.ndim != 2:
            raise DimensionMismatch(f"theta must be a matrix, got shape {self.theta.shape}")
        inner, c = self.theta.shape
        if c % 2 or inner != c // 2:
            raise DimensionMismatch(f"theta must be (C/2, C) with C even, got {self.theta.shape}")
        for name in ("phi", "g"):
            if getattr(self, name).shape != (inner, c):
                raise DimensionMismatch(f"{name} must be {(inner, c)}, got {getattr(self, name).shape}")
        if self.w_z.shape != (c, inner):
            raise DimensionMismatch(f"w_z must be {(c, inner)}, got {self.w_z.shape}")
        if self.pool_factor < 1:
            raise DimensionMismatch(f"pool_factor must be >= 1, got {self.pool_factor}")

    @property
    def channels(self) -> int:
        return self.theta.shape[1]

    @classmethod
    def random(cls, channels: int, rng: np.random.Generator, pool_factor: int = 1, scale: float = 0.5):
        half = channels // 2
        return cls(
            rng.normal(scale=scale, size=(half, channels)),
            rng.normal(scale=scale, size=(half, channels)),
            rng.normal(scale=scale, size=(half, channels)),
            rng.normal(scale=scale, size=(channels, half)),
            pool_factor,
        )


def _spatial_max_pool(v: np.ndarray, p: int) -> np.ndarray:
    if p == 1:
        return v
    c, t, h, w = v.shape
    return v.reshape(c, t, h // p, p, w // p, p).max(axis=(3, 5))


def non_local_block(x: np.ndarray, params: NonLocalParams, return_attention: bool = False):
    """z = W_z softmax(theta(X)^T phi(X)) g(X) + X over all T*H*W positions.

    phi and g outputs are max-pooled over H and W with stride ``pool_factor``
    before the pairwise step. With ``return_attention`` the (P, P') attention
    matrix is returned as well.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 4:
        raise DimensionMismatch(f"expected (C, T, H, W) input, got shape {x.shape}")
    c, t, h, w = x.shape
    if c != params.channels:
        raise DimensionMismatch(f"input has {c} channels, params expect {params.channels}")
    p = params.pool_factor
    if h % p or w % p:
        raise DimensionMismatch(f"spatial dims {h}x{w} not divisible by pool factor {p}")

    flat = x.reshape(c, -1)
    inner = params.theta.shape[0]
    queries = params.theta @ flat
    keys = _spatial_max_pool((params.phi @ flat).reshape(inner, t, h, w), p).reshape(inner, -1)
    values = _spatial_max_pool((params.g @ flat).reshape(inner, t, h, w), p).reshape(inner, -1)

    attn = softmax(queries.T @ keys, axis=1)
    y = attn @ values.T  # (P, C/2)
    z = (params.w_z @ y.T + flat).reshape(x.shape)
    if return_attention:
        return z, attn
    return z
