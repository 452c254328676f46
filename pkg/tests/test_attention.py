import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import naive_non_local
from mhiforge.attention import (
    NonLocalParams,
    SaliencyMap,
    apply_saliency,
    channel_global_average_pool,
    non_local_block,
    saliency_from_features,
)
from mhiforge.errors import DimensionMismatch, NonFiniteInput

finite = st.floats(-5, 5, allow_nan=False)
feature_maps = arrays(np.float64, st.tuples(st.integers(1, 4), st.integers(1, 5), st.integers(1, 5)), elements=finite)


def test_constant_map_is_uniform():
    s = saliency_from_features(np.full((3, 2, 4), 1.7))
    np.testing.assert_allclose(s.alpha, 1 / 8, rtol=0, atol=1e-15)
    np.testing.assert_array_equal(s.alpha_norm, 1.0)


def test_single_position():
    s = saliency_from_features(np.array([[[4.2]]]))
    assert s.alpha.tolist() == [[1.0]]
    assert s.alpha_norm.tolist() == [[1.0]]


def test_two_positions_hand_softmax():
    s = saliency_from_features(np.array([[[0.0, math.log(3)]]]))
    np.testing.assert_allclose(s.alpha, [[0.25, 0.75]], atol=1e-15)
    np.testing.assert_array_equal(s.alpha_norm, [[0.0, 1.0]])


def test_non_finite_rejected():
    with pytest.raises(NonFiniteInput):
        saliency_from_features(np.array([[[0.0, np.nan]]]))


def test_wrong_rank():
    with pytest.raises(DimensionMismatch):
        saliency_from_features(np.zeros((2, 2)))


@given(feature_maps)
def test_saliency_invariants(y):
    s = saliency_from_features(y)
    assert abs(s.alpha.sum() - 1) < 1e-9
    assert np.all(s.alpha > 0)
    assert s.alpha_norm.min() >= 0 and s.alpha_norm.max() <= 1
    if s.alpha.max() != s.alpha.min():
        assert s.alpha_norm.min() == 0.0 and s.alpha_norm.max() == 1.0
    else:
        np.testing.assert_array_equal(s.alpha_norm, 1.0)


@given(feature_maps, st.floats(-50, 50))
def test_softmax_shift_invariance(y, c):
    a = saliency_from_features(y)
    b = saliency_from_features(y + c)
    np.testing.assert_allclose(a.alpha, b.alpha, rtol=0, atol=1e-9)
    if a.alpha.max() - a.alpha.min() > 1e-6:
        np.testing.assert_allclose(a.alpha_norm, b.alpha_norm, rtol=0, atol=1e-9)


def test_gap_examples():
    y = np.stack([np.zeros((2, 3)), np.full((2, 3), 2.0)])
    np.testing.assert_array_equal(channel_global_average_pool(y), np.ones((2, 3)))
    one = np.arange(6.0).reshape(1, 2, 3)
    np.testing.assert_array_equal(channel_global_average_pool(one), one[0])


def test_gap_brute_force(rng):
    y = rng.normal(size=(5, 2, 3, 4))
    out = channel_global_average_pool(y)
    assert out.shape == (2, 3, 4)
    for idx in np.ndindex(2, 3, 4):
        assert out[idx] == pytest.approx(sum(y[(c,) + idx] for c in range(5)) / 5, rel=1e-12)


def _map(norm):
    norm = np.asarray(norm, dtype=np.float64)
    return SaliencyMap(norm / norm.sum() if norm.sum() else norm, norm)


def test_apply_identity(rng):
    x = rng.normal(size=(3, 2, 4, 5))
    np.testing.assert_array_equal(apply_saliency(x, _map(np.ones((4, 5)))), x)


def test_apply_zero_position(rng):
    x = rng.normal(size=(3, 2, 4, 5))
    m = np.ones((4, 5))
    m[1, 2] = 0
    out = apply_saliency(x, _map(m))
    np.testing.assert_array_equal(out[:, :, 1, 2], 0)


def test_apply_mismatch(rng):
    with pytest.raises(DimensionMismatch):
        apply_saliency(rng.normal(size=(3, 2, 4, 5)), _map(np.ones((5, 4))))


@given(arrays(np.float64, (2, 3, 4, 4), elements=finite), st.floats(-4, 4),
       arrays(np.float64, (4, 4), elements=st.floats(0, 1)))
def test_apply_linear(x, k, m):
    s = _map(m)
    np.testing.assert_allclose(apply_saliency(k * x, s), k * apply_saliency(x, s), rtol=1e-12, atol=1e-12)


@given(arrays(np.float64, (2, 1, 3, 3), elements=finite),
       arrays(np.float64, (3, 3), elements=st.floats(0, 1)),
       arrays(np.float64, (3, 3), elements=st.floats(0, 1)))
def test_apply_monotone_in_weights(x, m1, m2):
    lo, hi = np.minimum(m1, m2), np.maximum(m1, m2)
    a = np.abs(apply_saliency(x, _map(lo)))
    b = np.abs(apply_saliency(x, _map(hi)))
    assert np.all(a <= b)


def test_apply_3d_features(rng):
    x = rng.normal(size=(3, 4, 5))
    m = rng.uniform(size=(4, 5))
    np.testing.assert_array_equal(apply_saliency(x, _map(m)), x * m)


def _params(rng, c, pool=1, zero_wz=False):
    p = NonLocalParams.random(c, rng, pool)
    if zero_wz:
        p.w_z[:] = 0
    return p


def test_nl_zero_output_projection_is_identity(rng):
    x = rng.normal(size=(4, 2, 3, 3))
    z = non_local_block(x, _params(rng, 4, zero_wz=True))
    np.testing.assert_array_equal(z, x)


def test_nl_single_position(rng):
    x = rng.normal(size=(4, 1, 1, 1))
    p = _params(rng, 4)
    z, attn = non_local_block(x, p, return_attention=True)
    assert attn.tolist() == [[1.0]]
    expected = p.w_z @ (p.g @ x.reshape(4, 1)) + x.reshape(4, 1)
    np.testing.assert_allclose(z.reshape(4, 1), expected, rtol=1e-12)


@pytest.mark.parametrize("shape, pool", [((4, 2, 3, 3), 1), ((2, 1, 4, 4), 2), ((6, 2, 2, 4), 2), ((4, 1, 8, 8), 1)])
def test_nl_matches_naive_oracle(rng, shape, pool):
    x = rng.normal(size=shape)
    p = _params(rng, shape[0], pool)
    z, attn = non_local_block(x, p, return_attention=True)
    z_ref, attn_ref = naive_non_local(x, p.theta, p.phi, p.g, p.w_z, pool)
    np.testing.assert_allclose(attn, attn_ref, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(z, z_ref, rtol=1e-6, atol=1e-12)
    np.testing.assert_allclose(attn.sum(axis=1), 1.0, rtol=0, atol=1e-9)


def test_nl_shape_checks(rng):
    with pytest.raises(DimensionMismatch):
        non_local_block(rng.normal(size=(6, 1, 2, 2)), _params(rng, 4))
    with pytest.raises(DimensionMismatch):
        non_local_block(rng.normal(size=(4, 1, 3, 3)), _params(rng, 4, pool=2))
    with pytest.raises(DimensionMismatch):
        NonLocalParams(np.zeros((1, 3)), np.zeros((1, 3)), np.zeros((1, 3)), np.zeros((3, 1)))
    with pytest.raises(DimensionMismatch):
        NonLocalParams(np.zeros((2, 4)), np.zeros((2, 4)), np.zeros((2, 4)), np.zeros((2, 4)))
