import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra import numpy as npst

from oracles import bfs_components, bfs_prune, naive_boxcar, naive_boxcar_fast
from conftest import const_frame
from floodvibe.errors import InvalidKernel, MissingChannel
from floodvibe.evaluation import iou
from floodvibe.raster import GROUND, WATER, BinaryMap, DetectorParams, SarFrame
from floodvibe.segmentation import (
    boxcar_filter,
    label_components,
    remove_small_water_components,
    segment_water,
    threshold_segment,
)
from floodvibe.synthetic import Rect, SceneSpec, generate_sequence

planes = npst.arrays(
    np.float64,
    npst.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=12),
    elements=st.floats(0, 1e3, allow_nan=False),
)
binary_maps = npst.arrays(
    np.uint8, npst.array_shapes(min_dims=2, max_dims=2, min_side=1, max_side=16), elements=st.integers(0, 1)
)


def test_oracle_matches_hand_example():
    plane = np.array([[0, 0, 0], [0, 9, 0], [0, 0, 0]], dtype=float)
    ref = naive_boxcar(plane, 3)
    assert ref[1, 1] == 1.0 and ref[0, 0] == 2.25


def test_boxcar_hand_example():
    plane = np.array([[0, 0, 0], [0, 9, 0], [0, 0, 0]], dtype=float)
    out = boxcar_filter(plane, 3)
    assert out[1, 1] == pytest.approx(1.0)
    for r, c in [(0, 0), (0, 2), (2, 0), (2, 2)]:
        assert out[r, c] == pytest.approx(2.25)


def test_even_kernel_anchoring():
    # k=2 window covers [r, r+1] x [c, c+1]
    plane = np.zeros((3, 3))
    plane[2, 2] = 4.0
    out = boxcar_filter(plane, 2)
    assert out[1, 1] == pytest.approx(1.0)
    assert out[2, 2] == pytest.approx(4.0)
    assert out[0, 0] == 0.0


@pytest.mark.parametrize("k", [1, 2, 3, 8, 20])
@pytest.mark.parametrize("value", [0.5, 0.03, 0.2, 0.0])
def test_boxcar_constant_plane(k, value):
    plane = np.full((9, 13), value)
    out = boxcar_filter(plane, k)
    assert np.all(out == value)
    assert np.all(boxcar_filter(out, k) == out)


def test_boxcar_kernel_one_is_identity(rng):
    plane = rng.random((7, 5))
    assert np.array_equal(boxcar_filter(plane, 1), plane)


@pytest.mark.parametrize("k", [0, -3, 2.5])
def test_boxcar_invalid_kernel(k):
    with pytest.raises(InvalidKernel):
        boxcar_filter(np.ones((3, 3)), k)


@given(planes, st.integers(1, 15))
def test_boxcar_matches_naive(plane, k):
    out = boxcar_filter(plane, k)
    ref = naive_boxcar_fast(plane, k)
    assert out.shape == plane.shape
    np.testing.assert_allclose(out, ref, rtol=1e-6, atol=1e-12)
    assert out.min() >= plane.min() and out.max() <= plane.max()


def test_threshold_examples():
    assert threshold_segment(np.array([[0.05]]), 0.03).values[0, 0] == GROUND
    assert threshold_segment(np.array([[0.03]]), 0.03).values[0, 0] == WATER
    assert np.all(threshold_segment(np.zeros((4, 4)), 0.03).values == WATER)


@given(planes, st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_threshold_monotone(plane, t1, t2):
    lo, hi = sorted((t1, t2))
    a = threshold_segment(plane, lo).values
    b = threshold_segment(plane, hi).values
    assert not np.any((a == WATER) & (b == GROUND))


def test_label_all_ground():
    lab = label_components(BinaryMap(np.ones((5, 5))), WATER)
    assert np.all(lab.labels == 0)
    assert lab.sizes == {}


def test_label_diagonal_pixels_are_separate():
    m = np.ones((3, 3), dtype=np.uint8)
    m[0, 0] = m[1, 1] = WATER
    lab = label_components(BinaryMap(m), WATER)
    assert lab.sizes == {1: 1, 2: 1}
    assert lab.labels[0, 0] == 1 and lab.labels[1, 1] == 2


def test_label_u_shape_merges():
    m = np.array(
        [
            [0, 1, 0],
            [0, 1, 0],
            [0, 0, 0],
        ],
        dtype=np.uint8,
    )
    lab = label_components(BinaryMap(m), WATER)
    assert lab.sizes == {1: 7}
    lab_g = label_components(BinaryMap(m), GROUND)
    assert lab_g.sizes == {1: 2}


def _check_labeling(values, target):
    lab = label_components(BinaryMap(values), target)
    comps = bfs_components(values == target)
    assert lab.n_components == len(comps)
    for i, comp in enumerate(comps, 1):
        # BFS discovers components in raster order of first pixel, same as the labels
        got = {tuple(p) for p in np.argwhere(lab.labels == i)}
        assert got == comp
        assert lab.sizes[i] == len(comp)
    assert np.all((lab.labels == 0) == (values != target))


@given(binary_maps, st.sampled_from([WATER, GROUND]))
def test_label_matches_bfs(values, target):
    _check_labeling(values, target)


@pytest.mark.parametrize("density", [0.3, 0.5, 0.6, 0.8])
def test_label_matches_bfs_32x32(rng, density):
    for _ in range(10):
        values = (rng.random((32, 32)) > density).astype(np.uint8)
        _check_labeling(values, WATER)


def _blob(n_pixels, shape=(12, 12)):
    m = np.ones(shape, dtype=np.uint8)
    m.flat[[r * shape[1] + c for r in range(2, 10) for c in range(2, 10)][:n_pixels]] = WATER
    return m


def test_prune_19_pixel_blob():
    m = _blob(19)
    assert len(bfs_components(m == WATER)) == 1
    out = remove_small_water_components(BinaryMap(m), 20)
    assert np.all(out.values == GROUND)


def test_keep_20_pixel_blob():
    m = _blob(20)
    out = remove_small_water_components(BinaryMap(m), 20)
    assert np.array_equal(out.values, m)


@given(binary_maps, st.integers(1, 30))
def test_prune_matches_oracle_and_is_idempotent(values, n):
    once = remove_small_water_components(BinaryMap(values), n)
    assert np.array_equal(once.values, bfs_prune(values, n))
    twice = remove_small_water_components(once, n)
    assert once == twice
    # GROUND pixels never change
    assert np.all(once.values[values == GROUND] == GROUND)


def test_segment_constant_frames():
    p = DetectorParams()
    assert np.all(segment_water(const_frame(0.5, shape=(16, 16)), p).values == GROUND)
    assert np.all(segment_water(const_frame(0.0, shape=(16, 16)), p).values == WATER)


def test_segment_missing_channel_propagates():
    with pytest.raises(MissingChannel):
        segment_water(const_frame(0.5), DetectorParams(channel="VH"))


@pytest.mark.parametrize("k", [0])
def test_segment_invalid_kernel_propagates(k):
    with pytest.raises(InvalidKernel):
        segment_water(const_frame(0.5), DetectorParams(kernel_size=k))


@given(npst.arrays(np.float32, (6, 7), elements=st.floats(0, 1, width=32)))
@settings(max_examples=30)
def test_segment_ignores_other_channel(vh):
    rng = np.random.default_rng(0)
    vv = rng.gamma(1.0, 0.05, (6, 7)).astype(np.float32)
    p = DetectorParams(kernel_size=3, num_components=3)
    a = segment_water(SarFrame(np.stack([vv, np.zeros_like(vv)]), ("VV", "VH")), p)
    b = segment_water(SarFrame(np.stack([vv, vh]), ("VV", "VH")), p)
    assert a == b


def test_segment_speckled_lake_matches_geometry():
    # shoreline scene: lake fills the left half, so only its right edge erodes
    # (about 3 columns for k=8 at these levels)
    spec = SceneSpec(256, 256, 1, permanent_regions=(Rect(0, 0, 256, 128),), speckle_looks=4, seed=5)
    frames, truth = generate_sequence(spec)
    seg = segment_water(frames[0], DetectorParams())
    assert iou(seg.values == WATER, truth.water[0]) >= 0.95
