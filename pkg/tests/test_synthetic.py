import numpy as np
import pytest

from floodvibe.errors import InvalidSpec
from floodvibe.raster import WATER, DetectorParams
from floodvibe.segmentation import segment_water
from floodvibe.synthetic import (
    Disc,
    FloodEvent,
    Rect,
    SceneSpec,
    apply_speckle,
    generate_sequence,
    scene_from_dict,
    scene_to_dict,
    speckle_draws,
)


def test_no_regions_no_speckle_is_constant():
    spec = SceneSpec(16, 12, 5, speckle_looks=None)
    frames, truth = generate_sequence(spec)
    assert len(frames) == 5
    for f in frames:
        assert f.channel_labels == ("VV",)
        assert np.all(f.channels == np.float32(spec.ground_level))
    assert not truth.water.any() and not truth.flood.any()


def test_permanent_disc_only():
    spec = SceneSpec(32, 32, 6, permanent_regions=(Disc(16, 16, 6),), seed=2)
    _, truth = generate_sequence(spec)
    assert all(np.array_equal(truth.water[0], w) for w in truth.water)
    assert truth.water[0].sum() > 0
    assert not truth.flood.any()


def test_flood_truth_active_exactly_in_range():
    spec = SceneSpec(40, 40, 45, flood_events=(FloodEvent(Rect(5, 5, 10, 12), 35, 40),))
    _, truth = generate_sequence(spec)
    active = [t for t in range(1, 46) if truth.flood[t - 1].any()]
    assert active == list(range(35, 41))
    assert truth.flood[34].sum() == 120
    assert np.all(truth.flood <= truth.water)


def test_flood_over_permanent_water_is_not_flood():
    spec = SceneSpec(20, 20, 3, permanent_regions=(Rect(0, 0, 20, 10),),
                     flood_events=(FloodEvent(Rect(0, 5, 20, 10), 2, 2),))
    _, truth = generate_sequence(spec)
    assert truth.flood[1].sum() == 20 * 5
    assert not truth.flood[1][:, :10].any()


def test_generation_is_deterministic():
    spec = SceneSpec(24, 24, 4, permanent_regions=(Disc(5, 5, 4),), speckle_looks=2, seed=99)
    a, _ = generate_sequence(spec)
    b, _ = generate_sequence(spec)
    assert all(x.channels.tobytes() == y.channels.tobytes() for x, y in zip(a, b))
    c, _ = generate_sequence(SceneSpec(24, 24, 4, permanent_regions=(Disc(5, 5, 4),), speckle_looks=2, seed=100))
    assert a[0].channels.tobytes() != c[0].channels.tobytes()


@pytest.mark.parametrize(
    "kw",
    [
        dict(water_level=0.05),
        dict(ground_level=0.02),
        dict(speckle_looks=0.5),
        dict(flood_events=(FloodEvent(Rect(0, 0, 2, 2), 0, 3),)),
        dict(flood_events=(FloodEvent(Rect(0, 0, 2, 2), 3, 11),)),
        dict(flood_events=(FloodEvent(Rect(0, 0, 2, 2), 5, 4),)),
    ],
)
def test_invalid_specs(kw):
    with pytest.raises(InvalidSpec):
        generate_sequence(SceneSpec(8, 8, 10, **kw))


def test_speckle_of_zero_is_zero():
    draws = speckle_draws(np.random.default_rng(0), 1.0, 100)
    assert np.all(apply_speckle(0.0, 1.0, draws) == 0)


def test_speckle_unit_mean_single_look():
    draws = speckle_draws(np.random.default_rng(1), 1.0, 10**6)
    ratio = apply_speckle(0.2, 1.0, draws) / 0.2
    assert ratio.mean() == pytest.approx(1.0, abs=0.01)


def test_speckle_cv_eight_looks():
    out = apply_speckle(0.2, 8.0, speckle_draws(np.random.default_rng(2), 8.0, 10**6))
    cv = out.std() / out.mean()
    assert cv == pytest.approx(1 / np.sqrt(8), rel=0.05)


def test_noise_free_kernel_one_reproduces_truth():
    spec = SceneSpec(
        64, 64, 4, permanent_regions=(Disc(20, 20, 8),),
        flood_events=(FloodEvent(Rect(40, 30, 10, 20), 2, 3),), speckle_looks=None,
    )
    frames, truth = generate_sequence(spec)
    p = DetectorParams(kernel_size=1)
    for f, water in zip(frames, truth.water):
        assert np.array_equal(segment_water(f, p).values == WATER, water)


def test_noise_free_default_kernel_only_erodes():
    spec = SceneSpec(
        64, 64, 4, permanent_regions=(Disc(20, 20, 8),),
        flood_events=(FloodEvent(Rect(40, 30, 10, 20), 2, 3),), speckle_looks=None,
    )
    frames, truth = generate_sequence(spec)
    for f, water in zip(frames, truth.water):
        seg = segment_water(f, DetectorParams()).values == WATER
        assert np.all(seg <= water)


def test_scene_dict_round_trip():
    spec = SceneSpec(
        30, 20, 9, permanent_regions=(Disc(3, 4, 2.5), Rect(1, 2, 3, 4)),
        flood_events=(FloodEvent(Rect(0, 0, 5, 5), 2, 4),), speckle_looks=None, seed=17,
    )
    assert scene_from_dict(scene_to_dict(spec)) == spec


def test_scene_dict_errors():
    with pytest.raises(InvalidSpec):
        scene_from_dict({"width": 4, "height": 4})
    with pytest.raises(InvalidSpec):
        scene_from_dict({"width": 4, "height": 4, "n_frames": 2, "permanent_regions": [{"type": "blob"}]})
    with pytest.raises(InvalidSpec):
        scene_from_dict({"width": 4, "height": 4, "n_frames": 2, "colour": "red"})
