import numpy as np
import pytest

from datasets import presets
from datasets.generator import generate, noise_ladder
from models.schemas import ShapeSpec
from rounding.errors import InvalidInput, InvalidParameter
from rounding.graph import connected_components, knn_similarity, laplacian_rw
from rounding.ltm import ltm_rounding
from rounding.naive import naive_rounding2
from rounding.spectra import is_piecewise_constant, leading_eigenpairs


def blobs(counts):
    return [
        ShapeSpec(kind="gaussian_blob", center=(10.0 * i, 0.0), scale=0.1, count=c)
        for i, c in enumerate(counts)
    ]


def mean_nn_distance(data):
    diff = data.points[:, None, :] - data.points[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    np.fill_diagonal(dist, np.inf)
    return float(dist.min(axis=1).mean())


def preset_similarity(preset, data):
    _, k = preset.similarity.split(":")
    return knn_similarity(data, int(k))


class TestGenerate:
    def test_same_seed_same_points(self):
        specs = blobs([10, 12])
        first, second = generate(specs, seed=4), generate(specs, seed=4)
        np.testing.assert_array_equal(first.points, second.points)
        assert not np.array_equal(first.points, generate(specs, seed=5).points)

    def test_labels_follow_shape_order(self):
        data = generate(blobs([3, 4, 5]), seed=0)
        assert data.labels.tolist() == [0] * 3 + [1] * 4 + [2] * 5
        assert data.truth().k == 3

    def test_degenerate_blob(self):
        spec = ShapeSpec(kind="gaussian_blob", center=(1.5, -2.0), scale=0.0, count=4)
        np.testing.assert_array_equal(generate([spec], seed=0).points, [[1.5, -2.0]] * 4)

    def test_ring_radius(self):
        spec = ShapeSpec(kind="ring", center=(1.0, 1.0), scale=2.0, count=50)
        points = generate([spec], seed=1).points
        np.testing.assert_allclose(np.hypot(points[:, 0] - 1, points[:, 1] - 1), 2.0)

    def test_crescent_stays_on_its_arc(self):
        spec = ShapeSpec(kind="crescent", scale=1.0, arc_start=0.0, arc_span=np.pi / 2, count=40)
        points = generate([spec], seed=2).points
        angles = np.arctan2(points[:, 1], points[:, 0])
        assert angles.min() >= 0.0 and angles.max() <= np.pi / 2

    def test_needs_two_points(self):
        with pytest.raises(InvalidInput):
            generate([ShapeSpec(kind="gaussian_blob", count=1)], seed=0)


class TestNoiseLadder:
    def test_level_zero_is_generate(self):
        specs = [s.model_copy(update={"noise_sd": 0.1}) for s in blobs([6, 6])]
        (only,) = noise_ladder(specs, [0], seed=3)
        np.testing.assert_array_equal(only.points, generate(specs, seed=3).points)

    @pytest.mark.parametrize("levels", [[0, 2, 1], [-1, 0]])
    def test_bad_levels(self, levels):
        with pytest.raises(InvalidParameter):
            noise_ladder(blobs([5]), levels, seed=0)

    def test_spread_grows_with_level(self):
        # full preset size; with fewer points the two lowest levels can tie or swap
        data = presets.ladder(seed=0)
        assert len(data) == len(presets.NOISE_LEVELS)
        spread = [mean_nn_distance(d) for d in data]
        assert all(b >= a - 1e-9 for a, b in zip(spread, spread[1:]))
        for d in data[1:]:
            np.testing.assert_array_equal(d.labels, data[0].labels)


class TestPresets:
    def test_resolve_named(self):
        assert presets.resolve("ideal-a") is presets.IDEAL_A

    def test_noisy_entries(self):
        first, last = presets.resolve("noisy:1"), presets.resolve("noisy:8")
        assert first.similarity == presets.NOISY_SIMILARITY
        assert first.shapes[0].noise_sd == pytest.approx(0.02)
        assert last.shapes[0].noise_sd == pytest.approx(0.02 * 7)

    @pytest.mark.parametrize("name", ["ideal-z", "noisy:0", "noisy:9", "noisy:x"])
    def test_unknown(self, name):
        with pytest.raises(InvalidParameter):
            presets.resolve(name)

    def test_names(self):
        names = presets.preset_names()
        assert names[:3] == ["ideal-a", "ideal-b", "ideal-c"]
        assert len(names) == 3 + len(presets.NOISE_LEVELS)

    def test_scaled_keeps_a_minimum(self):
        shapes = presets.IDEAL_A.scaled(0.001)
        assert [s.count for s in shapes] == [3, 3, 3]
        with pytest.raises(InvalidParameter):
            presets.IDEAL_A.scaled(0.0)

    @pytest.mark.parametrize("preset", list(presets.PRESETS.values()), ids=lambda p: p.name)
    def test_ideal_under_its_similarity(self, preset):
        data = generate(preset.shapes, seed=0)
        parts = connected_components(preset_similarity(preset, data))
        assert parts == data.truth()

    def test_ideal_eigen_structure(self):
        preset = presets.IDEAL_A
        data = generate(preset.shapes, seed=0)
        eigs = leading_eigenpairs(laplacian_rw(preset_similarity(preset, data)), 6)
        zeros = np.flatnonzero(eigs.eigenvalues < 1e-8)
        assert zeros.size == len(preset.shapes)
        for j in zeros:
            assert is_piecewise_constant(eigs.vector(j), data.truth(), 1e-5)


@pytest.mark.slow
@pytest.mark.parametrize("preset", list(presets.PRESETS.values()), ids=lambda p: p.name)
def test_roundings_recover_ideal_presets(preset):
    data = generate(preset.shapes, seed=0)
    eigs = leading_eigenpairs(laplacian_rw(preset_similarity(preset, data)), 40)
    truth = data.truth()
    assert naive_rounding2(eigs, K=40, delta=0.1).partition == truth
    assert ltm_rounding(eigs, K=40, delta=0.1, restarts=5, seed=0).partition == truth
