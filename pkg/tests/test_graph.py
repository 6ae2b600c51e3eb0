import numpy as np
import pytest

from datasets.generator import generate
from datasets.presets import IDEAL_B
from rounding.errors import InvalidInput, IsolatedVertex, KTooLarge, NonFiniteInput
from rounding.graph import (
    DataSet,
    SimilarityMatrix,
    connected_components,
    gaussian_similarity,
    knn_similarity,
    laplacian_rw,
)


def line(*xs):
    return DataSet(points=np.array(xs, dtype=float)[:, None])


class TestDataSet:
    def test_one_dimensional_points_become_a_column(self):
        assert line(0, 1, 2).d == 1

    def test_needs_two_points(self):
        with pytest.raises(InvalidInput):
            DataSet(points=np.zeros((1, 2)))

    def test_rejects_non_finite(self):
        with pytest.raises(NonFiniteInput):
            DataSet(points=np.array([[0.0, np.nan], [1.0, 1.0]]))

    def test_labels_must_be_contiguous(self):
        with pytest.raises(InvalidInput):
            DataSet(points=np.zeros((3, 2)), labels=np.array([0, 2, 2]))

    def test_truth_partition(self):
        data = DataSet(points=np.zeros((3, 1)), labels=np.array([1, 0, 1]))
        assert data.truth().assignment.tolist() == [0, 1, 0]


class TestKnnSimilarity:
    def test_two_points(self):
        sim = knn_similarity(line(0, 1), 1)
        assert sim.s.tolist() == [[0, 1], [1, 0]]

    def test_points_on_a_line(self):
        sim = knn_similarity(line(0, 1, 2, 10), 1)
        expected = np.zeros((4, 4))
        for i, j in [(0, 1), (1, 2), (2, 3)]:
            expected[i, j] = expected[j, i] = 1
        np.testing.assert_array_equal(sim.s, expected)

    def test_ties_go_to_lower_index(self):
        # point 1 is equidistant from 0 and 2
        sim = knn_similarity(line(0, 1, 2), 1)
        assert sim.s[1, 0] == 1
        assert sim.s[0, 1] == 1
        # 2 picks 1; 1 picked 0, so 1-2 exists only through OR
        assert sim.s[1, 2] == 1

    def test_k_too_large(self):
        with pytest.raises(KTooLarge):
            knn_similarity(line(0, 1, 2), 3)

    def test_binary_symmetric_zero_diagonal(self, three_blobs):
        s = knn_similarity(three_blobs, 7).s
        assert set(np.unique(s)) <= {0.0, 1.0}
        np.testing.assert_array_equal(s, s.T)
        assert not np.diag(s).any()

    def test_permutation_equivariance(self, three_blobs, rng):
        perm = rng.permutation(three_blobs.n)
        permuted = DataSet(points=three_blobs.points[perm])
        s = knn_similarity(three_blobs, 4).s
        np.testing.assert_array_equal(knn_similarity(permuted, 4).s, s[np.ix_(perm, perm)])

    def test_degrees_are_row_sums(self, three_blobs):
        sim = knn_similarity(three_blobs, 7)
        np.testing.assert_array_equal(sim.degrees, sim.s.sum(axis=1))


class TestGaussianSimilarity:
    def test_identical_points(self):
        s = gaussian_similarity(line(3, 3), 0.5).s
        np.testing.assert_array_equal(s, np.ones((2, 2)))

    def test_distance_sigma(self):
        s = gaussian_similarity(line(0, 0.2), 0.2).s
        assert s[0, 1] == pytest.approx(np.exp(-1.0), rel=1e-12)

    def test_dense_symmetric_unit_diagonal(self, three_blobs):
        s = gaussian_similarity(three_blobs, 0.2).s
        np.testing.assert_array_equal(s, s.T)
        np.testing.assert_array_equal(np.diag(s), 1.0)
        assert (s <= 1).all() and (s >= 0).all()

    @pytest.mark.parametrize("sigma", [0.0, -1.0, np.inf, np.nan])
    def test_bad_sigma(self, sigma):
        with pytest.raises(NonFiniteInput):
            gaussian_similarity(line(0, 1), sigma)


class TestSimilarityMatrix:
    def test_rejects_asymmetric(self):
        with pytest.raises(InvalidInput):
            SimilarityMatrix.from_matrix(np.array([[0, 1], [0.5, 0]]))

    def test_rejects_negative(self):
        with pytest.raises(InvalidInput):
            SimilarityMatrix.from_matrix(np.array([[0, -1], [-1, 0]]))


class TestLaplacian:
    def test_two_nodes(self):
        lap = laplacian_rw(SimilarityMatrix.from_matrix(np.array([[0.0, 1.0], [1.0, 0.0]])))
        np.testing.assert_array_equal(lap.l, [[1, -1], [-1, 1]])

    def test_block_diagonal(self):
        s = np.zeros((4, 4))
        s[0, 1] = s[1, 0] = 1
        s[2, 3] = s[3, 2] = 2
        lap = laplacian_rw(SimilarityMatrix.from_matrix(s))
        assert not lap.l[:2, 2:].any() and not lap.l[2:, :2].any()

    def test_row_sums_zero_on_random_graph(self, rng):
        a = rng.random((5, 5))
        s = (a + a.T) / 2
        lap = laplacian_rw(SimilarityMatrix.from_matrix(s))
        assert np.abs(lap.l.sum(axis=1)).max() < 1e-10
        assert np.abs(lap.l @ np.ones(5)).max() < 1e-10
        off = lap.l[~np.eye(5, dtype=bool)]
        assert (off <= 0).all()
        assert ((np.diag(lap.l) >= 0) & (np.diag(lap.l) <= 1)).all()

    def test_isolated_vertex_reports_index(self):
        s = np.zeros((3, 3))
        s[0, 2] = s[2, 0] = 1
        with pytest.raises(IsolatedVertex) as excinfo:
            laplacian_rw(SimilarityMatrix.from_matrix(s))
        assert excinfo.value.index == 1
        assert str(excinfo.value).startswith("graph:")


class TestConnectedComponents:
    def test_complete_graph(self):
        sim = SimilarityMatrix.from_matrix(np.ones((4, 4)) - np.eye(4))
        assert connected_components(sim).k == 1

    def test_zero_matrix(self):
        assert connected_components(SimilarityMatrix.from_matrix(np.zeros((4, 4)))).k == 4

    def test_separated_blobs_are_components(self, three_blobs):
        parts = connected_components(knn_similarity(three_blobs, 7))
        assert parts == three_blobs.truth()

    def test_five_shape_layout_is_ideal_under_10nn(self):
        shapes = [spec.model_copy(update={"noise_sd": 0.01}) for spec in IDEAL_B.shapes]
        data = generate(shapes, seed=0)
        parts = connected_components(knn_similarity(data, 10))
        assert parts.k == 5
        assert parts == data.truth()
