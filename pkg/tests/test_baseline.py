import numpy as np
import pytest

from rounding.baseline import Embedding, kmeans_rounding
from rounding.errors import KOutOfRange
from rounding.graph import SimilarityMatrix, connected_components, knn_similarity, laplacian_rw
from rounding.spectra import leading_eigenpairs


def test_embedding_takes_leading_columns(three_blob_eigs):
    embedding = Embedding.from_eigensystem(three_blob_eigs, 3)
    assert embedding.k == 3
    np.testing.assert_array_equal(embedding.u, three_blob_eigs.eigenvectors[:, :3])


class TestKmeansRounding:
    def test_ideal_case(self, three_blobs, three_blob_eigs):
        assert kmeans_rounding(three_blob_eigs, 3, restarts=10, seed=0) == three_blobs.truth()

    def test_two_blobs_are_the_components(self, two_blobs):
        sim = knn_similarity(two_blobs, 7)
        eigs = leading_eigenpairs(laplacian_rw(sim), 4)
        assert kmeans_rounding(eigs, 2, restarts=10, seed=0) == connected_components(sim)

    def test_k_equal_to_n_gives_singletons(self, rng):
        a = rng.random((6, 6))
        eigs = leading_eigenpairs(laplacian_rw(SimilarityMatrix.from_matrix((a + a.T) / 2)), 6)
        assert kmeans_rounding(eigs, 6, restarts=5, seed=0).k == 6

    @pytest.mark.parametrize("k", [1, 13])
    def test_k_out_of_range(self, three_blob_eigs, k):
        with pytest.raises(KOutOfRange):
            kmeans_rounding(three_blob_eigs, k)

    def test_same_seed_same_partition(self, three_blob_eigs):
        first = kmeans_rounding(three_blob_eigs, 5, restarts=3, seed=4)
        second = kmeans_rounding(three_blob_eigs, 5, restarts=3, seed=4)
        np.testing.assert_array_equal(first.assignment, second.assignment)
