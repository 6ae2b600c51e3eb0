import json

import numpy as np
import pytest

from datasets.csv_io import (
    read_assignment,
    read_points,
    read_similarity,
    write_matrix,
    write_points,
)
from models.schemas import ClusterParams, ClusterResult
from rounding.errors import InvalidInput, NonFiniteInput
from rounding.graph import DataSet


def write_text(path, text):
    path.write_text(text)
    return path


class TestPoints:
    def test_written_file_reads_back(self, tmp_path, three_blobs):
        path = tmp_path / "points.csv"
        write_points(path, three_blobs)
        data = read_points(path)
        np.testing.assert_array_equal(data.points, three_blobs.points)
        np.testing.assert_array_equal(data.labels, three_blobs.labels)
        assert path.read_text().splitlines()[0] == "x0,x1,label"

    def test_header_without_label(self, tmp_path):
        data = read_points(write_text(tmp_path / "p.csv", "x,y\n0,1\n2,3\n"))
        assert data.d == 2 and data.labels is None

    def test_no_header_means_no_labels(self, tmp_path):
        data = read_points(write_text(tmp_path / "p.csv", "0,1,0\n2,3,1\n"))
        assert data.d == 3 and data.labels is None

    def test_forced_label_column(self, tmp_path):
        data = read_points(write_text(tmp_path / "p.csv", "0,1,0\n2,3,1\n"), has_labels=True)
        assert data.d == 2
        assert data.labels.tolist() == [0, 1]

    def test_unlabelled_file_has_no_label_column(self, tmp_path):
        path = tmp_path / "p.csv"
        write_points(path, DataSet(points=np.array([[0.5, 1.0], [2.0, 3.25]])))
        assert path.read_text().splitlines()[0] == "x0,x1"

    @pytest.mark.parametrize(
        "text",
        ["", "x,y\n0,1\n2\n", "0,1\n2,abc\n"],
        ids=["empty", "ragged", "non-numeric"],
    )
    def test_malformed(self, tmp_path, text):
        with pytest.raises(InvalidInput):
            read_points(write_text(tmp_path / "p.csv", text))

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_points(tmp_path / "absent.csv")

    def test_non_finite_coordinates(self, tmp_path):
        with pytest.raises(NonFiniteInput):
            read_points(write_text(tmp_path / "p.csv", "0,1\nnan,3\n"))


class TestSimilarity:
    def test_matrix_round_trip(self, tmp_path):
        s = np.array([[0.0, 0.25, 1.0], [0.25, 0.0, 0.5], [1.0, 0.5, 0.0]])
        path = tmp_path / "sim.csv"
        write_matrix(path, s, ["a", "b", "c"])
        np.testing.assert_array_equal(read_similarity(path).s, s)

    def test_asymmetric(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_similarity(write_text(tmp_path / "s.csv", "0,1\n0.5,0\n"))


class TestAssignment:
    def test_json_list(self, tmp_path):
        path = write_text(tmp_path / "a.json", "[0, 1, 1]")
        assert read_assignment(path).tolist() == [0, 1, 1]

    def test_cluster_result(self, tmp_path):
        result = ClusterResult(
            method="naive",
            params=ClusterParams(similarity="knn:3", K=6, delta=0.1, seed=0, restarts=1),
            q=2,
            k=2,
            assignment=[1, 0, 0],
        )
        path = write_text(tmp_path / "r.json", result.model_dump_json())
        assert read_assignment(path).tolist() == [1, 0, 0]

    def test_json_without_assignment(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_assignment(write_text(tmp_path / "x.json", json.dumps({"k": 2})))

    def test_csv_label_column(self, tmp_path):
        path = write_text(tmp_path / "a.csv", "x0,label\n0.5,2\n0.7,0\n")
        assert read_assignment(path).tolist() == [2, 0]

    def test_csv_single_column(self, tmp_path):
        path = tmp_path / "a.csv"
        write_matrix(path, np.array([0, 0, 1]), ["cluster"], fmt="%d")
        assert read_assignment(path).tolist() == [0, 0, 1]

    def test_csv_ambiguous_columns(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_assignment(write_text(tmp_path / "a.csv", "a,b\n0,1\n"))

    def test_non_integer_ids(self, tmp_path):
        with pytest.raises(InvalidInput):
            read_assignment(write_text(tmp_path / "a.json", "[0, 1.5]"))
