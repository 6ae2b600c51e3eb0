import csv
import json

import pytest

from cli.app import main
from cli.records import dump_json
from datasets.csv_io import read_points, write_matrix, write_points
from models.schemas import ClusterParams, ClusterResult, MetricReport, RunRecord, TraceRecord
from rounding.graph import DataSet, knn_similarity

BLOB_FLAGS = ["--similarity-fn", "knn:7", "--K", "12"]


@pytest.fixture
def points_csv(tmp_path, three_blobs):
    path = tmp_path / "blobs.csv"
    write_points(path, three_blobs)
    return path


def cluster(points, *flags):
    return main(["cluster", "--points", str(points), *BLOB_FLAGS, *flags])


def rows_of(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


class TestGen:
    def test_writes_labelled_points(self, tmp_path):
        out = tmp_path / "a.csv"
        assert main(["gen", "--preset", "ideal-a", "--out", str(out), "--size-scale", "0.1"]) == 0
        data = read_points(out)
        assert data.n == 30
        assert data.truth().k == 3

    def test_unknown_preset_is_a_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["gen", "--preset", "nope", "--out", str(tmp_path / "x.csv")])
        assert excinfo.value.code == 2


class TestCluster:
    def test_naive_result_on_stdout(self, points_csv, capsys):
        assert cluster(points_csv, "--method", "naive") == 0
        result = ClusterResult.model_validate_json(capsys.readouterr().out)
        assert result.method == "naive"
        assert result.k == 3
        assert result.metrics.rand_index == 1.0
        assert result.metrics.vi == 0.0

    def test_ltm_writes_result_and_record(self, points_csv, tmp_path):
        out, record = tmp_path / "result.json", tmp_path / "record.json"
        assert cluster(points_csv, "--out", str(out), "--record", str(record), "--seed", "3") == 0
        result = ClusterResult.model_validate_json(out.read_text())
        assert result.k == 3
        assert result.q is not None
        assert [t.q for t in result.bic_trace] == [2, 3, 4, 5, 6]
        run = RunRecord.model_validate_json(record.read_text())
        assert run.outputs == result
        assert run.inputs[0].kind == "points"
        assert len(run.inputs[0].sha256) == 64
        assert run.parameters["seed"] == 3

    def test_kmeans_defaults_K_to_k(self, points_csv, tmp_path):
        out = tmp_path / "km.json"
        assert cluster_kmeans(points_csv, out) == 0
        result = ClusterResult.model_validate_json(out.read_text())
        assert result.params.K == 3
        assert result.q is None
        written = json.loads(out.read_text())
        assert written["q"] is None
        assert written["params"]["delta"] is None

    def test_same_flags_same_bytes(self, points_csv, tmp_path):
        first, second = tmp_path / "1.json", tmp_path / "2.json"
        assert cluster(points_csv, "--out", str(first)) == 0
        assert cluster(points_csv, "--out", str(second)) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_bad_delta_fails(self, points_csv):
        assert cluster(points_csv, "--delta", "1.5") == 1

    def test_plots(self, points_csv, tmp_path):
        directory = tmp_path / "svg"
        flags = ["--method", "naive", "--svg", str(directory), "--svg-vectors", "2"]
        assert cluster(points_csv, *flags) == 0
        names = sorted(p.name for p in directory.iterdir())
        assert names == ["clusters.svg", "eigenvector_1.svg", "eigenvector_2.svg"]


def cluster_kmeans(points, out):
    return main(
        ["cluster", "--points", str(points), "--similarity-fn", "knn:7", "--method", "kmeans",
         "--k", "3", "--out", str(out)]
    )


class TestUsageErrors:
    @pytest.mark.parametrize(
        "argv",
        [
            ["cluster"],
            ["cluster", "--preset", "ideal-a", "--method", "kmeans"],
            ["cluster", "--similarity", "s.csv", "--similarity-fn", "knn:3"],
            ["cluster", "--preset", "ideal-a", "--similarity-fn", "cosine"],
            ["sweep", "--axis", "delta", "--grid", "0.1", "--out", "x.csv"],
            ["sweep", "--axis", "noise", "--preset", "ideal-a", "--grid", "1", "--out", "x.csv"],
            ["--threads", "0", "eval", "--pred", "a", "--truth", "b"],
        ],
        ids=[
            "no-input",
            "kmeans-without-k",
            "fn-with-matrix",
            "unknown-fn",
            "sweep-without-input",
            "noise-with-input",
            "zero-threads",
        ],
    )
    def test_exit_code_two(self, argv):
        with pytest.raises(SystemExit) as excinfo:
            main(argv)
        assert excinfo.value.code == 2


class TestPrecomputedSimilarity:
    def test_kmeans_without_coordinates(self, tmp_path, three_blobs, capsys):
        matrix = tmp_path / "sim.csv"
        s = knn_similarity(three_blobs, 7).s
        write_matrix(matrix, s, [f"p{i}" for i in range(three_blobs.n)], fmt="%d")
        directory = tmp_path / "svg"
        code = main(
            ["cluster", "--similarity", str(matrix), "--method", "kmeans", "--k", "3",
             "--svg", str(directory), "--svg-vectors", "3"]
        )
        assert code == 0
        captured = capsys.readouterr()
        result = ClusterResult.model_validate_json(captured.out)
        assert result.k == 3
        assert result.metrics is None
        assert result.params.similarity == "precomputed"
        assert "no point coordinates" in captured.err
        assert sorted(p.name for p in directory.iterdir()) == [
            "eigenvector_1.svg",
            "eigenvector_2.svg",
            "eigenvector_3.svg",
        ]


class TestEval:
    def test_prediction_against_labels(self, points_csv, tmp_path, capsys):
        pred = tmp_path / "pred.json"
        assert cluster(points_csv, "--method", "naive", "--out", str(pred)) == 0
        capsys.readouterr()
        assert main(["eval", "--pred", str(pred), "--truth", str(points_csv)]) == 0
        metrics = MetricReport.model_validate_json(capsys.readouterr().out)
        assert metrics.rand_index == 1.0
        assert metrics.k_found == metrics.k_true == 3

    def test_length_mismatch_fails(self, tmp_path):
        pred = tmp_path / "pred.json"
        pred.write_text("[0, 1, 1]")
        truth = tmp_path / "truth.json"
        truth.write_text("[0, 1]")
        assert main(["eval", "--pred", str(pred), "--truth", str(truth)]) == 1


class TestReplay:
    def test_reproduces_and_detects_changed_input(self, points_csv, tmp_path, three_blobs):
        record = tmp_path / "record.json"
        assert cluster(points_csv, "--record", str(record), "--out", str(tmp_path / "r.json")) == 0
        assert main(["replay", str(record)]) == 0

        moved = DataSet(points=three_blobs.points + 0.001, labels=three_blobs.labels)
        write_points(points_csv, moved)
        assert main(["replay", str(record)]) == 1

    def test_not_a_record(self, tmp_path):
        bogus = tmp_path / "bogus.json"
        bogus.write_text(json.dumps({"k": 1}))
        assert main(["replay", str(bogus)]) == 1


class TestSweep:
    def test_delta_axis_with_summary(self, points_csv, tmp_path):
        out, summary = tmp_path / "sweep.csv", tmp_path / "summary.csv"
        argv = [
            "sweep", "--points", str(points_csv), *BLOB_FLAGS, "--method", "naive",
            "--axis", "delta", "--grid", "0.1,0.2", "--runs", "2",
            "--out", str(out), "--summary", str(summary),
        ]
        assert main(argv) == 0
        rows = rows_of(out)
        assert [(r["value"], r["seed"]) for r in rows] == [
            ("0.1", "0"), ("0.1", "1"), ("0.2", "0"), ("0.2", "1"),
        ]
        assert all(float(r["rand_index"]) == 1.0 for r in rows)
        groups = rows_of(summary)
        assert [g["runs"] for g in groups] == ["2", "2"]
        assert float(groups[0]["ri_std"]) == 0.0

    def test_empty_grid_writes_header_only(self, points_csv, tmp_path):
        out = tmp_path / "sweep.csv"
        argv = [
            "sweep", "--points", str(points_csv), "--axis", "K", "--grid", "", "--out", str(out),
        ]
        assert main(argv) == 0
        assert out.read_text().splitlines() == [
            "axis,value,seed,rand_index,vi,q,k,bic",
        ]

    def test_noise_axis(self, tmp_path):
        out = tmp_path / "noise.csv"
        argv = [
            "sweep", "--axis", "noise", "--grid", "1,2", "--method", "naive",
            "--size-scale", "0.3", "--K", "20", "--out", str(out),
        ]
        assert main(argv) == 0
        rows = rows_of(out)
        assert [r["value"] for r in rows] == ["1.0", "2.0"]
        assert all(0.0 <= float(r["rand_index"]) <= 1.0 for r in rows)

    def test_needs_labels(self, points_csv, tmp_path):
        argv = [
            "sweep", "--points", str(points_csv), "--no-labels", *BLOB_FLAGS,
            "--method", "naive", "--axis", "delta", "--grid", "0.1",
            "--out", str(tmp_path / "s.csv"),
        ]
        assert main(argv) == 1


class TestJsonOutput:
    def test_unscored_q_is_written_as_null(self):
        result = ClusterResult(
            method="ltm",
            params=ClusterParams(similarity="knn:7", K=3, delta=0.1, seed=0, restarts=5),
            q=2,
            k=2,
            assignment=[0, 0, 1],
            bic_trace=[
                TraceRecord(q=1, k=1, lcm_bic=-4.5),
                TraceRecord(q=2, k=2, lcm_bic=-3.0, ltm_bic=-3.5),
            ],
        )
        written = json.loads(dump_json(result))
        assert written["bic_trace"][0]["ltm_bic"] is None
        assert written["bic_trace"][1]["ltm_bic"] == -3.5
        assert written["metrics"] is None
        assert written["params"]["k"] is None
