import argparse
import csv
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from cli.plots import write_run_plots
from cli.records import (
    build_record,
    dump_json,
    job_of,
    read_record,
    same_partition,
    sha256_dataset,
    sha256_file,
    verify_inputs,
    write_json,
)
from config.settings import settings
from datasets import presets
from datasets.csv_io import (
    read_assignment,
    read_points,
    read_similarity,
    write_matrix,
    write_points,
)
from models.schemas import (
    ClusterJob,
    ClusterParams,
    ClusterResult,
    InputRef,
    MetricReport,
    RunRecord,
    SweepRow,
    TraceRecord,
)
from rounding.baseline import kmeans_rounding
from rounding.binarize import binarize_range
from rounding.errors import InvalidInput, InvalidParameter
from rounding.graph import (
    DataSet,
    SimilarityMatrix,
    gaussian_similarity,
    knn_similarity,
    laplacian_rw,
)
from rounding.ltm import ltm_rounding
from rounding.metrics import report
from rounding.naive import naive_rounding2
from rounding.partition import Partition
from rounding.spectra import EigenSystem, leading_eigenpairs
from utils.logger import logger

# ============================================================================
# SUBCOMMAND HANDLERS
# ============================================================================
# Each cmd_* function receives the parsed argparse namespace, does the work
# and returns a value the tests can inspect. Errors propagate as
# SpecRoundError; cli/app.py turns them into exit codes.

DEFAULT_SIMILARITY = "knn:10"
PRECOMPUTED = "precomputed"
# Settings that change results; stored with each job so replay can restore them
TUNABLES = ("smoothing", "em_tol", "em_max_iter", "max_clusters", "ltm_dof_mode", "kmeans_max_iter")
SUMMARY_FIELDS = ["axis", "value", "runs", "ri_mean", "ri_std", "vi_mean", "vi_std"]


@dataclass(frozen=True)
class Prepared:
    """Loaded input with its similarity graph and eigensystem"""

    data: Optional[DataSet]
    sim: SimilarityMatrix
    inputs: List[InputRef]
    eigs: EigenSystem

    def truth(self, use_labels: Optional[bool]) -> Optional[Partition]:
        if self.data is None or use_labels is False:
            return None
        return self.data.truth()


def parse_similarity_fn(text: str) -> Tuple[str, float]:
    """Split "knn:<k>" or "gaussian:<sigma>" into kind and value

    Raises:
        ValueError: On anything else
    """
    kind, _, value = text.partition(":")
    if kind == "knn" and value.isdigit() and int(value) >= 1:
        return kind, int(value)
    if kind == "gaussian":
        sigma = float(value)
        if np.isfinite(sigma) and sigma > 0:
            return kind, sigma
    raise ValueError(f"expected knn:<k> or gaussian:<sigma>, got {text!r}")


def build_similarity(data: DataSet, similarity_fn: str) -> SimilarityMatrix:
    try:
        kind, value = parse_similarity_fn(similarity_fn)
    except ValueError as exc:
        raise InvalidParameter(str(exc), "graph") from exc
    if kind == "knn":
        return knn_similarity(data, int(value))
    return gaussian_similarity(data, value)


def load_source(
    source_kind: str,
    source: str,
    similarity_fn: str,
    has_labels: Optional[bool] = None,
    data_seed: int = 0,
    size_scale: float = 1.0,
) -> Tuple[Optional[DataSet], SimilarityMatrix, List[InputRef]]:
    """Read or generate the input and build its similarity matrix"""
    if source_kind == "similarity":
        sim = read_similarity(source)
        return None, sim, [InputRef(path=source, kind="similarity", sha256=sha256_file(source))]

    if source_kind == "points":
        data = read_points(source, has_labels=has_labels)
        ref = InputRef(
            path=source,
            kind="points",
            sha256=sha256_file(source),
            has_labels=data.labels is not None,
        )
    elif source_kind == "preset":
        data = presets.load(source, data_seed, size_scale)
        ref = InputRef(path=source, kind="preset", sha256=sha256_dataset(data), has_labels=True)
    else:
        raise InvalidParameter(f"unknown input kind {source_kind!r}", "cli")

    sim = build_similarity(data, similarity_fn)
    logger.info(f"built {similarity_fn} similarity over {data.n} points")
    return data, sim, [ref]


def prepare(job: ClusterJob, eigen_count: Optional[int] = None) -> Prepared:
    """Load the job's input and compute its leading eigenpairs"""
    data, sim, inputs = load_source(
        job.source_kind,
        job.source,
        job.similarity_fn,
        job.has_labels,
        job.data_seed,
        job.size_scale,
    )
    K = job.K if eigen_count is None else eigen_count  # noqa: N806
    started = time.perf_counter()
    eigs = leading_eigenpairs(laplacian_rw(sim), K)
    logger.info(f"computed {K} eigenpairs in {time.perf_counter() - started:.2f}s")
    return Prepared(data=data, sim=sim, inputs=inputs, eigs=eigs)


def apply_tunables(tunables: Dict[str, object]) -> None:
    for name, value in tunables.items():
        if name in TUNABLES:
            setattr(settings, name, value)


def execute(job: ClusterJob, prepared: Prepared) -> Tuple[ClusterResult, Partition]:
    """Run the job's rounding method on prepared eigenpairs"""
    apply_tunables(job.tunables)
    eigs = prepared.eigs if prepared.eigs.K == job.K else prepared.eigs.truncated(job.K)

    q: Optional[int] = None
    trace: List[TraceRecord] = []
    if job.method == "ltm":
        outcome = ltm_rounding(eigs, K=job.K, delta=job.delta, restarts=job.restarts, seed=job.seed)
        partition, q = outcome.partition, outcome.q_selected
        trace = [
            TraceRecord(
                q=record.q,
                k=record.k,
                lcm_bic=record.lcm_bic,
                ltm_bic=record.ltm_bic if np.isfinite(record.ltm_bic) else None,
            )
            for record in outcome.trace
        ]
    elif job.method == "naive":
        naive = naive_rounding2(eigs, K=job.K, delta=job.delta)
        partition, q = naive.partition, naive.q_used
    else:
        if job.k is None:
            raise InvalidParameter("k-means rounding needs the cluster count k", "baseline")
        partition = kmeans_rounding(eigs, job.k, restarts=job.restarts, seed=job.seed)

    truth = prepared.truth(job.has_labels)
    metrics = report(partition, truth) if truth is not None else None
    if metrics is not None:
        logger.info(f"rand index {metrics.rand_index:.4f}, VI {metrics.vi:.4f}")

    result = ClusterResult(
        method=job.method,
        params=ClusterParams(
            similarity=job.similarity_fn,
            K=job.K,
            delta=None if job.method == "kmeans" else job.delta,
            k=job.k,
            seed=job.seed,
            restarts=job.restarts,
        ),
        q=q,
        k=partition.k,
        assignment=partition.assignment.tolist(),
        bic_trace=trace,
        metrics=metrics,
    )
    return result, partition


def _source_of(args: argparse.Namespace) -> Tuple[str, str]:
    for kind in ("points", "similarity", "preset"):
        value = getattr(args, kind, None)
        if value is not None:
            return kind, value
    raise InvalidParameter("no input given", "cli")


def job_from_args(args: argparse.Namespace, source: Optional[Tuple[str, str]] = None) -> ClusterJob:
    """Resolve flags, presets and settings into a complete ClusterJob"""
    source_kind, name = source or _source_of(args)
    similarity_fn = args.similarity_fn
    if similarity_fn is None:
        if source_kind == "similarity":
            similarity_fn = PRECOMPUTED
        elif source_kind == "preset":
            similarity_fn = presets.resolve(name).similarity
        else:
            similarity_fn = DEFAULT_SIMILARITY

    K = args.K  # noqa: N806
    if K is None:
        K = args.k if args.method == "kmeans" and args.k else settings.eigen_count  # noqa: N806

    return ClusterJob(
        source_kind=source_kind,
        source=name,
        data_seed=args.data_seed,
        size_scale=args.size_scale,
        has_labels=args.labels,
        similarity_fn=similarity_fn,
        method=args.method,
        K=K,
        delta=settings.delta if args.delta is None else args.delta,
        k=args.k,
        restarts=settings.restarts if args.restarts is None else args.restarts,
        seed=settings.seed if args.seed is None else args.seed,
        tunables={name: getattr(settings, name) for name in TUNABLES},
    )


def cmd_gen(args: argparse.Namespace) -> DataSet:
    """Generate a preset data set and write it as labelled CSV"""
    preset = presets.resolve(args.preset)
    data = presets.load(args.preset, args.seed, args.size_scale)
    write_points(args.out, data)
    logger.info(f"{preset.name}: {preset.description}; default similarity {preset.similarity}")
    return data


def cmd_eigen(args: argparse.Namespace) -> EigenSystem:
    """Write the K leading eigenvalues and eigenvectors, optionally binarized"""
    source_kind, name = _source_of(args)
    similarity_fn = args.similarity_fn
    if similarity_fn is None:
        if source_kind == "preset":
            similarity_fn = presets.resolve(name).similarity
        else:
            similarity_fn = PRECOMPUTED if source_kind == "similarity" else DEFAULT_SIMILARITY
    _, sim, _ = load_source(
        source_kind, name, similarity_fn, args.labels, args.data_seed, args.size_scale
    )
    K = settings.eigen_count if args.K is None else args.K  # noqa: N806
    eigs = leading_eigenpairs(laplacian_rw(sim), K)

    write_matrix(args.values, eigs.eigenvalues, ["eigenvalue"])
    write_matrix(args.vectors, eigs.eigenvectors, [f"e{j + 1}" for j in range(eigs.K)])
    if args.binary:
        delta = settings.delta if args.delta is None else args.delta
        vectors = binarize_range(eigs, 0, eigs.K, delta)
        write_matrix(
            args.binary,
            np.column_stack([bv.bits for bv in vectors]),
            [bv.name for bv in vectors],
            fmt="%d",
        )
    return eigs


def cmd_cluster(args: argparse.Namespace) -> RunRecord:
    """Cluster one input end to end and write its result and run record"""
    job = job_from_args(args)
    started = time.perf_counter()
    prepared = prepare(job)
    result, partition = execute(job, prepared)
    record = build_record(prepared.inputs, job, result, time.perf_counter() - started)

    if args.out:
        write_json(args.out, result)
    else:
        print(dump_json(result), end="")
    if args.record:
        write_json(args.record, record)
    if args.svg:
        write_run_plots(args.svg, prepared.data, partition, prepared.eigs, args.svg_vectors)
    logger.info(f"{job.method} rounding found {result.k} clusters")
    return record


def _sweep_jobs(args: argparse.Namespace) -> List[Tuple[float, ClusterJob]]:
    jobs: List[Tuple[float, ClusterJob]] = []
    for value in args.grid:
        if args.axis == "noise":
            if value != int(value):
                raise InvalidParameter(f"noise levels are integers, got {value}", "cli")
            base = job_from_args(args, source=("preset", f"noisy:{int(value)}"))
        else:
            base = job_from_args(args)
        if args.axis == "delta":
            base = base.model_copy(update={"delta": value})
        elif args.axis == "K":
            if value != int(value):
                raise InvalidParameter(f"K values are integers, got {value}", "cli")
            base = base.model_copy(update={"K": int(value)})
        for run in range(args.runs):
            jobs.append((value, base.model_copy(update={"seed": base.seed + run})))
    return jobs


def _timed(job: ClusterJob, prepared: Prepared) -> Tuple[ClusterResult, float]:
    started = time.perf_counter()
    result, _ = execute(job, prepared)
    return result, time.perf_counter() - started


def _write_rows(path: str, fields: List[str], rows: List[Dict[str, object]]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({key: "" if value is None else value for key, value in row.items()})
    logger.info(f"wrote {len(rows)} row(s) to {path}")


def cmd_sweep(args: argparse.Namespace) -> List[RunRecord]:
    """Cluster across a grid of delta, K or noise values

    Inputs are loaded and eigensolved once per distinct source, with as many
    eigenpairs as the largest K in the grid. Runs then execute in parallel
    and are reported in grid order.
    """
    jobs = _sweep_jobs(args)

    needed: Dict[Tuple[str, str], ClusterJob] = {}
    for _, job in jobs:
        key = (job.source_kind, job.source)
        if key not in needed or job.K > needed[key].K:
            needed[key] = job
    keys = list(needed)
    loaded = Parallel(n_jobs=settings.threads, prefer="threads")(
        delayed(prepare)(needed[key]) for key in keys
    )
    prepared = dict(zip(keys, loaded))

    outcomes = Parallel(n_jobs=settings.threads, prefer="threads")(
        delayed(_timed)(job, prepared[(job.source_kind, job.source)]) for _, job in jobs
    )

    records: List[RunRecord] = []
    rows: List[SweepRow] = []
    for (value, job), (result, duration) in zip(jobs, outcomes):
        if result.metrics is None:
            raise InvalidInput("a sweep needs true labels to score each run", "cli")
        selected = next((t.ltm_bic for t in result.bic_trace if t.q == result.q), None)
        rows.append(
            SweepRow(
                axis=args.axis,
                value=value,
                seed=job.seed,
                rand_index=result.metrics.rand_index,
                vi=result.metrics.vi,
                q=result.q,
                k=result.k,
                bic=selected,
            )
        )
        inputs = prepared[(job.source_kind, job.source)].inputs
        records.append(build_record(inputs, job, result, duration))

    _write_rows(args.out, list(SweepRow.model_fields), [row.model_dump() for row in rows])
    if args.summary:
        _write_rows(args.summary, SUMMARY_FIELDS, summarize(rows))
    return records


def summarize(rows: List[SweepRow]) -> List[Dict[str, object]]:
    """Mean and standard deviation of RI and VI per axis value, in grid order"""
    summary: List[Dict[str, object]] = []
    for value in dict.fromkeys(row.value for row in rows):
        group = [row for row in rows if row.value == value]
        ri = np.array([row.rand_index for row in group])
        vi = np.array([row.vi for row in group])
        summary.append(
            {
                "axis": group[0].axis,
                "value": value,
                "runs": len(group),
                "ri_mean": float(ri.mean()),
                "ri_std": float(ri.std()),
                "vi_mean": float(vi.mean()),
                "vi_std": float(vi.std()),
            }
        )
    return summary


def cmd_eval(args: argparse.Namespace) -> MetricReport:
    """Compare a predicted assignment with a true one and print the report"""
    pred = Partition.from_labels(read_assignment(args.pred))
    truth = Partition.from_labels(read_assignment(args.truth))
    metrics = report(pred, truth)
    print(dump_json(metrics), end="")
    return metrics


def cmd_replay(args: argparse.Namespace) -> bool:
    """Re-run a recorded job; True iff the partition is reproduced exactly"""
    record = read_record(args.record_file)
    job = job_of(record)
    prepared = prepare(job)
    verify_inputs(record.inputs, prepared.inputs)
    result, _ = execute(job, prepared)
    identical = same_partition(record.outputs, result)
    if identical:
        logger.info(f"replay of {Path(args.record_file).name} reproduced {result.k} clusters")
    else:
        logger.error(f"replay of {Path(args.record_file).name} produced a different partition")
    return identical
