import hashlib
from pathlib import Path
from typing import List, Optional, Union

import numpy as np
from pydantic import BaseModel, ValidationError

from models.schemas import ClusterJob, ClusterResult, InputRef, RunRecord
from rounding.errors import InvalidInput
from rounding.graph import DataSet
from utils.logger import logger

# ============================================================================
# RUN RECORDS
# ============================================================================
# A RunRecord stores the hashed inputs, the resolved ClusterJob and the
# result of a clustering run. Replaying re-validates the job, checks that the
# inputs still hash the same and compares partitions.

PathLike = Union[str, Path]


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    try:
        with open(path, "rb") as handle:
            for chunk in iter(lambda: handle.read(1 << 16), b""):
                digest.update(chunk)
    except OSError as exc:
        raise InvalidInput(f"cannot hash {path}: {exc}", "cli") from exc
    return digest.hexdigest()


def sha256_dataset(data: DataSet) -> str:
    """Hash of the coordinates and labels of a generated data set"""
    digest = hashlib.sha256(np.ascontiguousarray(data.points).tobytes())
    if data.labels is not None:
        digest.update(np.ascontiguousarray(data.labels).tobytes())
    return digest.hexdigest()


def dump_json(model: BaseModel) -> str:
    return model.model_dump_json(indent=2) + "\n"


def write_json(path: PathLike, model: BaseModel) -> None:
    Path(path).write_text(dump_json(model))
    logger.info(f"wrote {path}")


def build_record(
    inputs: List[InputRef],
    job: ClusterJob,
    result: ClusterResult,
    duration_seconds: float,
) -> RunRecord:
    return RunRecord(
        inputs=inputs,
        parameters=job.model_dump(),
        outputs=result,
        metrics=result.metrics,
        duration_seconds=round(duration_seconds, 6),
    )


def read_record(path: PathLike) -> RunRecord:
    try:
        return RunRecord.model_validate_json(Path(path).read_text())
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}", "cli") from exc
    except ValidationError as exc:
        raise InvalidInput(
            f"{path} is not a run record: {exc.error_count()} error(s)", "cli"
        ) from exc


def job_of(record: RunRecord) -> ClusterJob:
    try:
        return ClusterJob.model_validate(record.parameters)
    except ValidationError as exc:
        raise InvalidInput("run record parameters do not describe a clustering job", "cli") from exc


def verify_inputs(recorded: List[InputRef], current: List[InputRef]) -> None:
    """Raise InvalidInput unless every recorded input hashes the same today"""
    now = {(ref.kind, ref.path): ref.sha256 for ref in current}
    for ref in recorded:
        found: Optional[str] = now.get((ref.kind, ref.path))
        if found != ref.sha256:
            raise InvalidInput(
                f"input {ref.path} changed since the run was recorded "
                f"(sha256 {ref.sha256[:12]} -> {(found or 'missing')[:12]})",
                "cli",
            )


def same_partition(recorded: ClusterResult, replayed: ClusterResult) -> bool:
    return recorded.assignment == replayed.assignment
