import csv
import json
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from models.schemas import ClusterResult, RunRecord
from rounding.errors import InvalidInput
from rounding.graph import DataSet, SimilarityMatrix
from utils.logger import logger

# ============================================================================
# CSV INPUT / OUTPUT
# ============================================================================
# Point clouds are one row per point, coordinates first and an optional
# integer label last. A first row that does not parse as numbers is a
# header; a header whose last column is "label" marks the label column.
# Writers always emit a header and full-precision floats.

PathLike = Union[str, Path]
FLOAT_FMT = "%.17g"
LABEL_COLUMN = "label"


def _read_rows(path: PathLike) -> Tuple[Optional[List[str]], np.ndarray]:
    try:
        with open(path, newline="") as handle:
            rows = [row for row in csv.reader(handle) if row and any(c.strip() for c in row)]
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}", "datagen") from exc
    if not rows:
        raise InvalidInput(f"{path} is empty", "datagen")

    header: Optional[List[str]] = None
    try:
        [float(cell) for cell in rows[0]]
    except ValueError:
        header = [cell.strip() for cell in rows[0]]
        rows = rows[1:]

    width = len(rows[0]) if rows else len(header or [])
    if any(len(row) != width for row in rows):
        raise InvalidInput(f"{path}: rows have differing column counts", "datagen")
    try:
        values = np.array([[float(cell) for cell in row] for row in rows], dtype=np.float64)
    except ValueError as exc:
        raise InvalidInput(f"{path}: non-numeric cell ({exc})", "datagen") from exc
    return header, values.reshape(len(rows), width)


def read_points(path: PathLike, has_labels: Optional[bool] = None) -> DataSet:
    """Load a point cloud

    Args:
        path: CSV file
        has_labels: Whether the last column holds true labels; detected from
            the header when omitted (no header means no labels)

    Returns:
        DataSet, with labels when the file carries them
    """
    header, values = _read_rows(path)
    if has_labels is None:
        has_labels = bool(header) and header[-1].lower() == LABEL_COLUMN
    if has_labels:
        if values.shape[1] < 2:
            raise InvalidInput(f"{path}: a labelled file needs a coordinate column", "datagen")
        data = DataSet(points=values[:, :-1], labels=values[:, -1])
    else:
        data = DataSet(points=values)
    logger.info(f"read {data.n} points in {data.d}D from {path} (labels: {has_labels})")
    return data


def write_points(path: PathLike, data: DataSet) -> None:
    header = [f"x{i}" for i in range(data.d)]
    columns = [data.points]
    fmt = [FLOAT_FMT] * data.d
    if data.labels is not None:
        header.append(LABEL_COLUMN)
        columns.append(data.labels[:, None].astype(np.float64))
        fmt.append("%d")
    np.savetxt(
        path, np.hstack(columns), delimiter=",", fmt=fmt, header=",".join(header), comments=""
    )
    logger.info(f"wrote {data.n} points to {path}")


def read_similarity(path: PathLike) -> SimilarityMatrix:
    """Load an n x n similarity matrix (header row optional)"""
    _, values = _read_rows(path)
    sim = SimilarityMatrix.from_matrix(values)
    logger.info(f"read {sim.n} x {sim.n} similarity matrix from {path}")
    return sim


def write_matrix(
    path: PathLike, matrix: np.ndarray, header: Sequence[str], fmt: str = FLOAT_FMT
) -> None:
    """Write a 1D or 2D array under a header row"""
    matrix = np.asarray(matrix)
    if matrix.ndim == 1:
        matrix = matrix[:, None]
    np.savetxt(path, matrix, delimiter=",", fmt=fmt, header=",".join(header), comments="")
    logger.info(f"wrote {matrix.shape[0]} x {matrix.shape[1]} table to {path}")


def read_assignment(path: PathLike) -> np.ndarray:
    """Integer cluster ids from a result JSON, a run record or a CSV

    JSON files may hold a ClusterResult, a RunRecord or a bare list. CSV files
    contribute their "label" column, or their only column.
    """
    if str(path).lower().endswith(".json"):
        try:
            payload = json.loads(Path(path).read_text())
        except (OSError, ValueError) as exc:
            raise InvalidInput(f"cannot read {path}: {exc}", "metrics") from exc
        try:
            if isinstance(payload, list):
                labels = payload
            elif "outputs" in payload:
                labels = RunRecord.model_validate(payload).outputs.assignment
            else:
                labels = ClusterResult.model_validate(payload).assignment
        except (ValidationError, TypeError) as exc:
            raise InvalidInput(f"{path} holds no cluster assignment", "metrics") from exc
        values = np.asarray(labels, dtype=np.float64)
    else:
        header, table = _read_rows(path)
        if header and LABEL_COLUMN in [h.lower() for h in header]:
            values = table[:, [h.lower() for h in header].index(LABEL_COLUMN)]
        elif table.shape[1] == 1:
            values = table[:, 0]
        else:
            raise InvalidInput(
                f"{path}: expected a '{LABEL_COLUMN}' column or a single column", "metrics"
            )
    if values.ndim != 1 or not np.all(values == np.round(values)):
        raise InvalidInput(f"{path}: cluster ids must be integers", "metrics")
    return values.astype(np.int64)
