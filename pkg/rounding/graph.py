from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _scipy_components
from scipy.spatial.distance import cdist

from rounding.errors import InvalidInput, IsolatedVertex, KTooLarge, NonFiniteInput
from rounding.partition import Partition
from utils.logger import logger

# ============================================================================
# SIMILARITY GRAPH
# ============================================================================
# Builds similarity matrices from point clouds and derives the degree vector
# and the random-walk Laplacian L_rw = I - D^-1 S.


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class DataSet:
    """n points in d dimensions with optional true cluster labels"""

    points: np.ndarray
    labels: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] < 2 or points.shape[1] < 1:
            raise InvalidInput("a data set needs at least 2 points and 1 dimension", "graph")
        if not np.all(np.isfinite(points)):
            raise NonFiniteInput("point coordinates must be finite", "graph")
        object.__setattr__(self, "points", _frozen(points))

        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (points.shape[0],):
                raise InvalidInput("labels must have one entry per point", "graph")
            if not np.all(labels == np.round(labels)):
                raise InvalidInput("labels must be integers", "graph")
            labels = labels.astype(np.int64)
            present = np.unique(labels)
            if present[0] != 0 or present[-1] != present.size - 1:
                raise InvalidInput("label ids must form the range 0..k_t-1", "graph")
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    def truth(self) -> Optional[Partition]:
        """True partition from the labels, canonically relabelled"""
        return None if self.labels is None else Partition.from_labels(self.labels)


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric nonnegative similarity matrix with its row sums"""

    s: np.ndarray
    degrees: np.ndarray

    @classmethod
    def from_matrix(cls, s: np.ndarray) -> "SimilarityMatrix":
        s = np.asarray(s, dtype=np.float64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise InvalidInput("a similarity matrix must be square", "graph")
        if not np.all(np.isfinite(s)):
            raise NonFiniteInput("similarities must be finite", "graph")
        if np.any(s < 0):
            raise InvalidInput("similarities must be nonnegative", "graph")
        if not np.array_equal(s, s.T):
            raise InvalidInput("a similarity matrix must be symmetric", "graph")
        return cls(s=_frozen(s), degrees=_frozen(s.sum(axis=1)))

    @property
    def n(self) -> int:
        return int(self.s.shape[0])


@dataclass(frozen=True)
class Laplacian:
    """Random-walk normalized Laplacian together with its source graph"""

    l: np.ndarray  # noqa: E741
    source: SimilarityMatrix

    @property
    def n(self) -> int:
        return int(self.l.shape[0])


def knn_similarity(data: DataSet, k: int) -> SimilarityMatrix:
    """Binary k-nearest-neighbour similarity, symmetrised with OR

    s_ij = 1 iff x_i is among the k nearest neighbours of x_j or vice versa.
    A point is never its own neighbour and distance ties go to the lower
    index.

    Args:
        data: Point cloud
        k: Number of neighbours per point, 1 <= k < n

    Returns:
        Binary similarity matrix with zero diagonal

    Raises:
        KTooLarge: If k >= n
    """
    n = data.n
    if k < 1:
        raise KTooLarge(f"k must be at least 1, got {k}", "graph")
    if k >= n:
        raise KTooLarge(f"k={k} neighbours requested for only {n} points", "graph")

    distances = cdist(data.points, data.points)
    np.fill_diagonal(distances, np.inf)
    # stable sort keeps lower indices first among equal distances
    neighbours = np.argsort(distances, axis=1, kind="stable")[:, :k]

    directed = np.zeros((n, n), dtype=np.float64)
    directed[np.repeat(np.arange(n), k), neighbours.reshape(-1)] = 1.0
    s = np.maximum(directed, directed.T)
    logger.debug(f"knn similarity: n={n}, k={k}, edges={int(s.sum()) // 2}")
    return SimilarityMatrix.from_matrix(s)


def gaussian_similarity(data: DataSet, sigma: float) -> SimilarityMatrix:
    """Dense Gaussian similarity exp(-||x_i - x_j||^2 / sigma^2)

    The diagonal keeps the formula's value at distance zero, which is 1.

    Args:
        data: Point cloud
        sigma: Neighbourhood width, sigma > 0

    Returns:
        Dense similarity matrix with entries in (0, 1]
    """
    if not np.isfinite(sigma) or sigma <= 0:
        raise NonFiniteInput(f"sigma must be a positive finite number, got {sigma}", "graph")
    if not np.all(np.isfinite(data.points)):
        raise NonFiniteInput("point coordinates must be finite", "graph")

    squared = cdist(data.points, data.points, metric="sqeuclidean")
    s = np.exp(-squared / sigma**2)
    # exact symmetry regardless of cdist rounding
    s = np.triu(s) + np.triu(s, 1).T
    logger.debug(f"gaussian similarity: n={data.n}, sigma={sigma}")
    return SimilarityMatrix.from_matrix(s)


def laplacian_rw(sim: SimilarityMatrix) -> Laplacian:
    """Random-walk Laplacian L_rw = I - D^-1 S

    Raises:
        IsolatedVertex: For the first point whose degree is zero
    """
    isolated = np.flatnonzero(sim.degrees <= 0)
    if isolated.size:
        raise IsolatedVertex(int(isolated[0]))

    transition = sim.s / sim.degrees[:, None]
    lap = np.eye(sim.n) - transition
    # enforce zero row sums against rounding in the division
    np.fill_diagonal(lap, 0.0)
    np.fill_diagonal(lap, -lap.sum(axis=1))
    return Laplacian(l=_frozen(lap), source=sim)


def connected_components(sim: SimilarityMatrix) -> Partition:
    """Connected components of the graph {(i, j): s_ij > 0}

    Component labels are ordered by their smallest member index.
    """
    graph = csr_matrix(sim.s > 0)
    count, labels = _scipy_components(graph, directed=False)
    logger.debug(f"similarity graph has {count} connected component(s)")
    return Partition.from_labels(labels)
