from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from rounding.errors import InvalidInput, LengthMismatch

# ============================================================================
# PARTITION
# ============================================================================
# Canonically labelled assignment of points to clusters. Cluster 0 holds
# point 0, cluster 1 holds the smallest index outside cluster 0, and so on,
# so two partitions are equal iff their assignment vectors are equal.


def canonical_labels(labels: Sequence[int] | np.ndarray) -> np.ndarray:
    """Relabel an arbitrary label vector by order of first appearance

    Args:
        labels: Any hashable-valued label vector of length n

    Returns:
        Integer array with labels 0..k-1 in order of first occurrence
    """
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise InvalidInput("labels must be a one-dimensional vector", "partition")
    if labels.size == 0:
        return np.zeros(0, dtype=np.int64)
    _, first_index, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(first_index.size, dtype=np.int64)
    rank[np.argsort(first_index, kind="stable")] = np.arange(first_index.size)
    return rank[inverse.reshape(-1)]


@dataclass(frozen=True)
class Partition:
    """Assignment of every data point to one of k nonempty clusters

    Build instances with Partition.from_labels(); the constructor expects
    labels that are already canonical.
    """

    assignment: np.ndarray
    k: int

    @classmethod
    def from_labels(cls, labels: Sequence[int] | np.ndarray) -> "Partition":
        canonical = canonical_labels(labels)
        canonical.setflags(write=False)
        k = int(canonical.max()) + 1 if canonical.size else 0
        return cls(assignment=canonical, k=k)

    @classmethod
    def single_cell(cls, n: int) -> "Partition":
        return cls.from_labels(np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return int(self.assignment.size)

    def cells(self) -> List[np.ndarray]:
        """Point indices of every cell, ordered by label"""
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.cumsum(np.bincount(self.assignment, minlength=self.k))[:-1]
        return np.split(order, bounds)

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def refines(self, other: "Partition") -> bool:
        """True iff every cell of self lies inside one cell of other"""
        if self.n != other.n:
            raise LengthMismatch(
                f"partitions cover {self.n} and {other.n} points", "partition"
            )
        return all(np.unique(other.assignment[cell]).size == 1 for cell in self.cells())

    def contains(self, support: np.ndarray) -> bool:
        """True iff the point set `support` lies inside a single cell"""
        return np.unique(self.assignment[support]).size <= 1

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.assignment, other.assignment)

    def __hash__(self) -> int:
        return hash(self.assignment.tobytes())
