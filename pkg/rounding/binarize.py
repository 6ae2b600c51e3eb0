from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from rounding.errors import InvalidParameter, LengthMismatch
from rounding.partition import Partition, canonical_labels
from rounding.spectra import EigenSystem

# ============================================================================
# BINARIZATION AND OVERLAY
# ============================================================================
# Each eigenvector e_s yields two indicator vectors: e_s+ marks the points
# with e_sj > 0 and e_sj > delta * max(e_s), e_s- marks the points with
# e_sj < 0 and e_sj < delta * min(e_s). Strict inequalities throughout.

PLUS = "plus"
MINUS = "minus"


@dataclass(frozen=True)
class BinaryVector:
    """Indicator vector over the data points obtained from one eigenvector

    An all-zero ("degenerated") vector is valid.
    """

    bits: np.ndarray
    eigen_index: int
    side: str

    @property
    def support_size(self) -> int:
        return int(self.bits.sum())

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.bits)

    @property
    def name(self) -> str:
        return f"e{self.eigen_index + 1}{'+' if self.side == PLUS else '-'}"


def check_delta(delta: float) -> float:
    if not 0.0 < delta < 1.0:
        raise InvalidParameter(
            f"delta must lie in the open interval (0, 1), got {delta}", "binarize"
        )
    return float(delta)


def _bits(mask: np.ndarray) -> np.ndarray:
    bits = mask.astype(np.int8)
    bits.setflags(write=False)
    return bits


def binarize(
    vec: np.ndarray, delta: float, eigen_index: int = 0
) -> Tuple[BinaryVector, BinaryVector]:
    """Split an eigenvector into its plus-side and minus-side indicators

    Args:
        vec: Eigenvector values over the n data points
        delta: Confidence parameter in (0, 1)
        eigen_index: 0-based index of the eigenvector, kept as provenance

    Returns:
        The pair (plus, minus)
    """
    delta = check_delta(delta)
    vec = np.asarray(vec, dtype=np.float64)
    upper = vec.max(initial=0.0)
    lower = vec.min(initial=0.0)
    plus = (vec > 0) & (vec > delta * upper)
    minus = (vec < 0) & (vec < delta * lower)
    return (
        BinaryVector(bits=_bits(plus), eigen_index=eigen_index, side=PLUS),
        BinaryVector(bits=_bits(minus), eigen_index=eigen_index, side=MINUS),
    )


def binarize_range(eigs: EigenSystem, start: int, stop: int, delta: float) -> List[BinaryVector]:
    """Binary vectors of eigenvectors start..stop-1 (0-based), ordered
    e_start+, e_start-, e_start+1+, ..."""
    vectors: List[BinaryVector] = []
    for j in range(start, stop):
        vectors.extend(binarize(eigs.vector(j), delta, eigen_index=j))
    return vectors


def feature_matrix(vectors: Sequence[BinaryVector], n: int) -> np.ndarray:
    """Stack binary vectors as the columns of an n x len(vectors) matrix"""
    if not vectors:
        return np.zeros((n, 0), dtype=np.int8)
    return np.column_stack([bv.bits for bv in vectors]).astype(np.int8)


def partition_of(bv: BinaryVector) -> Partition:
    """Two-cell partition {ones, zeros}, or one cell if bv is constant"""
    return Partition.from_labels(bv.bits)


def overlay(parts: Sequence[Partition]) -> Partition:
    """Coarsest common refinement of the given partitions

    Two points share an output cell iff they share a cell in every input.

    Raises:
        LengthMismatch: If the partitions cover different numbers of points
    """
    if not parts:
        raise InvalidParameter("overlay needs at least one partition", "binarize")
    n = parts[0].n
    for part in parts[1:]:
        if part.n != n:
            raise LengthMismatch(
                f"cannot overlay partitions of {n} and {part.n} points", "binarize"
            )
    signatures = np.column_stack([part.assignment for part in parts])
    _, inverse = np.unique(signatures, axis=0, return_inverse=True)
    return Partition.from_labels(canonical_labels(inverse.reshape(-1)))
