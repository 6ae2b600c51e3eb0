from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, eigh

from rounding.errors import InvalidParameter, KTooLarge, SolverFailure
from rounding.graph import Laplacian
from rounding.partition import Partition
from utils.logger import logger

# ============================================================================
# LEADING EIGENPAIRS OF L_rw
# ============================================================================
# L_rw is not symmetric, so the eigenproblem is solved in its symmetric form
# D^-1/2 (D - S) D^-1/2 v = lambda v and mapped back with u = D^-1/2 v.


@dataclass(frozen=True)
class EigenSystem:
    """K smallest-eigenvalue eigenpairs of L_rw in ascending order

    Column j of `eigenvectors` pairs with eigenvalues[j]. In each column the
    entry of largest magnitude is positive.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def K(self) -> int:  # noqa: N802
        return int(self.eigenvalues.size)

    @property
    def n(self) -> int:
        return int(self.eigenvectors.shape[0])

    def vector(self, j: int) -> np.ndarray:
        """Eigenvector j (0-based)"""
        return self.eigenvectors[:, j]

    def truncated(self, K: int) -> "EigenSystem":  # noqa: N803
        """The first K eigenpairs of this system"""
        if not 1 <= K <= self.K:
            raise KTooLarge(f"cannot take {K} of {self.K} eigenpairs", "spectra")
        values = np.array(self.eigenvalues[:K])
        vectors = np.array(self.eigenvectors[:, :K])
        values.setflags(write=False)
        vectors.setflags(write=False)
        return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def normalize_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so that each column's largest-magnitude entry is positive

    Ties in magnitude are decided by the lowest row index.
    """
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def leading_eigenpairs(lap: Laplacian, K: int) -> EigenSystem:  # noqa: N803
    """The K leading eigenpairs of the random-walk Laplacian

    Args:
        lap: Random-walk Laplacian (carries its similarity matrix)
        K: Number of eigenpairs, 2 <= K <= n

    Returns:
        EigenSystem with D-orthonormal eigenvectors

    Raises:
        KTooLarge: If K > n
        SolverFailure: If LAPACK does not converge
    """
    n = lap.n
    if K > n:
        raise KTooLarge(f"K={K} eigenpairs requested for only {n} points", "spectra")
    if K < 2:
        raise InvalidParameter(f"K must be at least 2, got {K}", "spectra")

    sim = lap.source
    inv_sqrt = 1.0 / np.sqrt(sim.degrees)
    unnormalized = np.diag(sim.degrees) - sim.s
    symmetric = inv_sqrt[:, None] * unnormalized * inv_sqrt[None, :]
    symmetric = (symmetric + symmetric.T) / 2.0

    try:
        values, vectors = eigh(symmetric, subset_by_index=[0, K - 1], driver="evr")
    except LinAlgError as exc:
        raise SolverFailure(f"eigensolver did not converge: {exc}", "spectra") from exc

    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = inv_sqrt[:, None] * vectors[:, order]
    vectors = normalize_signs(vectors)

    values = np.ascontiguousarray(values)
    vectors = np.ascontiguousarray(vectors)
    values.setflags(write=False)
    vectors.setflags(write=False)

    zero_count = int(np.sum(values < 1e-8))
    logger.info(f"computed {K} eigenpairs; {zero_count} eigenvalue(s) below 1e-8")
    return EigenSystem(eigenvalues=values, eigenvectors=vectors)


def is_piecewise_constant(vec: np.ndarray, partition: Partition, tol: float) -> bool:
    """True iff the spread max - min within every cell is at most tol"""
    if tol <= 0:
        raise InvalidParameter("tol must be positive", "spectra")
    vec = np.asarray(vec, dtype=np.float64)
    for cell in partition.cells():
        values = vec[cell]
        if values.size and values.max() - values.min() > tol:
            return False
    return True
