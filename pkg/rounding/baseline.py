from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.cluster import KMeans

from config.settings import settings
from rounding.errors import KOutOfRange
from rounding.partition import Partition
from rounding.spectra import EigenSystem
from utils.logger import logger

# ============================================================================
# K-MEANS ROUNDING
# ============================================================================
# The classical reference: run K-means on the rows of the n x k matrix of
# leading eigenvectors. k is supplied by the caller, never estimated.


@dataclass(frozen=True)
class Embedding:
    """Rows y_i of U = [e_1 .. e_k] as points in R^k"""

    u: np.ndarray

    @classmethod
    def from_eigensystem(cls, eigs: EigenSystem, k: int) -> "Embedding":
        u = np.array(eigs.eigenvectors[:, :k])
        u.setflags(write=False)
        return cls(u=u)

    @property
    def k(self) -> int:
        return int(self.u.shape[1])


def kmeans_rounding(
    eigs: EigenSystem,
    k: int,
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    max_iter: Optional[int] = None,
) -> Partition:
    """Lloyd's K-means on the k leading eigenvectors

    Args:
        eigs: Leading eigenpairs
        k: Number of clusters, 2 <= k <= eigs.K
        restarts: k-means++ initializations; the lowest within-cluster sum
            of squares wins (settings.restarts)
        seed: Random state (settings.seed)
        max_iter: Lloyd iterations per run (settings.kmeans_max_iter)

    Raises:
        KOutOfRange: If k is outside [2, eigs.K]
    """
    restarts = settings.restarts if restarts is None else restarts
    seed = settings.seed if seed is None else seed
    max_iter = settings.kmeans_max_iter if max_iter is None else max_iter
    if not 2 <= k <= eigs.K:
        raise KOutOfRange(f"k={k} is outside [2, {eigs.K}]", "baseline")

    embedding = Embedding.from_eigensystem(eigs, k)
    model = KMeans(
        n_clusters=k,
        init="k-means++",
        n_init=restarts,
        max_iter=max_iter,
        algorithm="lloyd",
        random_state=seed,
    ).fit(embedding.u)
    logger.info(f"k-means rounding: k={k}, wcss={model.inertia_:.6g}")
    return Partition.from_labels(model.labels_)
