from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from config.settings import settings
from rounding.binarize import binarize, binarize_range, check_delta, overlay, partition_of
from rounding.errors import InvalidParameter, QOutOfRange
from rounding.partition import Partition
from rounding.spectra import EigenSystem
from utils.logger import logger

# ============================================================================
# NAIVE ROUNDING
# ============================================================================
# naive_rounding1 overlays the partitions of the first q pairs of binary
# vectors. naive_rounding2 increases q until the containment test passes
# for q and fails for q + 1. Only reliable in the ideal case.


@dataclass(frozen=True)
class NaiveResult:
    """Outcome of naive_rounding2

    ctest_trace maps each visited q to the pair (cTest(P_q, q, K),
    cTest(P_q+1, q+1, K)).
    """

    partition: Partition
    q_used: int
    ctest_trace: Dict[int, Tuple[bool, bool]] = field(default_factory=dict)
    fallback: bool = False


class _OverlayCache:
    """Incremental naive_rounding1: P_q = overlay(P_q-1, e_q+, e_q-)"""

    def __init__(self, eigs: EigenSystem, delta: float):
        self.eigs = eigs
        self.delta = delta
        self.partitions: List[Partition] = [Partition.single_cell(eigs.n)]

    def get(self, q: int) -> Partition:
        while len(self.partitions) <= q:
            j = len(self.partitions) - 1
            plus, minus = binarize(self.eigs.vector(j), self.delta, eigen_index=j)
            self.partitions.append(
                overlay([self.partitions[-1], partition_of(plus), partition_of(minus)])
            )
        return self.partitions[q]


def naive_rounding1(eigs: EigenSystem, q: int, delta: Optional[float] = None) -> Partition:
    """Overlay the partitions of the binarized eigenvectors 1..q

    Args:
        eigs: Leading eigenpairs
        q: Number of leading eigenvectors, 2 <= q <= eigs.K
        delta: Binarization confidence; settings.delta when omitted

    Returns:
        The overlaid partition; its cell count need not equal q

    Raises:
        QOutOfRange: If q is outside [2, eigs.K]
    """
    delta = check_delta(settings.delta if delta is None else delta)
    if not 2 <= q <= eigs.K:
        raise QOutOfRange(f"q={q} is outside [2, {eigs.K}]", "naive")
    parts = [partition_of(bv) for bv in binarize_range(eigs, 0, q, delta)]
    return overlay(parts)


def ctest(
    p: Partition, q: int, K: int, eigs: EigenSystem, delta: Optional[float] = None  # noqa: N803
) -> bool:
    """Containment test: every binary vector from eigenvectors q+1..K has
    its support inside a single cell of p

    All-zero binary vectors pass vacuously.
    """
    delta = check_delta(settings.delta if delta is None else delta)
    if not q < K <= eigs.K:
        raise InvalidParameter(f"cTest needs q < K <= {eigs.K}, got q={q}, K={K}", "naive")
    for bv in binarize_range(eigs, q, K, delta):
        if not p.contains(bv.support):
            logger.debug(f"cTest(q={q}): support of {bv.name} spans several cells")
            return False
    return True


def naive_rounding2(
    eigs: EigenSystem, K: Optional[int] = None, delta: Optional[float] = None  # noqa: N803
) -> NaiveResult:
    """Pick q by the pass-then-fail containment pattern

    Loops q = 2..floor(K/2) and returns the first P_q with cTest(P_q) true
    and cTest(P_q+1) false. Without such a q the last P_q is returned and
    a warning is logged.
    """
    K = min(settings.eigen_count, eigs.K) if K is None else K
    delta = check_delta(settings.delta if delta is None else delta)
    if K > eigs.K:
        raise QOutOfRange(f"K={K} exceeds the {eigs.K} computed eigenpairs", "naive")
    q_max = K // 2
    if q_max < 2:
        raise QOutOfRange(f"K={K} leaves no q in [2, K/2]", "naive")

    cache = _OverlayCache(eigs, delta)
    trace: Dict[int, Tuple[bool, bool]] = {}
    partition = cache.get(2)
    for q in range(2, q_max + 1):
        partition = cache.get(q)
        refined = cache.get(q + 1)
        passes = ctest(partition, q, K, eigs, delta)
        next_passes = ctest(refined, q + 1, K, eigs, delta)
        trace[q] = (passes, next_passes)
        if passes and not next_passes:
            logger.info(f"naive rounding stopped at q={q} with {partition.k} clusters")
            return NaiveResult(partition=partition, q_used=q, ctest_trace=trace)

    logger.warning(
        f"naive rounding found no pass/fail transition for q in [2, {q_max}]; "
        f"returning P_{q_max} ({partition.k} clusters). K may be too small."
    )
    return NaiveResult(partition=partition, q_used=q_max, ctest_trace=trace, fallback=True)
