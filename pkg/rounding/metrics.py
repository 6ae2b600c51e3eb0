from scipy.stats import entropy
from sklearn.metrics import rand_score
from sklearn.metrics.cluster import contingency_matrix

from models.schemas import MetricReport
from rounding.errors import InvalidParameter, LengthMismatch
from rounding.partition import Partition

# ============================================================================
# CLUSTERING METRICS
# ============================================================================
# Rand index and variation of information between an obtained partition and
# the true one. VI uses natural logarithms (nats).


def _check_lengths(p: Partition, t: Partition) -> None:
    if p.n != t.n:
        raise LengthMismatch(f"partitions cover {p.n} and {t.n} points", "metrics")


def rand_index(p: Partition, t: Partition) -> float:
    """Fraction of point pairs on which p and t agree (together or apart)"""
    _check_lengths(p, t)
    if p.n < 2:
        raise InvalidParameter("the Rand index needs at least 2 points", "metrics")
    return float(rand_score(t.assignment, p.assignment))


def variation_of_information(p: Partition, t: Partition) -> float:
    """VI(p, t) = H(p) + H(t) - 2 I(p, t) = 2 H(p, t) - H(p) - H(t)"""
    _check_lengths(p, t)
    if p.n == 0:
        return 0.0
    joint = contingency_matrix(p.assignment, t.assignment).ravel()
    value = 2.0 * entropy(joint) - entropy(p.sizes()) - entropy(t.sizes())
    # clamp rounding noise around identical partitions
    return float(max(value, 0.0))


def report(p: Partition, t: Partition) -> MetricReport:
    """MetricReport comparing an obtained partition p with the truth t"""
    return MetricReport(
        rand_index=rand_index(p, t),
        vi=variation_of_information(p, t),
        k_found=p.k,
        k_true=t.k,
    )
