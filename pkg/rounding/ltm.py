from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed
from scipy.special import logsumexp

from config.settings import DOF_MODES, settings
from rounding.binarize import BinaryVector, binarize_range, check_delta
from rounding.errors import (
    InvalidParameter,
    LengthMismatch,
    NonFiniteLikelihood,
    QOutOfRange,
    SingleCluster,
)
from rounding.lcm import (
    FeatureData,
    LCModel,
    Seed,
    derive_seed,
    hard_assign,
    log_joint,
    select_k,
)
from rounding.partition import Partition
from rounding.spectra import EigenSystem
from utils.logger import logger

# ============================================================================
# LATENT TREE MODEL
# ============================================================================
# The LCM learned on the first q eigenvector pairs is the primary part. For
# every cell C_r a binary latent Y_r is attached below Y with
# P(Y_r = 1 | Y = r') = [r' = r]. Each secondary binary vector (eigenvectors
# q+1..K) hangs under the Y_r whose cell covers its support best, with
#   P(e = 1 | Y_r = 1) = |D_s & C_r| / |C_r|
#   P(e = 1 | Y_r = 0) = |D_s - C_r| / (n - |C_r|)
# The secondary part is never re-estimated; it only scores q.


@dataclass(frozen=True)
class LTModel:
    """Latent class model extended with a deterministic secondary part

    attachments[s] is the cell r(s) the secondary vector s connects to;
    sec_cond[s] = (P(e_s = 1 | Y_r = 1), P(e_s = 1 | Y_r = 0)) as exact
    count ratios. cell_states[r] is the latent state of Y behind cell r.
    """

    primary: LCModel
    clusters: Partition
    cell_states: np.ndarray
    attachments: np.ndarray
    sec_cond: np.ndarray
    secondary_origin: Tuple[Tuple[int, str], ...] = ()

    @property
    def k(self) -> int:
        return self.clusters.k

    @property
    def num_secondary(self) -> int:
        return int(self.attachments.size)


class QRecord(NamedTuple):
    q: int
    k: int
    lcm_bic: float
    ltm_bic: float


@dataclass(frozen=True)
class RoundingResult:
    """Outcome of ltm_rounding: the primary-part partition at the best q"""

    partition: Partition
    q_selected: int
    k_selected: int
    trace: Tuple[QRecord, ...]
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def selected_bic(self) -> float:
        return next(r.ltm_bic for r in self.trace if r.q == self.q_selected)


def extend_to_ltm(
    m: LCModel,
    part: Partition,
    secondary: Sequence[BinaryVector],
    cell_states: Optional[np.ndarray] = None,
) -> LTModel:
    """Attach secondary binary vectors to the hard partition of an LCM

    Args:
        m: Fitted latent class model (the primary part)
        part: Hard partition of m over the same points
        secondary: Binary vectors of eigenvectors q+1..K
        cell_states: Latent state behind each cell; cell r <-> state r if omitted

    Returns:
        The latent tree model with count-ratio secondary conditionals

    Raises:
        SingleCluster: If part has one cell, which leaves n - |C_r| = 0
    """
    n = part.n
    if part.k == 1:
        raise SingleCluster(
            "a one-cell partition leaves n - |C_r| = 0 in the secondary conditionals",
            "ltm",
        )
    states = np.array(
        np.arange(part.k) if cell_states is None else cell_states, dtype=np.int64
    )
    if states.shape != (part.k,):
        raise LengthMismatch("one latent state per cell is required", "ltm")

    sizes = part.sizes()
    if secondary:
        bits = np.column_stack([bv.bits for bv in secondary]).astype(np.int64)
        if bits.shape[0] != n:
            raise LengthMismatch(
                f"secondary vectors cover {bits.shape[0]} points, partition {n}", "ltm"
            )
        membership = np.zeros((n, part.k), dtype=np.int64)
        membership[np.arange(n), part.assignment] = 1
        overlap = bits.T @ membership  # |D_s & C_r|, shape S x k
        support = bits.sum(axis=0)
        # argmax keeps the lowest r on ties
        attachments = np.argmax(overlap, axis=1)
        covered = overlap[np.arange(attachments.size), attachments]
        cell_size = sizes[attachments]
        sec_cond = np.column_stack(
            [covered / cell_size, (support - covered) / (n - cell_size)]
        )
    else:
        attachments = np.zeros(0, dtype=np.int64)
        sec_cond = np.zeros((0, 2))

    for array in (states, attachments, sec_cond):
        array.setflags(write=False)
    return LTModel(
        primary=m,
        clusters=part,
        cell_states=states,
        attachments=attachments,
        sec_cond=sec_cond,
        secondary_origin=tuple((bv.eigen_index, bv.side) for bv in secondary),
    )


def ltm_loglik(
    m: LTModel,
    primary_data: FeatureData,
    secondary_data: FeatureData,
    epsilon: Optional[float] = None,
) -> float:
    """Log-likelihood of the latent tree model

    Y_r is a deterministic function of Y and is summed out: under Y = y the
    secondary vector s sees Y_r(s) = 1 iff y is the state of cell r(s). Secondary conditionals are
    floored to [eps, 1 - eps] here only; the stored ratios stay exact.

    Raises:
        NonFiniteLikelihood: If a point has probability 0 under every state,
            which can only happen with epsilon = 0
    """
    epsilon = settings.smoothing if epsilon is None else epsilon
    if primary_data.n != secondary_data.n:
        raise LengthMismatch(
            f"primary data has {primary_data.n} rows, secondary {secondary_data.n}",
            "ltm",
        )
    if secondary_data.num_features != m.num_secondary:
        raise LengthMismatch(
            f"model has {m.num_secondary} secondary vectors, data has "
            f"{secondary_data.num_features}",
            "ltm",
        )

    joint = log_joint(m.primary.prior, m.primary.cond, primary_data.rows)

    if m.num_secondary:
        on = np.clip(m.sec_cond[:, 0], epsilon, 1.0 - epsilon)
        off = np.clip(m.sec_cond[:, 1], epsilon, 1.0 - epsilon)
        bits = secondary_data.rows.astype(bool)
        with np.errstate(divide="ignore"):
            ll_on = np.where(bits, np.log(on), np.log1p(-on))
            ll_off = np.where(bits, np.log(off), np.log1p(-off))
        attached_state = m.cell_states[m.attachments]
        for y in range(m.primary.k):
            joint[:, y] += np.where(attached_state == y, ll_on, ll_off).sum(axis=1)

    point_ll = logsumexp(joint, axis=1)
    bad = np.flatnonzero(~np.isfinite(point_ll))
    if bad.size:
        raise NonFiniteLikelihood(
            f"point {int(bad[0])} has probability 0 under every latent state; "
            "secondary conditionals need smoothing",
            point=int(bad[0]),
        )
    return float(point_ll.sum())


def ltm_free_parameters(m: LTModel, dof_mode: Optional[str] = None) -> int:
    """Free parameters of the tree model

    "secondary": LCM parameters plus 2 per secondary vector.
    "with-links": additionally counts the Y -> Y_r link tables, one parameter per
    (cell, latent state) pair.
    """
    dof_mode = settings.ltm_dof_mode if dof_mode is None else dof_mode
    if dof_mode not in DOF_MODES:
        raise InvalidParameter(f"unknown dof mode {dof_mode!r}", "ltm")
    d = m.primary.free_parameters() + 2 * m.num_secondary
    if dof_mode == "with-links":
        d += m.k * m.primary.k
    return d


def ltm_bic(
    m: LTModel,
    primary_data: FeatureData,
    secondary_data: FeatureData,
    dof_mode: Optional[str] = None,
    epsilon: Optional[float] = None,
) -> float:
    """BIC of the tree model: ltm_loglik - (d / 2) ln n"""
    loglik = ltm_loglik(m, primary_data, secondary_data, epsilon=epsilon)
    return loglik - 0.5 * ltm_free_parameters(m, dof_mode) * np.log(primary_data.n)


def _score_q(
    vectors: List[BinaryVector],
    n: int,
    q: int,
    K: int,  # noqa: N803
    restarts: Optional[int],
    seed: Seed,
) -> Tuple[QRecord, Partition]:
    primary = FeatureData.from_vectors(vectors[: 2 * q], n)
    secondary_vectors = vectors[2 * q : 2 * K]
    secondary = FeatureData.from_vectors(secondary_vectors, n)

    model, bic_trace = select_k(primary, restarts=restarts, seed=derive_seed(seed, q))
    lcm_score = max(point.bic for point in bic_trace)
    partition, states = hard_assign(model, primary)
    try:
        tree = extend_to_ltm(model, partition, secondary_vectors, cell_states=states)
        score = ltm_bic(tree, primary, secondary)
    except SingleCluster:
        logger.warning(f"q={q}: hard partition has a single cell; q is not scored")
        score = -np.inf
    logger.debug(f"q={q}: k={partition.k} lcm_bic={lcm_score:.4f} ltm_bic={score:.4f}")
    return QRecord(q=q, k=partition.k, lcm_bic=lcm_score, ltm_bic=float(score)), partition


def ltm_rounding(
    eigs: EigenSystem,
    K: Optional[int] = None,  # noqa: N803
    delta: Optional[float] = None,
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
) -> RoundingResult:
    """Select q, k and the partition by latent tree BIC

    For q = 2..floor(K/2): learn an LCM on the first q eigenvector pairs
    with BIC-selected k, take its hard partition, extend it with the
    secondary vectors of eigenvectors q+1..K and score the tree by BIC.
    The partition of the best-scoring q is returned (first maximum on ties).

    Args:
        eigs: At least K leading eigenpairs
        K: Eigenvectors used (settings.eigen_count)
        delta: Binarization confidence (settings.delta)
        restarts: EM restarts per fit (settings.restarts)
        seed: Base seed; q-loop iterations use seeds derived from (seed, q)

    Returns:
        RoundingResult with the selected partition and the full per-q trace
    """
    K = settings.eigen_count if K is None else K
    delta = check_delta(settings.delta if delta is None else delta)
    restarts = settings.restarts if restarts is None else restarts
    seed = settings.seed if seed is None else seed
    if K > eigs.K:
        raise QOutOfRange(f"K={K} exceeds the {eigs.K} computed eigenpairs", "ltm")
    q_max = K // 2
    if q_max < 2:
        raise QOutOfRange(f"K={K} leaves no q in [2, K/2]", "ltm")

    vectors = binarize_range(eigs, 0, K, delta)
    scored = Parallel(n_jobs=settings.threads, prefer="threads")(
        delayed(_score_q)(vectors, eigs.n, q, K, restarts, seed)
        for q in range(2, q_max + 1)
    )

    trace = tuple(record for record, _ in scored)
    best = 0
    for index, (record, _) in enumerate(scored):
        if record.ltm_bic > trace[best].ltm_bic:
            best = index
    selected, partition = scored[best]

    if selected.q == q_max:
        logger.warning(
            f"LTM BIC is maximal at the boundary q=floor(K/2)={q_max}; "
            "K is likely too small"
        )
    logger.info(
        f"LTM rounding selected q={selected.q} with {partition.k} clusters "
        f"(ltm_bic={selected.ltm_bic:.4f})"
    )
    return RoundingResult(
        partition=partition,
        q_selected=selected.q,
        k_selected=partition.k,
        trace=trace,
        params={"K": K, "delta": delta, "seed": seed, "restarts": restarts},
    )


def best_of_runs(results: Sequence[RoundingResult]) -> RoundingResult:
    """The run whose selected tree model has the highest BIC (ties: earliest)"""
    if not results:
        raise InvalidParameter("best_of_runs needs at least one result", "ltm")
    best = results[0]
    for result in results[1:]:
        if result.selected_bic > best.selected_bic:
            best = result
    return best
