from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from config.settings import settings
from rounding.binarize import BinaryVector, feature_matrix
from rounding.errors import EmptyData, InvalidInput, InvalidParameter, LengthMismatch
from rounding.partition import Partition
from utils.logger import logger

# ============================================================================
# LATENT CLASS MODEL
# ============================================================================
# One latent variable Y with k states over 2q binary features
# e_1+, e_1-, ..., e_q+, e_q-. Parameters are learned by EM with random
# restarts; k is chosen by BIC. The M-step maximises the expected
# log-likelihood over parameters floored at eps (conditionals in
# [eps, 1 - eps], every prior entry >= eps), so the log-likelihood never
# decreases from one iteration to the next.


@dataclass(frozen=True)
class FeatureData:
    """n x 2q binary matrix, columns ordered e_1+, e_1-, ..., e_q+, e_q-"""

    rows: np.ndarray
    origins: Tuple[Tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows)
        if rows.ndim != 2:
            raise InvalidInput("feature rows must form a matrix", "lcm")
        if not np.all((rows == 0) | (rows == 1)):
            raise InvalidInput("features must be binary", "lcm")
        rows = np.ascontiguousarray(rows, dtype=np.float64)
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)
        if self.origins and len(self.origins) != rows.shape[1]:
            raise InvalidInput("one origin per feature column is required", "lcm")

    @classmethod
    def from_vectors(cls, vectors: Sequence[BinaryVector], n: int) -> "FeatureData":
        return cls(
            rows=feature_matrix(vectors, n),
            origins=tuple((bv.eigen_index, bv.side) for bv in vectors),
        )

    @property
    def n(self) -> int:
        return int(self.rows.shape[0])

    @property
    def num_features(self) -> int:
        return int(self.rows.shape[1])


@dataclass(frozen=True)
class LCModel:
    """Fitted latent class model

    cond[f, y] = P(feature_f = 1 | Y = y). `history` holds the per-iteration
    log-likelihood of the EM run that produced the parameters.
    """

    prior: np.ndarray
    cond: np.ndarray
    feature_origin: Tuple[Tuple[int, str], ...] = ()
    history: Tuple[float, ...] = field(default=(), compare=False)

    @property
    def k(self) -> int:
        return int(self.prior.size)

    @property
    def num_features(self) -> int:
        return int(self.cond.shape[0])

    def free_parameters(self) -> int:
        return (self.k - 1) + self.num_features * self.k


Seed = Union[int, Sequence[int]]


def derive_seed(seed: Seed, *keys: int) -> List[int]:
    """Entropy for a child generator: the parent seed followed by `keys`"""
    base = [int(seed)] if isinstance(seed, (int, np.integer)) else [int(s) for s in seed]
    return base + [int(key) for key in keys]


class BicPoint(NamedTuple):
    k: int
    loglik: float
    bic: float


def floored_proportions(weight: np.ndarray, epsilon: float) -> np.ndarray:
    """Maximiser of sum_y w_y ln p_y over distributions with every p_y >= eps

    States whose proportional share falls below eps are pinned at eps and the
    rest of the mass is shared out again in proportion to weight.

    Raises:
        InvalidParameter: If k * eps > 1, where no such distribution exists
    """
    weight = np.asarray(weight, dtype=np.float64)
    k = weight.size
    if k * epsilon > 1.0 + 1e-12:
        raise InvalidParameter(
            f"a floor of {epsilon} cannot hold for {k} states", "lcm"
        )
    pinned = np.zeros(k, dtype=bool)
    while True:
        free = ~pinned
        share = 1.0 - epsilon * pinned.sum()
        total = weight[free].sum()
        p = np.full(k, epsilon)
        if total > 0:
            p[free] = share * weight[free] / total
        else:
            p[free] = share / free.sum()
        low = free & (p < epsilon)
        if not low.any():
            return p
        pinned |= low


def floored_means(counts: np.ndarray, weight: np.ndarray, epsilon: float) -> np.ndarray:
    """Bernoulli maximum likelihood counts / weight restricted to [eps, 1 - eps]

    Columns with zero weight sit at the floor.
    """
    safe = np.where(weight > 0, weight, 1.0)
    return np.clip(counts / safe[None, :], epsilon, 1.0 - epsilon)


def log_joint(prior: np.ndarray, cond: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """log P(Y = y, row) for every row and state, shape n x k"""
    return np.log(prior)[None, :] + rows @ np.log(cond) + (1.0 - rows) @ np.log1p(-cond)


def _m_step(
    resp: np.ndarray, rows: np.ndarray, epsilon: float
) -> Tuple[np.ndarray, np.ndarray]:
    weight = resp.sum(axis=0)
    prior = floored_proportions(weight, epsilon)
    cond = floored_means(rows.T @ resp, weight, epsilon)
    return prior, cond


def seed_responsibilities(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Hard starting responsibilities from k-means++ seeding on Hamming distance

    The first seed row is uniform; each further one is drawn with probability
    proportional to its squared distance from the nearest seed so far (uniform
    once every row coincides with a seed). Points join their nearest seed,
    ties going to the earlier seed.
    """
    n = rows.shape[0]
    seeds = [int(rng.integers(n))]
    nearest = cdist(rows, rows[seeds], metric="cityblock")[:, 0]
    for _ in range(1, k):
        weights = nearest**2
        total = weights.sum()
        index = int(rng.choice(n, p=weights / total)) if total > 0 else int(rng.integers(n))
        seeds.append(index)
        nearest = np.minimum(nearest, cdist(rows, rows[[index]], metric="cityblock")[:, 0])

    labels = np.argmin(cdist(rows, rows[seeds], metric="cityblock"), axis=1)
    resp = np.zeros((n, k))
    resp[np.arange(n), labels] = 1.0
    return resp


def _check_data(data: FeatureData) -> None:
    if data.n == 0 or data.num_features == 0:
        raise EmptyData(
            f"cannot fit a latent class model to {data.n} points x "
            f"{data.num_features} features",
            "lcm",
        )


def _em_run(
    rows: np.ndarray,
    k: int,
    seed: np.random.SeedSequence,
    epsilon: float,
    tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, np.ndarray, List[float]]:
    """One EM run from seeded hard responsibilities"""
    rng = np.random.default_rng(seed)
    resp = seed_responsibilities(rows, k, rng)

    prior, cond = _m_step(resp, rows, epsilon)
    joint = log_joint(prior, cond, rows)
    point_ll = logsumexp(joint, axis=1)
    loglik = float(point_ll.sum())
    history = [loglik]

    for _ in range(max_iter - 1):
        resp = np.exp(joint - point_ll[:, None])
        prior, cond = _m_step(resp, rows, epsilon)
        joint = log_joint(prior, cond, rows)
        point_ll = logsumexp(joint, axis=1)
        new_loglik = float(point_ll.sum())
        converged = new_loglik - loglik <= tol * abs(loglik)
        loglik = new_loglik
        history.append(loglik)
        if converged:
            break

    return prior, cond, history


def em_fit(
    data: FeatureData,
    k: int,
    restarts: Optional[int] = None,
    seed: Optional[Seed] = None,
    epsilon: Optional[float] = None,
) -> Tuple[LCModel, float]:
    """Fit a k-state latent class model by EM with random restarts

    Args:
        data: Binary features
        k: Number of latent states (clusters), k >= 1
        restarts: Independent random initializations (settings.restarts)
        seed: Seed (or entropy sequence) for the restart generator
            (settings.seed)
        epsilon: Probability floor (settings.smoothing)

    Returns:
        The model with the highest log-likelihood and that log-likelihood.
        Ties go to the earlier restart.

    Raises:
        EmptyData: If there are no points or no features
        InvalidParameter: If k or restarts is below 1, or k * epsilon > 1
    """
    restarts = settings.restarts if restarts is None else restarts
    seed = settings.seed if seed is None else seed
    epsilon = settings.smoothing if epsilon is None else epsilon
    _check_data(data)
    if k < 1:
        raise InvalidParameter(f"k must be at least 1, got {k}", "lcm")
    if restarts < 1:
        raise InvalidParameter(f"restarts must be at least 1, got {restarts}", "lcm")
    if k * epsilon > 1.0 + 1e-12:
        raise InvalidParameter(f"a floor of {epsilon} cannot hold for {k} states", "lcm")

    seeds = np.random.SeedSequence(seed).spawn(restarts)
    runs = Parallel(n_jobs=settings.threads, prefer="threads")(
        delayed(_em_run)(data.rows, k, s, epsilon, settings.em_tol, settings.em_max_iter)
        for s in seeds
    )

    best_index = 0
    for index, (_, _, history) in enumerate(runs):
        if history[-1] > runs[best_index][2][-1]:
            best_index = index
    prior, cond, history = runs[best_index]
    logger.debug(
        f"EM k={k}: best of {restarts} restart(s) is #{best_index} with "
        f"loglik={history[-1]:.6f} after {len(history)} iteration(s)"
    )

    prior = np.ascontiguousarray(prior)
    cond = np.ascontiguousarray(cond)
    prior.setflags(write=False)
    cond.setflags(write=False)
    model = LCModel(
        prior=prior, cond=cond, feature_origin=data.origins, history=tuple(history)
    )
    return model, float(history[-1])


def log_likelihood(m: LCModel, data: FeatureData) -> float:
    """Sum over points of log sum_y P(y) prod_f P(f | y)"""
    _check_dimensions(m, data)
    return float(logsumexp(log_joint(m.prior, m.cond, data.rows), axis=1).sum())


def posterior(m: LCModel, row: np.ndarray) -> np.ndarray:
    """P(Y | row) for a single feature row"""
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (m.num_features,):
        raise LengthMismatch(
            f"row has {row.size} features, model has {m.num_features}", "lcm"
        )
    joint = log_joint(m.prior, m.cond, row[None, :])[0]
    return np.exp(joint - logsumexp(joint))


def posteriors(m: LCModel, data: FeatureData) -> np.ndarray:
    """P(Y | row) for every row, shape n x k"""
    _check_dimensions(m, data)
    joint = log_joint(m.prior, m.cond, data.rows)
    return np.exp(joint - logsumexp(joint, axis=1)[:, None])


def hard_assign(m: LCModel, data: FeatureData) -> Tuple[Partition, np.ndarray]:
    """Hard assignment plus the latent state behind every cell

    Returns:
        (partition, states) where states[r] is the latent state of cell r
    """
    states = np.argmax(posteriors(m, data), axis=1)
    partition = Partition.from_labels(states)
    cell_states = np.array([states[cell[0]] for cell in partition.cells()], dtype=np.int64)
    return partition, cell_states


def hard_partition(m: LCModel, data: FeatureData) -> Partition:
    """Assign every point to its maximum-posterior state (ties: lowest
    state), relabel canonically and drop empty states"""
    return hard_assign(m, data)[0]


def bic(m: LCModel, data: FeatureData) -> float:
    """BIC = loglik - (d / 2) ln n with d = (k - 1) + 2q k"""
    return log_likelihood(m, data) - 0.5 * m.free_parameters() * np.log(data.n)


def params_from_partition(
    partition: Partition, data: FeatureData, epsilon: Optional[float] = None
) -> LCModel:
    """Parameters read off a partition: prior = cell proportions, cond =
    within-cell feature means, both floored at epsilon as in the M-step"""
    epsilon = settings.smoothing if epsilon is None else epsilon
    if partition.n != data.n:
        raise LengthMismatch(
            f"partition covers {partition.n} points, data has {data.n}", "lcm"
        )
    resp = np.zeros((data.n, partition.k))
    resp[np.arange(data.n), partition.assignment] = 1.0
    prior, cond = _m_step(resp, data.rows, epsilon)
    return LCModel(prior=prior, cond=cond, feature_origin=data.origins)


def select_k(
    data: FeatureData,
    restarts: Optional[int] = None,
    seed: Optional[Seed] = None,
    max_k: Optional[int] = None,
) -> Tuple[LCModel, List[BicPoint]]:
    """Choose the number of clusters by BIC

    Fits k = 2, 3, ... and stops at the first k whose BIC is below that of
    k - 1, or at max_k (settings.max_clusters) or n.

    Returns:
        The model with maximum BIC (ties: smaller k) and the BIC trace
    """
    seed = settings.seed if seed is None else seed
    max_k = settings.max_clusters if max_k is None else max_k
    _check_data(data)
    upper = min(max_k, data.n)

    trace: List[BicPoint] = []
    best: Optional[LCModel] = None
    best_bic = -np.inf
    for k in range(2, max(upper, 2) + 1):
        model, loglik = em_fit(data, k, restarts=restarts, seed=derive_seed(seed, k))
        score = loglik - 0.5 * model.free_parameters() * np.log(data.n)
        trace.append(BicPoint(k=k, loglik=loglik, bic=float(score)))
        logger.debug(f"select_k: k={k} loglik={loglik:.4f} bic={score:.4f}")
        if score > best_bic:
            best, best_bic = model, score
        if len(trace) > 1 and score < trace[-2].bic:
            break

    assert best is not None
    return best, trace


def _check_dimensions(m: LCModel, data: FeatureData) -> None:
    if data.num_features != m.num_features:
        raise LengthMismatch(
            f"data has {data.num_features} features, model has {m.num_features}",
            "lcm",
        )
