from typing import List, Sequence

import numpy as np

from models.schemas import ShapeSpec
from rounding.errors import InvalidInput, InvalidParameter
from rounding.graph import DataSet
from utils.logger import logger

# ============================================================================
# SYNTHETIC DATA GENERATOR
# ============================================================================
# Samples blobs, rings and crescents and labels each point with the index of
# the shape that produced it. The draws do not depend on noise_sd, so the
# same seed gives the same underlying points at every noise level.


def _sample_shape(spec: ShapeSpec, rng: np.random.Generator) -> np.ndarray:
    center = np.asarray(spec.center, dtype=np.float64)
    if spec.kind == "gaussian_blob":
        return center + spec.scale * rng.standard_normal((spec.count, 2))

    if spec.kind == "ring":
        start, span = 0.0, 2.0 * np.pi
    else:
        start, span = spec.arc_start, spec.arc_span
    # stratified angles: uniform marginally, without large gaps along the arc
    offsets = rng.uniform(-0.25, 0.25, spec.count)
    angles = start + span * (np.arange(spec.count) + 0.5 + offsets) / spec.count
    radii = spec.scale + spec.width * rng.uniform(-0.5, 0.5, spec.count)
    return center + radii[:, None] * np.column_stack([np.cos(angles), np.sin(angles)])


def _generate(specs: Sequence[ShapeSpec], seed: int, noise_factor: float) -> DataSet:
    if sum(spec.count for spec in specs) < 2:
        raise InvalidInput("a generated data set needs at least 2 points", "datagen")
    rng = np.random.default_rng(seed)
    blocks: List[np.ndarray] = []
    labels: List[np.ndarray] = []
    for index, spec in enumerate(specs):
        base = _sample_shape(spec, rng)
        jitter = rng.standard_normal((spec.count, 2))
        blocks.append(base + noise_factor * spec.noise_sd * jitter)
        labels.append(np.full(spec.count, index, dtype=np.int64))
    return DataSet(points=np.vstack(blocks), labels=np.concatenate(labels))


def generate(specs: Sequence[ShapeSpec], seed: int) -> DataSet:
    """Sample every shape and label points by shape index

    Args:
        specs: Shapes in label order
        seed: Seed of the single generator used for all draws

    Returns:
        DataSet with true labels 0..len(specs)-1
    """
    data = _generate(specs, seed, 1.0)
    logger.debug(f"generated {data.n} points from {len(specs)} shape(s), seed={seed}")
    return data


def noise_ladder(base: Sequence[ShapeSpec], levels: Sequence[float], seed: int) -> List[DataSet]:
    """One data set per noise level, jitter scaled by (1 + level)

    Level 0 reproduces generate(base, seed). Every level reuses the same
    seed, so the levels differ only in the jitter magnitude.
    """
    levels = [float(level) for level in levels]
    if any(level < 0 for level in levels):
        raise InvalidParameter("noise levels must be nonnegative", "datagen")
    if any(b < a for a, b in zip(levels, levels[1:])):
        raise InvalidParameter("noise levels must be ascending", "datagen")
    return [_generate(base, seed, 1.0 + level) for level in levels]
