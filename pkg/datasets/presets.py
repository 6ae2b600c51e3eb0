import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

from datasets.generator import generate, noise_ladder
from models.schemas import ShapeSpec
from rounding.errors import InvalidParameter
from rounding.graph import DataSet

# ============================================================================
# PRESET LAYOUTS
# ============================================================================
# Named synthetic layouts: three ideal-case data sets (separated so that the
# stated k-NN graph has one component per cluster) and a noisy ladder built
# on the five-cluster layout, clustered with Gaussian similarity.


@dataclass(frozen=True)
class Preset:
    name: str
    shapes: Tuple[ShapeSpec, ...]
    similarity: str
    description: str

    def scaled(self, size_scale: float) -> Tuple[ShapeSpec, ...]:
        """Shapes with point counts multiplied by size_scale (at least 3 each)"""
        if size_scale <= 0:
            raise InvalidParameter("size scale must be positive", "datagen")
        return tuple(
            spec.model_copy(update={"count": max(3, round(spec.count * size_scale))})
            for spec in self.shapes
        )


def _deg(angle: float) -> float:
    return math.radians(angle)


IDEAL_A = Preset(
    name="ideal-a",
    shapes=(
        ShapeSpec(kind="gaussian_blob", center=(0.0, 0.0), scale=0.15, count=100),
        ShapeSpec(kind="gaussian_blob", center=(2.0, 0.0), scale=0.15, count=100),
        ShapeSpec(kind="gaussian_blob", center=(1.0, 1.8), scale=0.15, count=100),
    ),
    similarity="knn:10",
    description="three well separated Gaussian blobs",
)

IDEAL_B = Preset(
    name="ideal-b",
    shapes=(
        ShapeSpec(
            kind="crescent", center=(2.0, 2.0), scale=2.5, width=0.1,
            arc_start=_deg(20), arc_span=_deg(140), count=150,
        ),
        ShapeSpec(
            kind="crescent", center=(2.0, 2.0), scale=2.5, width=0.1,
            arc_start=_deg(200), arc_span=_deg(140), count=150,
        ),
        ShapeSpec(kind="gaussian_blob", center=(0.6, 2.0), scale=0.08, count=70),
        ShapeSpec(kind="gaussian_blob", center=(3.4, 2.0), scale=0.08, count=70),
        ShapeSpec(kind="ring", center=(2.0, 2.0), scale=0.4, width=0.05, count=80),
    ),
    similarity="knn:10",
    description="two crescents enclosing two blobs and a small ring",
)

IDEAL_C = Preset(
    name="ideal-c",
    shapes=(
        ShapeSpec(kind="ring", center=(0.0, 0.0), scale=0.5, count=100, noise_sd=0.002),
        ShapeSpec(kind="ring", center=(0.0, 0.0), scale=1.5, count=200, noise_sd=0.002),
        ShapeSpec(
            kind="crescent", center=(3.0, 0.0), scale=1.0,
            arc_start=0.0, arc_span=math.pi, count=100, noise_sd=0.002,
        ),
        ShapeSpec(
            kind="crescent", center=(4.0, 0.5), scale=1.0,
            arc_start=math.pi, arc_span=math.pi, count=100, noise_sd=0.002,
        ),
    ),
    similarity="knn:3",
    description="concentric rings and two interleaved moons; ideal only under 3-NN",
)

# noisy:<i> for i = 1..8 scales the base jitter by 1 + NOISE_LEVELS[i - 1]
NOISE_LEVELS: Tuple[float, ...] = (0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
NOISY_BASE: Tuple[ShapeSpec, ...] = tuple(
    spec.model_copy(update={"noise_sd": 0.02}) for spec in IDEAL_B.shapes
)
NOISY_SIMILARITY = "gaussian:0.2"

PRESETS: Dict[str, Preset] = {p.name: p for p in (IDEAL_A, IDEAL_B, IDEAL_C)}


def preset_names() -> List[str]:
    return list(PRESETS) + [f"noisy:{i}" for i in range(1, len(NOISE_LEVELS) + 1)]


def resolve(name: str) -> Preset:
    """Preset by name, including noisy:<i> ladder entries"""
    if name in PRESETS:
        return PRESETS[name]
    if name.startswith("noisy:"):
        try:
            index = int(name.split(":", 1)[1])
        except ValueError:
            index = 0
        if 1 <= index <= len(NOISE_LEVELS):
            factor = 1.0 + NOISE_LEVELS[index - 1]
            shapes = tuple(
                spec.model_copy(update={"noise_sd": spec.noise_sd * factor})
                for spec in NOISY_BASE
            )
            return Preset(
                name=name,
                shapes=shapes,
                similarity=NOISY_SIMILARITY,
                description=f"five-cluster layout, noise level {index} of {len(NOISE_LEVELS)}",
            )
    raise InvalidParameter(
        f"unknown preset {name!r}; choose from {', '.join(preset_names())}", "datagen"
    )


def load(name: str, seed: int, size_scale: float = 1.0) -> DataSet:
    """Generate the named preset"""
    return generate(resolve(name).scaled(size_scale), seed)


def ladder(seed: int, size_scale: float = 1.0) -> List[DataSet]:
    """All eight noisy data sets, drawn from one seed"""
    base = Preset("noisy", NOISY_BASE, NOISY_SIMILARITY, "").scaled(size_scale)
    return noise_ladder(base, NOISE_LEVELS, seed)
