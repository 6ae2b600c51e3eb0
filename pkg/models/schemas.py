import math
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

# ============================================================================
# SCHEMA MODELS
# ============================================================================
# This file defines every JSON-facing data model of the application.
# Numerical objects (matrices, eigensystems, fitted models) stay numpy-backed
# dataclasses in rounding/; these models are what gets written to and read
# from disk by cli/ and datasets/. Field order is the serialized order.


class ShapeSpec(BaseModel):
    """One synthetic cluster shape

    Used in: datasets/generator.py and datasets/presets.py

    Fields:
        kind: gaussian_blob, ring or crescent
        center: 2D centre of the shape
        scale: Blob standard deviation, or ring / crescent radius
        arc_start: Start angle of the arc in radians (ring, crescent)
        arc_span: Angular extent in radians; 2*pi for a full ring
        width: Radial thickness of a ring or crescent band
        count: Number of points
        noise_sd: Standard deviation of the isotropic Gaussian jitter
    """

    model_config = ConfigDict(frozen=True)

    kind: Literal["gaussian_blob", "ring", "crescent"]
    center: Tuple[float, float] = (0.0, 0.0)
    scale: float = 1.0
    arc_start: float = 0.0
    arc_span: float = 3.141592653589793
    width: float = 0.0
    count: int = Field(default=100, ge=1)
    noise_sd: float = Field(default=0.0, ge=0.0)

    @field_validator("center", "scale", "arc_start", "arc_span", "width")
    @classmethod
    def _finite(cls, value: Any) -> Any:
        values = value if isinstance(value, tuple) else (value,)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("shape parameters must be finite")
        return value


class MetricReport(BaseModel):
    """Comparison of an obtained partition with the true partition

    Used in: rounding/metrics.py, cli `eval` and `cluster`

    Fields:
        rand_index: Fraction of agreeing point pairs, in [0, 1]
        vi: Variation of information in nats, >= 0
        k_found: Number of clusters in the obtained partition
        k_true: Number of true clusters
    """

    rand_index: float = Field(ge=0.0, le=1.0)
    vi: float = Field(ge=0.0)
    k_found: int
    k_true: int


class TraceRecord(BaseModel):
    """Per-q scores of LTM rounding

    Fields:
        q: Number of leading eigenvectors used by the primary part
        k: Clusters in the hard partition at this q
        lcm_bic: BIC of the BIC-selected latent class model
        ltm_bic: BIC of the extended latent tree model (null if unscored)
    """

    q: int
    k: int
    lcm_bic: float
    ltm_bic: Optional[float] = None


class ClusterParams(BaseModel):
    """Parameters of one clustering run

    Fields mirror the cluster subcommand flags; similarity is "knn:<k>",
    "gaussian:<sigma>" or "precomputed".
    """

    similarity: str
    K: Optional[int] = None
    delta: Optional[float] = None
    k: Optional[int] = None
    seed: int
    restarts: int


class ClusterResult(BaseModel):
    """JSON result of the cluster subcommand

    Used in: cli/commands.py (written with --out and embedded in RunRecord)
    """

    method: Literal["ltm", "naive", "kmeans"]
    params: ClusterParams
    q: Optional[int] = None
    k: int
    assignment: List[int]
    bic_trace: List[TraceRecord] = Field(default_factory=list)
    metrics: Optional[MetricReport] = None


class ClusterJob(BaseModel):
    """Fully resolved parameters of one clustering run

    Used in: cli/commands.py (built from flags) and cli/records.py (stored
    as RunRecord.parameters and re-validated on replay)

    Fields:
        source_kind: points, similarity or preset
        source: Input file path or preset name
        data_seed: Generator seed for preset inputs
        size_scale: Point-count multiplier for preset inputs
        has_labels: Label column flag for point files (None: detect)
        similarity_fn: "knn:<k>", "gaussian:<sigma>" or "precomputed"
        method: ltm, naive or kmeans
        K: Number of leading eigenpairs computed
        delta: Binarization confidence
        k: Cluster count for k-means
        restarts: EM / k-means restarts
        seed: Seed of the rounding method
        tunables: Settings values that influence the result
    """

    source_kind: Literal["points", "similarity", "preset"]
    source: str
    data_seed: int = 0
    size_scale: float = 1.0
    has_labels: Optional[bool] = None
    similarity_fn: str
    method: Literal["ltm", "naive", "kmeans"]
    K: int
    delta: float
    k: Optional[int] = None
    restarts: int
    seed: int
    tunables: Dict[str, Any] = Field(default_factory=dict)


class InputRef(BaseModel):
    """An input file together with its content hash"""

    path: str
    kind: Literal["points", "similarity", "preset"]
    sha256: str
    has_labels: Optional[bool] = None


class RunRecord(BaseModel):
    """Everything needed to reproduce and audit one clustering run

    Used in: cli/records.py (written with --record, read by replay)
    """

    inputs: List[InputRef]
    parameters: Dict[str, Any]
    outputs: ClusterResult
    metrics: Optional[MetricReport] = None
    duration_seconds: float


class SweepRow(BaseModel):
    """One row of a sensitivity sweep table"""

    axis: str
    value: float
    seed: int
    rand_index: float
    vi: float
    q: Optional[int] = None
    k: int
    bic: Optional[float] = None
