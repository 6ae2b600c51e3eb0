from pathlib import Path
from typing import List, Optional, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from rounding.graph import DataSet  # noqa: E402
from rounding.partition import Partition  # noqa: E402
from rounding.spectra import EigenSystem  # noqa: E402
from utils.logger import logger  # noqa: E402

# ============================================================================
# SVG PLOTS
# ============================================================================
# Static figures for inspecting a clustering run: a scatter coloured by
# cluster and, per eigenvector, a colour map over the points next to the
# values plotted against point index.

plt.rcParams.update(
    {
        "figure.figsize": (9, 4),
        "axes.labelsize": 10,
        "xtick.labelsize": 8,
        "ytick.labelsize": 8,
        "svg.hashsalt": "specround",
    }
)

# drops the creation date so identical runs give identical files
SVG_METADATA = {"Date": None}


def _xy(data: DataSet) -> np.ndarray:
    if data.d >= 2:
        return data.points[:, :2]
    return np.column_stack([data.points[:, 0], np.zeros(data.n)])


def _save(fig: plt.Figure, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info(f"wrote {path}")


def plot_clusters(path: Path, data: DataSet, partition: Partition) -> None:
    xy = _xy(data)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.scatter(xy[:, 0], xy[:, 1], c=partition.assignment, cmap="tab20", s=6)
    ax.set_title(f"{partition.k} clusters")
    ax.set_aspect("equal", adjustable="datalim")
    _save(fig, path)


def plot_eigenvector(path: Path, values: np.ndarray, j: int, data: Optional[DataSet]) -> None:
    """Two panels: values as colours over the points, values against index

    Without coordinates only the index panel is drawn.
    """
    if data is None:
        fig, index_ax = plt.subplots(figsize=(5, 4))
    else:
        fig, (map_ax, index_ax) = plt.subplots(1, 2)
        xy = _xy(data)
        image = map_ax.scatter(xy[:, 0], xy[:, 1], c=values, cmap="coolwarm", s=6)
        map_ax.set_aspect("equal", adjustable="datalim")
        fig.colorbar(image, ax=map_ax)
    index_ax.plot(np.arange(values.size), values, ".", markersize=2)
    index_ax.axhline(0.0, color="grey", linewidth=0.5)
    index_ax.set_xlabel("point index")
    index_ax.set_ylabel(f"e{j + 1}")
    fig.suptitle(f"eigenvector {j + 1}")
    _save(fig, path)


def write_run_plots(
    directory: Union[str, Path],
    data: Optional[DataSet],
    partition: Partition,
    eigs: EigenSystem,
    vectors: int,
) -> List[Path]:
    """Write clusters.svg and eigenvector_<j>.svg for the first `vectors` eigenvectors

    Returns:
        Paths of the files written
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    if data is None:
        logger.warning("input has no point coordinates; skipping the cluster scatter plot")
    else:
        plot_clusters(directory / "clusters.svg", data, partition)
        written.append(directory / "clusters.svg")
    for j in range(min(vectors, eigs.K)):
        path = directory / f"eigenvector_{j + 1}.svg"
        plot_eigenvector(path, eigs.vector(j), j, data)
        written.append(path)
    return written
