"""Shared fixtures: small ideal-case data sets and their eigensystems."""

import logging

import numpy as np
import pytest

from config.settings import settings
from datasets.generator import generate
from models.schemas import ShapeSpec
from rounding.graph import DataSet, knn_similarity, laplacian_rw
from rounding.spectra import EigenSystem, leading_eigenpairs
from utils.logger import logger


def blobs(counts, spacing=10.0, scale=0.1):
    """Gaussian blobs on a line, far enough apart to be disconnected under k-NN"""
    return [
        ShapeSpec(kind="gaussian_blob", center=(spacing * i, 0.0), scale=scale, count=c)
        for i, c in enumerate(counts)
    ]


@pytest.fixture(autouse=True)
def restore_settings():
    """Commands write tunables into the settings singleton; undo that per test"""
    saved = settings.model_dump()
    yield
    for name, value in saved.items():
        setattr(settings, name, value)


@pytest.fixture(autouse=True)
def reset_logger():
    """CLI tests attach handlers bound to the captured stderr of that test"""
    yield
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
    logger.setLevel(logging.NOTSET)
    logger.propagate = True


@pytest.fixture(scope="session")
def three_blobs() -> DataSet:
    return generate(blobs([20, 25, 15]), seed=7)


@pytest.fixture(scope="session")
def three_blob_eigs(three_blobs) -> EigenSystem:
    return leading_eigenpairs(laplacian_rw(knn_similarity(three_blobs, 7)), 12)


@pytest.fixture(scope="session")
def two_blobs() -> DataSet:
    return generate(blobs([20, 20]), seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def captured(caplog):
    """caplog wired to the application logger, which does not propagate once configured"""
    logger.addHandler(caplog.handler)
    yield caplog
    logger.removeHandler(caplog.handler)
