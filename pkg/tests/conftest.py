"""Shared fixtures for omega-combing tests."""

from __future__ import annotations

import numpy as np
import pytest

from omega_combing.combing import default_basepoint
from omega_combing.config import RunConfig
from omega_combing.omega_model import ModelParams, scene_enumerate

MOCK_SEED = 20240611


@pytest.fixture(scope="session")
def params2() -> ModelParams:
    return ModelParams(2)


@pytest.fixture(scope="session")
def params3() -> ModelParams:
    return ModelParams(3)


@pytest.fixture(scope="session")
def scene0(params2):
    """sigma_inf alone."""
    return scene_enumerate(params2, 0)


@pytest.fixture(scope="session")
def scene1(params2):
    return scene_enumerate(params2, 1)


@pytest.fixture(scope="session")
def scene3(params2):
    return scene_enumerate(params2, 3)


@pytest.fixture(scope="session")
def scene4(params2):
    return scene_enumerate(params2, 4)


@pytest.fixture(scope="session")
def scene3_p3(params3):
    return scene_enumerate(params3, 3)


@pytest.fixture
def basepoint(params2):
    return default_basepoint(params2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(MOCK_SEED)


@pytest.fixture
def run_config(tmp_path) -> RunConfig:
    """A small config writing into a temporary directory."""
    return RunConfig.from_mapping({"p": 2, "radius": 1, "out": str(tmp_path), "workers": 2})
