import numpy as np
import pytest

from fingerkit.config import FingerConfig, default_config
from fingerkit.registry import ReferenceRegistry, default_registry


@pytest.fixture(scope="session")
def cfg() -> FingerConfig:
    return default_config()


@pytest.fixture(scope="session")
def geometry(cfg):
    return cfg.geometry


@pytest.fixture(scope="session")
def finger(cfg):
    return cfg.require_finger()


@pytest.fixture(scope="session")
def tendon(cfg):
    return cfg.require_tendon()


@pytest.fixture(scope="session")
def thumb_line(cfg):
    return cfg.require_thumb_line()


@pytest.fixture(scope="session")
def registry() -> ReferenceRegistry:
    return default_registry()


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(987654321)
