"""Shared pytest fixtures available to all test modules."""

import pytest

from tests.helpers import make_model, noise, tiny_config


@pytest.fixture
def tiny_cfg():
    return tiny_config("full")


@pytest.fixture
def fast_cfg():
    return tiny_config("fast")


@pytest.fixture(scope="session")
def tiny_model():
    return make_model(tiny_config("full"), seed=0)


@pytest.fixture(scope="session")
def fast_model():
    return make_model(tiny_config("fast"), seed=0)


@pytest.fixture
def reference_audio():
    # 0.5 s, 25 mel frames
    return noise(8000, seed=101)


@pytest.fixture
def source_audio():
    return noise(16000 + 123, seed=202)
