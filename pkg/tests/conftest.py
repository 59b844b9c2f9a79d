from __future__ import annotations

import numpy as np
import pytest

from snakecharmer import presets


@pytest.fixture(scope="session")
def half_circle():
    return presets.half_circle_configuration()


@pytest.fixture(scope="session")
def full_circle():
    return presets.full_circle_configuration()


@pytest.fixture(scope="session")
def tent():
    return presets.tent_bivalued()


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
