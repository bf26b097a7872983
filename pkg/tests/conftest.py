import numpy as np
import pytest

from fraclimit import CollisionContext, build_grid, constant_sigma, perturbed_sigma


@pytest.fixture(scope="session")
def grid128():
    return build_grid(128, 200.0)


@pytest.fixture(scope="session")
def ctx15(grid128):
    return CollisionContext(grid128, constant_sigma(1.0), 1.5)


@pytest.fixture(scope="session")
def ctx1(grid128):
    return CollisionContext(grid128, constant_sigma(1.0), 1.0)


@pytest.fixture(scope="session")
def ctx15p(grid128):
    return CollisionContext(grid128, perturbed_sigma(1.0, 0.5), 1.5)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
