"""Shared fixtures: the critical bundle is expensive enough to solve once."""

import numpy as np
import pytest

from bn6.bubbles import DomainBall
from bn6.critical import critical_bundle


@pytest.fixture(scope="session")
def ball():
    return DomainBall(1.0)


@pytest.fixture(scope="session")
def bundle(ball):
    """Full critical-data pipeline at default resolution."""
    return critical_bundle(ball, n=4096, ell_max=10, count_per_sector=3)


@pytest.fixture(scope="session")
def gs(bundle):
    return bundle.gs


@pytest.fixture(scope="session")
def v0(bundle):
    return bundle.v0


@pytest.fixture(scope="session")
def constants(bundle):
    return bundle.constants


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
