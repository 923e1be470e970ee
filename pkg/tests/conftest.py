import numpy as np
import pytest

from complementary_mubs.constructions import (
    build_ab_decomposition,
    build_galois_decomposition,
    find_galois_subgroup,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def galois():
    """Builder for Galois decompositions, memoized across the session."""
    built = {}

    def build(p):
        if p not in built:
            built[p] = build_galois_decomposition(p, find_galois_subgroup(p))
        return built[p]

    return build


@pytest.fixture(scope="session")
def ab():
    built = {}

    def build(p):
        if p not in built:
            built[p] = build_ab_decomposition(p)
        return built[p]

    return build
