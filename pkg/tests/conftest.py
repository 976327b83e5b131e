import os
import numpy as np
import pytest
from registration.geometry import PointSet, center, synthetic_point_set
from registration.qubo_builder import ReducedQubo
from samplers.exhaustive_sampler import ExhaustiveSampler

REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))


@pytest.fixture
def repo_root() -> str:
    return REPO_ROOT


@pytest.fixture
def spiral() -> PointSet:
    return synthetic_point_set("spiral", 91)


@pytest.fixture
def exhaustive_sampler() -> ExhaustiveSampler:
    return ExhaustiveSampler("exhaustive", {})


def random_centered(rng: np.random.Generator, n: int, dim: int) -> PointSet:
    centered, _ = center(PointSet(rng.standard_normal((n, dim))))
    return centered


def random_reduced(rng: np.random.Generator, size: int) -> ReducedQubo:
    A = rng.standard_normal((size, size))
    return ReducedQubo(
        Q=0.5 * (A + A.T),
        linear=rng.standard_normal(size),
        constant=float(rng.standard_normal()),
    )


def all_bitstrings(size: int) -> np.ndarray:
    """(2^size, size) bit matrix in lexicographic order."""
    states = np.arange(1 << size)[:, None]
    return ((states >> np.arange(size - 1, -1, -1)[None, :]) & 1).astype(np.int8)
