"""
Test configuration and fixtures.

Provides the canonical instances, a seeded random instance factory and the
testing settings shared by all tests.
"""
import os

os.environ.setdefault("APP_ENV", "testing")

from pathlib import Path

import numpy as np
import pytest

from app.models.design import FractionalDesign
from app.models.instance import Instance, Mode
from app.services.generator import Family, generate_instance, random_weights
from app.utils.rng import make_rng

REPO_ROOT = Path(__file__).resolve().parents[2]
SAMPLE_DIR = REPO_ROOT / "sample_instances"


@pytest.fixture
def basis_instance():
    """e_1, e_2, e_3 with n = m = k = 3."""
    return Instance.from_vectors(np.eye(3).tolist(), k=3)


@pytest.fixture
def symmetric_instance():
    """(1,0), (0,1), (1,1) with k = 2; every pair has determinant 1."""
    return Instance.from_vectors([[1, 0], [0, 1], [1, 1]], k=2)


@pytest.fixture
def symmetric_reps_instance(symmetric_instance):
    """The symmetric instance with repetitions allowed."""
    return symmetric_instance.with_mode(Mode.WITH_REPS)


@pytest.fixture
def duplicated_basis_instance():
    """e_1, e_2, e_1, e_2 with k = 2."""
    return Instance.from_vectors([[1, 0], [0, 1], [1, 0], [0, 1]], k=2)


@pytest.fixture
def two_point_reps_instance():
    """e_1, e_2 with k = 2 and repetitions; x̂ = (1, 1) is optimal."""
    return Instance.from_vectors([[1, 0], [0, 1]], k=2, mode=Mode.WITH_REPS)


@pytest.fixture
def uniform_symmetric_design(symmetric_instance):
    """x̂ = (2/3, 2/3, 2/3) on the symmetric instance."""
    return FractionalDesign.from_weights(symmetric_instance, [2 / 3, 2 / 3, 2 / 3])


@pytest.fixture
def skewed_symmetric_design(symmetric_instance):
    """x̂ = (1, 0.5, 0.5) on the symmetric instance."""
    return FractionalDesign.from_weights(symmetric_instance, [1.0, 0.5, 0.5])


@pytest.fixture
def sample_dir():
    """Directory holding the canonical instance files."""
    return SAMPLE_DIR


@pytest.fixture
def random_instance():
    """
    Factory for seeded Gaussian instances.

    Usage:
        inst = random_instance(m=2, n=5, k=3, seed=7)
    """

    def _make(m: int, n: int, k: int, seed: int, mode: Mode = Mode.WITHOUT_REPS, family: Family = Family.GAUSSIAN):
        return generate_instance(m, n, k, mode, family, seed)

    return _make


@pytest.fixture
def random_design():
    """Factory for a random feasible fractional design of an instance."""

    def _make(inst: Instance, seed: int) -> FractionalDesign:
        return FractionalDesign.from_weights(inst, random_weights(inst.n, inst.k, inst.mode, make_rng(seed)))

    return _make
