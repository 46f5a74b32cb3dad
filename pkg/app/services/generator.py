"""
Instance generator module.

Seeded instance families for the CLI, the verification suite and the tests.
"""
import logging
from enum import Enum

import numpy as np
from scipy.optimize import brentq

from app.core.exceptions import InvalidParams
from app.models.instance import Instance, Mode
from app.utils.rng import make_rng

logger = logging.getLogger(__name__)


class Family(str, Enum):
    """Instance families."""
    GAUSSIAN = "gaussian"
    CORRELATED = "correlated"
    DUPLICATED_BASIS = "duplicated-basis"


def _random_rotation(m: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed)."""
    Q, R = np.linalg.qr(rng.standard_normal((m, m)))
    return Q * np.sign(np.diag(R))


def generate_instance(m: int, n: int, k: int, mode: Mode, family: Family, seed: int) -> Instance:
    """
    Build an instance of the given family.

    gaussian: i.i.d. standard normal entries.
    correlated: gaussian rows mixed by a random rotation and scaled by diag(1, 1/2, ..., 1/m).
    duplicated-basis: e_1, ..., e_m repeated cyclically; the seed is unused.

    Raises:
        InvalidParams: If n >= k >= m >= 1 fails
    """
    if not (n >= k >= m >= 1):
        raise InvalidParams(f"need n >= k >= m >= 1, got n={n}, k={k}, m={m}")
    family = Family(family)
    if family is Family.DUPLICATED_BASIS:
        vectors = np.eye(m)[np.arange(n) % m]
    else:
        rng = make_rng(seed)
        vectors = rng.standard_normal((n, m))
        if family is Family.CORRELATED:
            vectors = vectors @ _random_rotation(m, rng) @ np.diag(1.0 / np.arange(1, m + 1))
    logger.debug(f"Generated {family.value} instance m={m}, n={n}, k={k}, seed={seed}")
    return Instance.from_vectors(vectors.tolist(), k, Mode(mode))


def random_weights(n: int, k: int, mode: Mode, rng: np.random.Generator) -> np.ndarray:
    """
    Random feasible point of the relaxation.

    Without repetitions: x_i = min(1, λu_i) for uniform u, with λ chosen so
    that Σx = k. With repetitions: k times a flat Dirichlet draw.
    """
    if mode is Mode.WITH_REPS:
        return k * rng.dirichlet(np.ones(n))
    if k == n:
        return np.ones(n)
    u = rng.uniform(0.05, 1.0, n)
    lam = brentq(lambda s: np.minimum(1.0, s * u).sum() - k, 0.0, 1.0 / u.min() + 1.0, xtol=1e-15)
    x = np.minimum(1.0, lam * u)
    return x * (k / x.sum())
