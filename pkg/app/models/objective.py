"""
Objective module.

The D-optimality objective f = det(Σ a_i a_iᵀ)^{1/m} for integral and
fractional designs.
"""
from typing import Sequence

import numpy as np

from app.core.exceptions import DimensionError, InvalidIndex, InvalidParams, ModeViolation
from app.models.instance import Instance, Mode
from app.utils.linalg import determinant, gram_array, log_det


def _check_members(inst: Instance, members: Sequence[int]) -> np.ndarray:
    idx = np.asarray([int(i) for i in members], dtype=int)
    if idx.size and (idx.min() < 0 or idx.max() >= inst.n):
        bad = int(idx[(idx < 0) | (idx >= inst.n)][0])
        raise InvalidIndex(f"experiment index {bad} outside [0, {inst.n})")
    if inst.mode is Mode.WITHOUT_REPS and np.unique(idx).size != idx.size:
        raise ModeViolation("duplicate experiments are not allowed without repetitions")
    return idx


def member_counts(inst: Instance, members: Sequence[int]) -> np.ndarray:
    """
    Multiplicity vector of a design: entry i counts the copies of experiment i.

    Raises:
        InvalidIndex: If an index is outside [0, n)
        ModeViolation: If an index repeats without repetitions
    """
    return np.bincount(_check_members(inst, members), minlength=inst.n).astype(float)


def design_determinant(inst: Instance, members: Sequence[int]) -> float:
    """det(Σ_{i∈members} a_i a_iᵀ), exactly 0 below the pivot cutoff."""
    counts = member_counts(inst, members)
    return max(float(determinant(gram_array(inst.matrix, counts))), 0.0)


def objective_of_design(inst: Instance, members: Sequence[int]) -> float:
    """
    f(S) = det(Σ_{i∈S} a_i a_iᵀ)^{1/m}.

    Parameters:
        inst: Problem instance
        members: Experiment indices, repeated only with repetitions

    Returns:
        Nonnegative objective, exactly 0 on a singular Gram sum

    Raises:
        InvalidIndex: If an index is outside [0, n)
        ModeViolation: If an index repeats without repetitions
    """
    counts = member_counts(inst, members)
    return _root_det(inst, counts)


def objective_of_weights(inst: Instance, x: Sequence[float]) -> float:
    """
    f(x) = det(Σ x_i a_i a_iᵀ)^{1/m} for a nonnegative weight vector.

    Raises:
        DimensionError: If x does not have length n
        InvalidParams: If some weight is negative
    """
    x = np.asarray(x, dtype=float)
    if x.shape != (inst.n,):
        raise DimensionError(f"expected {inst.n} weights, got shape {x.shape}")
    if np.any(x < 0):
        raise InvalidParams("weights must be nonnegative")
    return _root_det(inst, x)


def _root_det(inst: Instance, x: np.ndarray) -> float:
    # exp(log det / m) keeps large determinants in range
    value = log_det(gram_array(inst.matrix, x))
    return float(np.exp(value / inst.m)) if np.isfinite(value) else 0.0
