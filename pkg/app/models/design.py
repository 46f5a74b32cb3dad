"""
Design module.

Fractional and integral designs together with the conditional-expectation
record produced by the greedy derandomization loops.
"""
from collections import Counter
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from app.core.exceptions import DimensionError, InvalidParams, ModeViolation
from app.models.instance import Instance, Mode
from app.models.objective import objective_of_design, objective_of_weights

WEIGHT_SUM_REL_TOL = 1e-9
CAP_TOL = 1e-12


class FractionalDesign(BaseModel):
    """
    Feasible point of the continuous relaxation.

    weights sum to k, lie in [0, 1] without repetitions, and value is f(weights).
    The solver fields record how the point was obtained.

    The validator only sees the weights, so it checks sign and the box; the
    sum and the value need the instance. Build through from_weights() or
    indicator(), which enforce both; every caller in the package does.
    """
    weights: tuple[float, ...]
    value: float
    mode: Mode
    converged: bool = True
    iterations: int = 0
    gap: float = 0.0

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_box(self) -> "FractionalDesign":
        if any(w < -CAP_TOL for w in self.weights):
            raise InvalidParams("weights must be nonnegative")
        if self.mode is Mode.WITHOUT_REPS and any(w > 1.0 + CAP_TOL for w in self.weights):
            raise ModeViolation("weights above 1 are infeasible without repetitions")
        if self.value < 0:
            raise InvalidParams("relaxation value must be nonnegative")
        return self

    @property
    def x(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    @property
    def budget(self) -> int:
        return int(round(sum(self.weights)))

    @classmethod
    def from_weights(cls, inst: Instance, weights: Sequence[float], **solver_fields) -> "FractionalDesign":
        """
        Validate weights against an instance and attach f(weights).

        Raises:
            DimensionError: If the length differs from n
            InvalidParams: If the weights do not sum to k
        """
        x = np.clip(np.asarray(weights, dtype=float), 0.0, None)
        if x.shape != (inst.n,):
            raise DimensionError(f"expected {inst.n} weights, got shape {x.shape}")
        if abs(x.sum() - inst.k) > WEIGHT_SUM_REL_TOL * inst.k:
            raise InvalidParams(f"weights sum to {x.sum()!r}, expected {inst.k}")
        if inst.mode is Mode.WITHOUT_REPS:
            x = np.minimum(x, 1.0)
        return cls(
            weights=tuple(float(w) for w in x),
            value=objective_of_weights(inst, x),
            mode=inst.mode,
            **solver_fields,
        )

    @classmethod
    def indicator(cls, inst: Instance, members: Sequence[int]) -> "FractionalDesign":
        """The integral point 1_S (with multiplicities) of a design S."""
        x = np.zeros(inst.n)
        for i in members:
            x[i] += 1.0
        return cls.from_weights(inst, x)


class Design(BaseModel):
    """
    Integral design: k experiment indices, sorted, with objective f(S).
    """
    members: tuple[int, ...]
    value: float
    mode: Mode

    model_config = ConfigDict(frozen=True)

    @field_validator("members")
    @classmethod
    def _sorted(cls, members: tuple[int, ...]) -> tuple[int, ...]:
        return tuple(sorted(members))

    @model_validator(mode="after")
    def _check_mode(self) -> "Design":
        if self.mode is Mode.WITHOUT_REPS and len(set(self.members)) != len(self.members):
            raise ModeViolation("duplicate experiments in a without-repetitions design")
        return self

    @classmethod
    def build(cls, inst: Instance, members: Sequence[int]) -> "Design":
        """
        Design of size k with its objective recomputed from scratch.

        Raises:
            DimensionError: If the design does not have exactly k members
        """
        members = tuple(int(i) for i in members)
        if len(members) != inst.k:
            raise DimensionError(f"a design needs exactly {inst.k} members, got {len(members)}")
        return cls(members=members, value=objective_of_design(inst, members), mode=inst.mode)

    def multiplicity(self) -> Counter:
        """M_S(i): how many times each experiment appears."""
        return Counter(self.members)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.members)))


class ConditionalExpectation(BaseModel):
    """
    H(S): expected det(Σ a_i a_iᵀ) over the rounding law given the partial design S.
    """
    base_set: tuple[int, ...]
    value: float

    model_config = ConfigDict(frozen=True)

    @field_validator("value")
    @classmethod
    def _finite_nonnegative(cls, value: float) -> float:
        if not np.isfinite(value):
            raise InvalidParams("conditional expectation must be finite")
        return max(value, 0.0)
