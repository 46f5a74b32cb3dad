"""
Instance module.

Defines the problem instance: n experiment vectors in R^m, a budget k and
whether an experiment may be chosen more than once.
"""
from enum import Enum
from typing import Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, PrivateAttr

from app.core.config import MODE_WITH_REPS, MODE_WITHOUT_REPS
from app.core.exceptions import DimensionError, InfeasibleRank, InvalidParams
from app.utils.linalg import matrix_rank


class Mode(str, Enum):
    """Repetition mode: designs are sets or multisets."""
    WITHOUT_REPS = MODE_WITHOUT_REPS
    WITH_REPS = MODE_WITH_REPS


class Instance(BaseModel):
    """
    D-optimal design instance.

    Invariants checked at construction: n >= k >= m >= 1, every vector has
    m finite entries, and the n x m vector matrix has rank m.
    """
    m: int
    n: int
    k: int
    mode: Mode = Mode.WITHOUT_REPS
    vectors: tuple[tuple[float, ...], ...]

    model_config = ConfigDict(frozen=True)

    _matrix: np.ndarray = PrivateAttr()

    def model_post_init(self, __context) -> None:
        if not (self.n >= self.k >= self.m >= 1):
            raise InvalidParams(f"need n >= k >= m >= 1, got n={self.n}, k={self.k}, m={self.m}")
        if len(self.vectors) != self.n:
            raise DimensionError(f"expected {self.n} vectors, got {len(self.vectors)}")
        if any(len(v) != self.m for v in self.vectors):
            raise DimensionError(f"every vector must have exactly {self.m} entries")
        matrix = np.array(self.vectors, dtype=float).reshape(self.n, self.m)
        if not np.all(np.isfinite(matrix)):
            raise DimensionError("vector entries must be finite")
        if matrix_rank(matrix) < self.m:
            raise InfeasibleRank(f"the {self.n} vectors do not span R^{self.m}")
        matrix.setflags(write=False)
        self._matrix = matrix

    def __eq__(self, other: object) -> bool:
        # Field-wise only; the cached matrix is derived state.
        if not isinstance(other, Instance):
            return NotImplemented
        return self._key() == other._key()

    def _key(self) -> tuple:
        return (self.m, self.n, self.k, self.mode, self.vectors)

    def __hash__(self) -> int:
        return hash(self._key())

    @property
    def matrix(self) -> np.ndarray:
        """Read-only n x m array whose rows are the vectors a_i."""
        return self._matrix

    @property
    def with_repetitions(self) -> bool:
        return self.mode is Mode.WITH_REPS

    @classmethod
    def from_vectors(cls, vectors: Sequence[Sequence[float]], k: int, mode: Mode = Mode.WITHOUT_REPS) -> "Instance":
        """
        Build an instance, inferring n and m from the vectors.

        Parameters:
            vectors: n rows of m reals
            k: Budget
            mode: Repetition mode

        Returns:
            Validated Instance
        """
        rows = tuple(tuple(float(v) for v in row) for row in vectors)
        m = len(rows[0]) if rows else 0
        return cls(m=m, n=len(rows), k=k, mode=mode, vectors=rows)

    def with_mode(self, mode: Mode) -> "Instance":
        """Same vectors and budget under another repetition mode."""
        return self.model_copy(update={"mode": mode})

    def replicated(self) -> "Instance":
        """
        Without-repetitions instance holding k copies of every vector.

        Copy c of vector i gets index i * k + c; a set design of the copy
        instance maps back to a multiset design of this one.
        """
        rows = tuple(row for row in self.vectors for _ in range(self.k))
        return Instance(m=self.m, n=self.n * self.k, k=self.k, mode=Mode.WITHOUT_REPS, vectors=rows)
