"""
Exact law schema.

A finite distribution over designs as produced by the oracle enumerations.
"""
import math
from enum import Enum
from typing import Optional, Sequence

from pydantic import BaseModel, ConfigDict, PrivateAttr, model_validator

from app.core.exceptions import InvalidParams

PROB_SUM_TOL = 1e-12


class Conditioning(str, Enum):
    """
    How a partial design S is conditioned on.

    CONTAINMENT: S is a subset of the outcome (set laws).
    PREFIX: the first |S| categorical draws are S (multinomial laws); the
    remaining draws stay independent with probabilities draw_probs.
    """
    CONTAINMENT = "containment"
    PREFIX = "prefix"


class ExactLaw(BaseModel):
    """
    Distribution over sorted member tuples.

    Invariants: probs >= 0 and Σ probs = 1 within 1e-12.
    """
    support: tuple[tuple[int, ...], ...]
    probs: tuple[float, ...]
    conditioning: Conditioning = Conditioning.CONTAINMENT
    draw_probs: Optional[tuple[float, ...]] = None

    model_config = ConfigDict(frozen=True)

    _index: dict = PrivateAttr()

    @model_validator(mode="after")
    def _check_distribution(self) -> "ExactLaw":
        if len(self.support) != len(self.probs):
            raise InvalidParams("support and probs differ in length")
        if any(p < 0 for p in self.probs):
            raise InvalidParams("probabilities must be nonnegative")
        if abs(math.fsum(self.probs) - 1.0) > PROB_SUM_TOL:
            raise InvalidParams(f"probabilities sum to {math.fsum(self.probs)!r}")
        if self.conditioning is Conditioning.PREFIX and self.draw_probs is None:
            raise InvalidParams("prefix conditioning needs the per-draw probabilities")
        return self

    def model_post_init(self, __context) -> None:
        self._index = {members: p for members, p in zip(self.support, self.probs)}

    @classmethod
    def from_weights(cls, table: dict, **fields) -> "ExactLaw":
        """
        Normalize a {members: weight} table into a law.

        Outcomes of zero weight are dropped; support is sorted lexicographically.
        """
        total = math.fsum(table.values())
        if not total > 0:
            raise InvalidParams("a law needs positive total weight")
        items = sorted((tuple(sorted(s)), w / total) for s, w in table.items() if w > 0)
        return cls(support=tuple(s for s, _ in items), probs=tuple(p for _, p in items), **fields)

    def probability(self, members: Sequence[int]) -> float:
        """Pr[outcome = members]."""
        return self._index.get(tuple(sorted(members)), 0.0)

    def items(self):
        return zip(self.support, self.probs)
