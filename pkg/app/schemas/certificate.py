"""
Certificate schema module.

Rounding schemes and the approximation guarantees attached to a run.
"""
import math
from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.core.exceptions import InvalidParams
from app.models.instance import Mode

INV_E = 1.0 / math.e


class Scheme(str, Enum):
    """Rounding scheme."""
    PROPORTIONAL = "proportional"
    ASYMPTOTIC = "asymptotic"
    REPETITIONS = "repetitions"

    @property
    def mode(self) -> Mode:
        """Repetition mode the scheme runs in."""
        return Mode.WITH_REPS if self is Scheme.REPETITIONS else Mode.WITHOUT_REPS


class Method(str, Enum):
    """Randomized sampling or its derandomized greedy counterpart."""
    SAMPLE = "sample"
    DERAND = "derand"


def parse_scheme_name(name: str) -> tuple[Method, Scheme]:
    """
    Split a CLI scheme name such as "derand-proportional".

    Raises:
        InvalidParams: If either half is unknown
    """
    method, _, scheme = name.strip().lower().partition("-")
    try:
        return Method(method), Scheme(scheme)
    except ValueError:
        choices = ", ".join(scheme_names())
        raise InvalidParams(f"unknown scheme {name!r}; choose one of {choices}")


def scheme_names() -> list[str]:
    return [f"{method.value}-{scheme.value}" for method in Method for scheme in Scheme]


class ApproximationCertificate(BaseModel):
    """
    Guaranteed ratio f(S) >= alpha * relaxation value for a scheme.

    threshold is the budget from which the scheme's (1 - eps) or
    (0.5 - eps) regime applies; floor is the ratio that regime guarantees.
    """
    scheme: Scheme
    alpha: float = Field(ge=0.0, le=1.0)
    m: int
    k: int
    n: Optional[int] = None
    eps: Optional[float] = None
    threshold: Optional[int] = None
    threshold_met: Optional[bool] = None
    floor: Optional[float] = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_alpha(self) -> "ApproximationCertificate":
        if self.scheme is Scheme.PROPORTIONAL and self.alpha < INV_E - 1e-12:
            raise InvalidParams(f"proportional certificate below 1/e: {self.alpha!r}")
        if self.scheme is not Scheme.ASYMPTOTIC and self.alpha <= 0.0:
            raise InvalidParams("certificate alpha must be positive")
        return self

    @property
    def guaranteed(self) -> float:
        """Best ratio the certificate promises: alpha, or the regime floor when it applies."""
        if self.threshold_met and self.floor is not None:
            return max(self.alpha, self.floor)
        return self.alpha
