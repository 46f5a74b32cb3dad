"""
Solver configuration schema.
"""
from pydantic import BaseModel, ConfigDict, Field

from app.core.settings import settings


class SolverConfig(BaseModel):
    """
    Frank-Wolfe settings for the continuous relaxation.

    Defaults come from the SOLVER_* settings. The solve is deterministic, so
    there is no seed.
    """
    max_iters: int = Field(default_factory=lambda: settings.SOLVER_MAX_ITERS, gt=0)
    rel_tol: float = Field(default_factory=lambda: settings.SOLVER_REL_TOL, gt=0)
    ridge: float = Field(default_factory=lambda: settings.SOLVER_RIDGE, ge=0)
    line_search: bool = Field(default_factory=lambda: settings.SOLVER_LINE_SEARCH)
    pairwise: bool = Field(default_factory=lambda: settings.SOLVER_PAIRWISE)
    bisection_steps: int = Field(default_factory=lambda: settings.SOLVER_BISECTION_STEPS, gt=0)

    model_config = ConfigDict(frozen=True)
