from app.services.relaxation import solve_relaxation, linear_maximization_oracle
from app.services.sampling import (
    sample_proportional,
    sample_bernoulli_fill,
    sample_with_repetitions,
    sample_expanded,
    empirical_law
)
from app.services.derand import (
    cond_exp_proportional,
    cond_exp_asymptotic,
    cond_exp_repetitions,
    cond_exp_expanded,
    derandomize_proportional,
    derandomize_asymptotic,
    derandomize_repetitions
)
from app.services.rounding_service import RoundingService
from app.services.verification_service import VerificationService

__all__ = [
    "solve_relaxation",
    "linear_maximization_oracle",
    "sample_proportional",
    "sample_bernoulli_fill",
    "sample_with_repetitions",
    "sample_expanded",
    "empirical_law",
    "cond_exp_proportional",
    "cond_exp_asymptotic",
    "cond_exp_repetitions",
    "cond_exp_expanded",
    "derandomize_proportional",
    "derandomize_asymptotic",
    "derandomize_repetitions",
    "RoundingService",
    "VerificationService"
]
