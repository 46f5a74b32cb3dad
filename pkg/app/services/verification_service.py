"""
Verification service module.

Randomized invariant suite behind the verify command. Every instance runs
the same fixed list of checks against the brute-force oracle, so the
summary holds num_instances x len(CHECKS) results. Failures carry the
instance seed for replay with generate_instance.
"""
import logging
import math
from itertools import combinations, combinations_with_replacement
from typing import Callable

import numpy as np

from app.core.exceptions import InvalidParams
from app.core.metrics import VERIFICATION_CHECKS_TOTAL
from app.core.settings import settings
from app.models.design import FractionalDesign
from app.models.instance import Instance, Mode
from app.models.objective import design_determinant
from app.schemas.report import VerificationSummary
from app.schemas.solver import SolverConfig
from app.services import oracle
from app.services.bounds import g_without_reps, with_reps_floor
from app.services.derand import (
    cond_exp_asymptotic,
    cond_exp_proportional,
    cond_exp_repetitions,
    derandomize_asymptotic,
    derandomize_proportional,
    derandomize_repetitions,
)
from app.services.generator import Family, generate_instance, random_weights
from app.services.relaxation import solve_relaxation
from app.services.sampling import sequential_law_proportional
from app.utils.rng import make_rng, trial_seed
from app.utils.time_utils import Stopwatch

logger = logging.getLogger(__name__)

CHECKS = (
    "cauchy_binet_set",
    "cauchy_binet_weighted",
    "sequential_law",
    "cond_exp_proportional",
    "cond_exp_asymptotic",
    "cond_exp_repetitions",
    "relaxation_dominance",
    "derand_proportional_floor",
    "derand_repetitions_floor",
    "martingale",
    "correlation_floor",
)

REL_TOL = 1e-8
FLOOR_TOL = 1e-6
MARTINGALE_TOL = 1e-9
LAW_TOL = 1e-12
VERIFY_EPS = 0.5


def _close(a: float, b: float, rel_tol: float = REL_TOL) -> bool:
    return math.isclose(a, b, rel_tol=rel_tol, abs_tol=rel_tol * 1e-3)


class VerificationService:
    """
    Service class for the randomized verification suite.
    """

    def __init__(self, max_n: int = 8, max_m: int = 3, max_k: int = 4, seed: int = 0, num_instances: int = 50):
        """
        Initialize the suite.

        Parameters:
            max_n: Largest instance size
            max_m: Largest dimension
            max_k: Largest budget
            seed: Base seed; instance i uses seed XOR i
            num_instances: Number of random instances
        """
        if not (1 <= max_m <= max_k <= max_n <= settings.EXACT_LAW_MAX_N):
            raise InvalidParams(
                f"need 1 <= max_m <= max_k <= max_n <= {settings.EXACT_LAW_MAX_N}, "
                f"got {max_m}, {max_k}, {max_n}"
            )
        self.max_n, self.max_m, self.max_k = max_n, max_m, max_k
        self.seed = seed
        self.num_instances = num_instances
        self.solver_config = SolverConfig()

    def draw_instance(self, instance_seed: int) -> Instance:
        """Random Gaussian instance of the suite, reproducible from its seed."""
        rng = make_rng(instance_seed)
        m = int(rng.integers(1, self.max_m + 1))
        n = int(rng.integers(m, self.max_n + 1))
        k = int(rng.integers(m, min(self.max_k, n) + 1))
        return generate_instance(m, n, k, Mode.WITHOUT_REPS, Family.GAUSSIAN, instance_seed)

    def run(self) -> VerificationSummary:
        """
        Run every check on every instance.

        Returns:
            VerificationSummary; summary.ok is False on any violation
        """
        summary = VerificationSummary(instances=self.num_instances, seed=self.seed)
        with Stopwatch() as sw:
            for i in range(self.num_instances):
                instance_seed = trial_seed(self.seed, i)
                inst = self.draw_instance(instance_seed)
                for name, passed, detail in self.check_instance(inst, instance_seed):
                    summary.record(name, passed, instance_seed, detail)
                    if settings.METRICS_ENABLED:
                        VERIFICATION_CHECKS_TOTAL.labels(check=name, status="pass" if passed else "fail").inc()
                    if not passed:
                        logger.error(f"Check {name} failed on instance seed {instance_seed}: {detail}")
        summary.seconds = sw.seconds
        logger.info(f"Verification finished: {summary.total_checks} checks, {len(summary.failures)} failures")
        return summary

    def check_instance(self, inst: Instance, instance_seed: int):
        """Yield (check name, passed, detail) for every check in CHECKS."""
        rng = make_rng(instance_seed ^ 0xA5A5)
        reps = inst.with_mode(Mode.WITH_REPS)
        x = FractionalDesign.from_weights(inst, random_weights(inst.n, inst.k, Mode.WITHOUT_REPS, rng))
        x_reps = FractionalDesign.from_weights(reps, random_weights(inst.n, inst.k, Mode.WITH_REPS, rng))
        frac = solve_relaxation(inst, self.solver_config)
        frac_reps = solve_relaxation(reps, self.solver_config)

        yield self._guard("cauchy_binet_set", lambda: self._cauchy_binet_set(inst))
        yield self._guard("cauchy_binet_weighted", lambda: self._cauchy_binet_weighted(inst, x.x))
        yield self._guard("sequential_law", lambda: self._sequential_law(x))
        yield self._guard("cond_exp_proportional", lambda: self._cond_exp_proportional(inst, x))
        yield self._guard("cond_exp_asymptotic", lambda: self._cond_exp_asymptotic(inst, x))
        yield self._guard("cond_exp_repetitions", lambda: self._cond_exp_repetitions(reps, x_reps))
        yield self._guard("relaxation_dominance", lambda: self._relaxation_dominance(inst, frac))
        yield self._guard("derand_proportional_floor", lambda: self._derand_proportional_floor(inst, frac))
        yield self._guard("derand_repetitions_floor", lambda: self._derand_repetitions_floor(reps, frac_reps))
        yield self._guard("martingale", lambda: self._martingale(inst, frac, reps, frac_reps))
        yield self._guard("correlation_floor", lambda: self._correlation_floor(inst, frac))

    @staticmethod
    def _guard(name: str, check: Callable[[], str]):
        try:
            detail = check()
        except Exception as exc:
            return name, False, f"{type(exc).__name__}: {exc}"
        return name, not detail, detail

    # Each check returns "" on success and a description of the violation otherwise.

    def _cauchy_binet_set(self, inst: Instance) -> str:
        T = list(range(min(inst.n, 8)))
        if len(T) < inst.m:
            return ""
        whole = design_determinant(inst, T)
        parts = math.fsum(design_determinant(inst, R) for R in combinations(T, inst.m))
        return "" if _close(whole, parts) else f"det(T)={whole!r} but Σ det(R)={parts!r}"

    def _cauchy_binet_weighted(self, inst: Instance, x: np.ndarray) -> str:
        A = inst.matrix
        whole = float(np.linalg.det((A.T * x) @ A))
        parts = math.fsum(
            float(np.prod(x[list(R)])) * design_determinant(inst, R) for R in combinations(range(inst.n), inst.m)
        )
        return "" if _close(whole, parts) else f"det(M(x))={whole!r} but Σ x^R det(R)={parts!r}"

    def _sequential_law(self, x: FractionalDesign) -> str:
        deviation = oracle.max_deviation(sequential_law_proportional(x), oracle.exact_law_proportional(x))
        return "" if deviation <= LAW_TOL else f"sequential law deviates by {deviation:.3e}"

    def _cond_exp_proportional(self, inst: Instance, x: FractionalDesign) -> str:
        law = oracle.exact_law_proportional(x)
        for size in range(inst.k + 1):
            for S in combinations(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                value = cond_exp_proportional(inst, x, S)
                if not _close(value, expected):
                    return f"H({S})={value!r}, exact {expected!r}"
        return ""

    def _cond_exp_asymptotic(self, inst: Instance, x: FractionalDesign) -> str:
        law = oracle.exact_law_bernoulli_conditioned(x, VERIFY_EPS, inst.k)
        for size in range(inst.k + 1):
            for S in combinations(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                value = cond_exp_asymptotic(inst, x, VERIFY_EPS, S)
                if not _close(value, expected):
                    return f"H({S})={value!r}, exact {expected!r}"
        return ""

    def _cond_exp_repetitions(self, inst: Instance, x: FractionalDesign) -> str:
        law = oracle.exact_law_multinomial(x, inst.k)
        for size in range(inst.k + 1):
            for S in combinations_with_replacement(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                value = cond_exp_repetitions(inst, x, S)
                if not _close(value, expected):
                    return f"H({S})={value!r}, exact {expected!r}"
        return ""

    def _relaxation_dominance(self, inst: Instance, frac: FractionalDesign) -> str:
        best = oracle.brute_force_optimum(inst)
        return "" if best.value <= frac.value + FLOOR_TOL else f"optimum {best.value!r} > relaxation {frac.value!r}"

    def _derand_proportional_floor(self, inst: Instance, frac: FractionalDesign) -> str:
        design = derandomize_proportional(inst, frac)
        alpha = g_without_reps(inst.m, inst.n, inst.k) ** (-1.0 / inst.m)
        if design.value < alpha * frac.value - FLOOR_TOL:
            return f"f(S)={design.value!r} < {alpha:.6f} * {frac.value!r}"
        return ""

    def _derand_repetitions_floor(self, inst: Instance, frac: FractionalDesign) -> str:
        design = derandomize_repetitions(inst, frac)
        floor = with_reps_floor(inst.m, inst.k) * frac.value ** inst.m
        if design.value ** inst.m < floor - FLOOR_TOL:
            return f"f(S)^m={design.value ** inst.m!r} < {floor!r}"
        return ""

    def _martingale(self, inst: Instance, frac: FractionalDesign, reps: Instance, frac_reps: FractionalDesign) -> str:
        runs = (
            ("proportional", lambda trace: derandomize_proportional(inst, frac, trace), inst),
            ("asymptotic", lambda trace: derandomize_asymptotic(inst, frac, VERIFY_EPS, trace), inst),
            ("repetitions", lambda trace: derandomize_repetitions(reps, frac_reps, trace), reps),
        )
        for label, derandomize, target in runs:
            trace: list = []
            design = derandomize(trace)
            scale = max(1.0, trace[0].value)
            for before, after in zip(trace, trace[1:]):
                if after.value < before.value - MARTINGALE_TOL * scale:
                    return f"{label}: H dropped from {before.value!r} to {after.value!r} at {after.base_set}"
            final = design_determinant(target, design.members)
            if final < trace[0].value - MARTINGALE_TOL * scale:
                return f"{label}: det(S)={final!r} < H(∅)={trace[0].value!r}"
        return ""

    def _correlation_floor(self, inst: Instance, frac: FractionalDesign) -> str:
        law = oracle.exact_law_proportional(frac)
        floor = oracle.correlation_floor(law, frac, inst.m)
        bound = 1.0 / g_without_reps(inst.m, inst.n, inst.k)
        return "" if floor >= bound - 1e-9 else f"min Pr[T ⊆ 𝒮]/x^T = {floor!r} < 1/g = {bound!r}"
