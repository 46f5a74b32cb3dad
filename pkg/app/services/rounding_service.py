"""
Rounding service module.

Runs the relaxation once and applies rounding schemes to it, producing the
RunReport written by the solve command.
"""
import logging
from typing import Optional

from app.core.exceptions import ModeViolation
from app.core.settings import settings
from app.models.design import Design, FractionalDesign
from app.models.instance import Instance
from app.schemas.certificate import Method, Scheme, parse_scheme_name
from app.schemas.report import InstanceSummary, RelaxationSummary, RunReport, SchemeRun
from app.schemas.solver import SolverConfig
from app.services.bounds import certificate_for
from app.services.derand import derandomize_asymptotic, derandomize_proportional, derandomize_repetitions
from app.services.relaxation import solve_relaxation
from app.services.sampling import sample_bernoulli_fill, sample_proportional, sample_with_repetitions
from app.utils.rng import trial_seed, validate_seed
from app.utils.time_utils import Stopwatch, format_timestamp, utc_now

logger = logging.getLogger(__name__)

RATIO_SLACK = 1e-9


class RoundingService:
    """
    Service class for end-to-end rounding runs.

    Solves the relaxation lazily on first use and reuses it for every scheme.
    """

    def __init__(self, inst: Instance, solver_config: Optional[SolverConfig] = None):
        """
        Initialize service with an instance.

        Parameters:
            inst: Problem instance
            solver_config: Relaxation settings, defaults from settings
        """
        self.inst = inst
        self.solver_config = solver_config or SolverConfig()
        self._frac: Optional[FractionalDesign] = None
        self.relaxation_seconds = 0.0

    @property
    def relaxation(self) -> FractionalDesign:
        if self._frac is None:
            with Stopwatch() as sw:
                self._frac = solve_relaxation(self.inst, self.solver_config)
            self.relaxation_seconds = sw.seconds
        return self._frac

    def round_once(self, method: Method, scheme: Scheme, eps: float, seed: int) -> Design:
        """
        Apply one scheme to the relaxation.

        Raises:
            ModeViolation: If the scheme does not fit the instance mode
        """
        if scheme.mode is not self.inst.mode:
            raise ModeViolation(
                f"scheme {scheme.value} needs mode {scheme.mode.value}, instance is {self.inst.mode.value}"
            )
        frac = self.relaxation
        if method is Method.DERAND:
            if scheme is Scheme.PROPORTIONAL:
                return derandomize_proportional(self.inst, frac)
            if scheme is Scheme.ASYMPTOTIC:
                return derandomize_asymptotic(self.inst, frac, eps)
            return derandomize_repetitions(self.inst, frac)
        if scheme is Scheme.PROPORTIONAL:
            return sample_proportional(frac, self.inst, seed)
        if scheme is Scheme.ASYMPTOTIC:
            return sample_bernoulli_fill(frac, self.inst, eps, seed)
        return sample_with_repetitions(frac, self.inst, seed)

    def run(self, scheme_name: str, eps: Optional[float] = None, trials: int = 1, seed: int = 0) -> SchemeRun:
        """
        Run a named scheme such as "sample-asymptotic".

        Samplers take the best of `trials` draws with seeds seed XOR t; the
        derandomized schemes are deterministic and run once.

        Parameters:
            scheme_name: "<sample|derand>-<proportional|asymptotic|repetitions>"
            eps: Inflation for the asymptotic scheme, DEFAULT_EPS when omitted
            trials: Number of sampler draws
            seed: Base seed

        Returns:
            SchemeRun with the design, its ratio to the relaxation and the certificate
        """
        method, scheme = parse_scheme_name(scheme_name)
        seed = validate_seed(seed)
        eps = settings.DEFAULT_EPS if eps is None else eps
        inst, frac = self.inst, self.relaxation
        certificate = certificate_for(scheme, inst.m, inst.n, inst.k, eps)

        with Stopwatch() as sw:
            if method is Method.DERAND:
                designs = [self.round_once(method, scheme, eps, seed)]
            else:
                designs = [self.round_once(method, scheme, eps, trial_seed(seed, t)) for t in range(max(trials, 1))]
        best = max(designs, key=lambda d: d.value)
        ratio = best.value / frac.value
        if ratio > 1.0 + RATIO_SLACK:
            logger.warning(f"{scheme_name}: design beats the relaxation (ratio {ratio:.12f}); the solve is inexact")
        logger.info(f"{scheme_name}: f(S)={best.value:.6g}, ratio={ratio:.6f}, alpha={certificate.alpha:.6f}")

        return SchemeRun(
            scheme=f"{method.value}-{scheme.value}",
            members=list(best.members),
            value=best.value,
            ratio=ratio,
            certificate_alpha=certificate.alpha,
            certificate_floor=certificate.floor if certificate.threshold_met else None,
            trial_values=[d.value for d in designs] if method is Method.SAMPLE else [],
            seconds=sw.seconds,
        )

    def report(self, scheme_names: list[str], eps: Optional[float] = None, trials: int = 1, seed: int = 0) -> RunReport:
        """
        Run several schemes and assemble the RunReport.
        """
        runs = [self.run(name, eps=eps, trials=trials, seed=seed) for name in scheme_names]
        frac = self.relaxation
        return RunReport(
            instance=InstanceSummary(m=self.inst.m, n=self.inst.n, k=self.inst.k, mode=self.inst.mode),
            relaxation=RelaxationSummary(
                value=frac.value, converged=frac.converged, iterations=frac.iterations, gap=frac.gap
            ),
            runs=runs,
            seed=seed,
            trials=trials,
            timings={"relaxation": self.relaxation_seconds, **{run.scheme: run.seconds for run in runs}},
            created_at=format_timestamp(utc_now()),
        )


def default_scheme(inst: Instance) -> str:
    """derand-repetitions for multiset instances, derand-proportional otherwise."""
    scheme = Scheme.REPETITIONS if inst.with_repetitions else Scheme.PROPORTIONAL
    return f"{Method.DERAND.value}-{scheme.value}"
