"""
Report schema module.

Defines the JSON reports written by the solve and verify commands.
Field order is the serialized key order.
"""
from typing import Optional

from pydantic import BaseModel, Field

from app.models.instance import Mode

TIMING_FIELDS = {"seconds", "timings", "created_at"}


class InstanceSummary(BaseModel):
    m: int
    n: int
    k: int
    mode: Mode


class RelaxationSummary(BaseModel):
    """Relaxation value ŵ and how the solver got there."""
    value: float
    converged: bool
    iterations: int
    gap: float


class SchemeRun(BaseModel):
    """
    One rounding scheme applied to the relaxation.

    trial_values lists every sampled objective when trials > 1; the design
    is the best of them.
    """
    scheme: str
    members: list[int]
    value: float
    ratio: float
    certificate_alpha: float
    certificate_floor: Optional[float] = None
    trial_values: list[float] = Field(default_factory=list)
    seconds: float = 0.0


class RunReport(BaseModel):
    """
    Schema for the solve command output.

    Invariant: every run's ratio is at most 1 + 1e-9.
    """
    instance: InstanceSummary
    relaxation: RelaxationSummary
    runs: list[SchemeRun]
    seed: int
    trials: int
    timings: dict[str, float] = Field(default_factory=dict)
    created_at: str = ""

    def comparable(self) -> dict:
        """Report contents without wall-clock fields, for equality checks."""
        data = self.model_dump(mode="json", exclude={"timings", "created_at"})
        for run in data["runs"]:
            run.pop("seconds", None)
        return data


class CheckTally(BaseModel):
    passed: int = 0
    failed: int = 0


class CheckFailure(BaseModel):
    """A violated invariant with the seed that reproduces the instance."""
    check: str
    instance_seed: int
    detail: str


class VerificationSummary(BaseModel):
    """
    Schema for the verify command output.
    """
    instances: int
    seed: int
    checks: dict[str, CheckTally] = Field(default_factory=dict)
    failures: list[CheckFailure] = Field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def total_checks(self) -> int:
        return sum(t.passed + t.failed for t in self.checks.values())

    def record(self, check: str, passed: bool, instance_seed: int, detail: str = "") -> None:
        tally = self.checks.setdefault(check, CheckTally())
        if passed:
            tally.passed += 1
        else:
            tally.failed += 1
            self.failures.append(CheckFailure(check=check, instance_seed=instance_seed, detail=detail))

    def table(self) -> str:
        """Plain-text summary table, one row per check."""
        width = max([len(name) for name in self.checks] + [5])
        lines = [f"{'check':<{width}}  passed  failed"]
        for name, tally in self.checks.items():
            lines.append(f"{name:<{width}}  {tally.passed:>6}  {tally.failed:>6}")
        return "\n".join(lines)
