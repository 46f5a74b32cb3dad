"""
Schema tests.

Tests for the instance file format, solver settings, certificates, laws
and reports.
"""
import json

import pytest
from pydantic import ValidationError

from app.core.exceptions import InfeasibleRank, InvalidParams
from app.core.settings import settings
from app.models.instance import Mode
from app.schemas import (
    ApproximationCertificate,
    Conditioning,
    ExactLaw,
    InstanceFile,
    InstanceSummary,
    Method,
    RelaxationSummary,
    RunReport,
    Scheme,
    SchemeRun,
    SolverConfig,
    VerificationSummary,
    dump_instance,
    instance_to_json,
    load_instance,
    parse_scheme_name,
    scheme_names,
)


class TestInstanceFile:
    """Tests for the instance JSON layout."""

    def test_layout(self, symmetric_instance):
        """Test key order and one vector per line."""
        text = instance_to_json(symmetric_instance)

        assert list(json.loads(text)) == ["m", "n", "k", "mode", "vectors"]
        assert '    [1.0, 1.0]\n' in text
        assert json.loads(text)["mode"] == "without_reps"

    def test_dump_and_load(self, tmp_path, random_instance):
        """Test that a written file loads back to the same instance."""
        inst = random_instance(m=3, n=6, k=4, seed=5)
        path = tmp_path / "inst.json"

        dump_instance(inst, path)

        assert load_instance(path) == inst

    def test_from_instance(self, symmetric_reps_instance):
        """Test the schema view of an instance."""
        data = InstanceFile.from_instance(symmetric_reps_instance)

        assert data.vectors == [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0]]
        assert data.mode is Mode.WITH_REPS
        assert data.to_instance() == symmetric_reps_instance

    def test_sample_instances(self, sample_dir, symmetric_instance, duplicated_basis_instance):
        """Test the canonical files."""
        assert load_instance(sample_dir / "symmetric3.json") == symmetric_instance
        assert load_instance(sample_dir / "duplicated_basis.json") == duplicated_basis_instance
        assert load_instance(sample_dir / "basis.json").n == 3
        assert load_instance(sample_dir / "symmetric3_reps.json").mode is Mode.WITH_REPS

    def test_unknown_key(self):
        """Test that extra keys are rejected."""
        data = {"m": 1, "n": 1, "k": 1, "mode": "without_reps", "vectors": [[1.0]], "seed": 3}

        with pytest.raises(ValidationError):
            InstanceFile.model_validate(data)

    def test_unknown_mode(self):
        """Test an invalid mode spelling."""
        with pytest.raises(ValidationError):
            InstanceFile(m=1, n=1, k=1, mode="sometimes", vectors=[[1.0]])

    def test_domain_errors_pass_through(self):
        """Test that rank errors surface as DesignError, not ValidationError."""
        data = InstanceFile(m=2, n=2, k=2, mode=Mode.WITHOUT_REPS, vectors=[[1.0, 1.0], [2.0, 2.0]])

        with pytest.raises(InfeasibleRank):
            data.to_instance()


class TestSolverConfig:
    """Tests for SolverConfig."""

    def test_defaults_from_settings(self):
        """Test the SOLVER_* defaults."""
        cfg = SolverConfig()

        assert cfg.max_iters == settings.SOLVER_MAX_ITERS
        assert cfg.rel_tol == settings.SOLVER_REL_TOL
        assert cfg.pairwise and cfg.line_search

    def test_positive_fields(self):
        """Test field constraints."""
        with pytest.raises(ValidationError):
            SolverConfig(max_iters=0)
        with pytest.raises(ValidationError):
            SolverConfig(rel_tol=-1.0)

    def test_frozen(self):
        """Test immutability."""
        cfg = SolverConfig()

        with pytest.raises(ValidationError):
            cfg.max_iters = 5


class TestSchemes:
    """Tests for scheme names and certificates."""

    def test_parse(self):
        """Test splitting CLI names."""
        assert parse_scheme_name("derand-proportional") == (Method.DERAND, Scheme.PROPORTIONAL)
        assert parse_scheme_name("Sample-Repetitions") == (Method.SAMPLE, Scheme.REPETITIONS)
        assert len(scheme_names()) == 6

    def test_parse_unknown(self):
        """Test unknown names."""
        with pytest.raises(InvalidParams):
            parse_scheme_name("derand-magic")

    def test_scheme_mode(self):
        """Test the mode each scheme runs in."""
        assert Scheme.REPETITIONS.mode is Mode.WITH_REPS
        assert Scheme.ASYMPTOTIC.mode is Mode.WITHOUT_REPS

    def test_proportional_floor(self):
        """Test that a proportional certificate below 1/e is rejected."""
        with pytest.raises(InvalidParams):
            ApproximationCertificate(scheme=Scheme.PROPORTIONAL, alpha=0.3, m=2, k=2)

    def test_alpha_range(self):
        """Test alpha within [0, 1]."""
        with pytest.raises(ValidationError):
            ApproximationCertificate(scheme=Scheme.ASYMPTOTIC, alpha=1.5, m=2, k=2)

    def test_asymptotic_zero_alpha(self):
        """Test that the asymptotic certificate may be vacuous."""
        assert ApproximationCertificate(scheme=Scheme.ASYMPTOTIC, alpha=0.0, m=2, k=2).guaranteed == 0.0


class TestExactLaw:
    """Tests for ExactLaw."""

    def test_from_weights(self):
        """Test normalization, sorting and zero dropping."""
        law = ExactLaw.from_weights({(2, 1): 1.0, (0, 1): 3.0, (0, 2): 0.0})

        assert law.support == ((0, 1), (1, 2))
        assert law.probs == pytest.approx((0.75, 0.25))
        assert law.probability([2, 1]) == pytest.approx(0.25)
        assert law.probability([0, 2]) == 0.0

    def test_sum_to_one(self):
        """Test the normalization invariant."""
        with pytest.raises(InvalidParams):
            ExactLaw(support=((0,), (1,)), probs=(0.5, 0.4))

    def test_prefix_needs_draw_probs(self):
        """Test prefix laws without per-draw probabilities."""
        with pytest.raises(InvalidParams):
            ExactLaw(support=((0,),), probs=(1.0,), conditioning=Conditioning.PREFIX)

    def test_empty_table(self):
        """Test zero total weight."""
        with pytest.raises(InvalidParams):
            ExactLaw.from_weights({(0,): 0.0})


class TestReports:
    """Tests for RunReport and VerificationSummary."""

    def _report(self, seconds: float, created_at: str) -> RunReport:
        return RunReport(
            instance=InstanceSummary(m=2, n=3, k=2, mode=Mode.WITHOUT_REPS),
            relaxation=RelaxationSummary(value=1.15, converged=True, iterations=1, gap=0.0),
            runs=[
                SchemeRun(
                    scheme="derand-proportional", members=[0, 1], value=1.0, ratio=0.866,
                    certificate_alpha=0.866, seconds=seconds,
                )
            ],
            seed=0,
            trials=1,
            timings={"relaxation": seconds},
            created_at=created_at,
        )

    def test_comparable_drops_timings(self):
        """Test equality without wall-clock fields."""
        a = self._report(0.1, "2024-01-01T00:00:00+00:00")
        b = self._report(0.7, "2025-06-01T00:00:00+00:00")

        assert a != b
        assert a.comparable() == b.comparable()
        assert "seconds" not in a.comparable()["runs"][0]

    def test_verification_summary(self):
        """Test tallies, failures and the table."""
        summary = VerificationSummary(instances=2, seed=0)
        summary.record("martingale", True, 0)
        summary.record("martingale", False, 1, "H dropped")
        summary.record("sequential_law", True, 0)

        assert not summary.ok
        assert summary.total_checks == 3
        assert summary.checks["martingale"].failed == 1
        assert summary.failures[0].instance_seed == 1
        assert summary.table().splitlines()[1].split() == ["martingale", "1", "1"]
