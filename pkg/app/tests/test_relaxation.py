"""
Relaxation tests.

Tests for the Frank-Wolfe solver of the continuous relaxation.
"""
import math

import numpy as np
import pytest

from app.models.instance import Instance, Mode
from app.schemas.solver import SolverConfig
from app.services.oracle import brute_force_optimum
from app.services.relaxation import (
    duality_gap,
    linear_maximization_oracle,
    log_det_gradient,
    solve_relaxation,
)
from app.utils.linalg import gram_array, log_det
from app.utils.rng import make_rng


class TestLinearMaximizationOracle:
    """Tests for the vertex oracle."""

    def test_top_k_without_repetitions(self):
        """Test that the k largest entries are chosen."""
        v = linear_maximization_oracle(np.array([0.1, 0.9, 0.5, 0.7]), 2, Mode.WITHOUT_REPS)

        np.testing.assert_array_equal(v, [0.0, 1.0, 0.0, 1.0])

    def test_ties_go_to_lower_index(self):
        """Test the tie rule."""
        v = linear_maximization_oracle(np.ones(4), 2, Mode.WITHOUT_REPS)

        np.testing.assert_array_equal(v, [1.0, 1.0, 0.0, 0.0])

    def test_all_mass_with_repetitions(self):
        """Test the with-repetitions vertex k·e_j."""
        v = linear_maximization_oracle(np.array([0.2, 0.9, 0.9]), 3, Mode.WITH_REPS)

        np.testing.assert_array_equal(v, [0.0, 3.0, 0.0])


class TestGradient:
    """Tests for the log det gradient."""

    def test_finite_differences(self, random_instance):
        """Test agreement with central differences at random interior points."""
        inst = random_instance(m=3, n=7, k=4, seed=11)
        rng = make_rng(5)
        for _ in range(20):
            x = rng.uniform(0.2, 0.8, inst.n)
            grad = log_det_gradient(inst, x)
            h = 1e-6
            for i in range(inst.n):
                up, down = x.copy(), x.copy()
                up[i] += h
                down[i] -= h
                numeric = (log_det(gram_array(inst.matrix, up)) - log_det(gram_array(inst.matrix, down))) / (2 * h)
                assert grad[i] == pytest.approx(numeric, rel=1e-4)


class TestSolveRelaxation:
    """Tests for solve_relaxation."""

    def test_symmetric_instance(self, symmetric_instance):
        """Test ŵ = sqrt(4/3) at x̂ = (2/3, 2/3, 2/3)."""
        frac = solve_relaxation(symmetric_instance)

        assert frac.value == pytest.approx(math.sqrt(4 / 3), abs=1e-5)
        np.testing.assert_allclose(frac.weights, [2 / 3] * 3, atol=1e-6)
        assert frac.converged

    def test_basis_instance(self, basis_instance):
        """Test the unique feasible point."""
        frac = solve_relaxation(basis_instance)

        np.testing.assert_allclose(frac.weights, [1.0, 1.0, 1.0])
        assert frac.value == pytest.approx(1.0)

    def test_duplicated_basis(self, duplicated_basis_instance):
        """Test that ŵ equals the integral optimum 1."""
        frac = solve_relaxation(duplicated_basis_instance)

        assert frac.value == pytest.approx(1.0, abs=1e-6)

    def test_feasibility_and_gap(self, random_instance):
        """Test Σx = k, 0 <= x <= 1 and the reported gap."""
        inst = random_instance(m=3, n=10, k=5, seed=2)
        cfg = SolverConfig()
        frac = solve_relaxation(inst, cfg)

        assert frac.converged
        assert sum(frac.weights) == pytest.approx(inst.k, rel=1e-12)
        assert min(frac.weights) >= 0.0 and max(frac.weights) <= 1.0
        assert frac.gap <= cfg.rel_tol * inst.m
        assert duality_gap(inst, frac.x) <= 10 * cfg.rel_tol * inst.m

    def test_with_repetitions_allows_large_weights(self):
        """Test that weights may exceed 1 with repetitions."""
        inst = Instance.from_vectors([[1, 0], [0, 1], [0.1, 0.1], [0.1, 0.1]], k=4, mode=Mode.WITH_REPS)
        frac = solve_relaxation(inst)

        assert frac.weights[0] == pytest.approx(2.0, abs=1e-4)
        assert frac.weights[1] == pytest.approx(2.0, abs=1e-4)
        assert frac.value == pytest.approx(2.0, abs=1e-4)

    def test_open_loop_step(self, random_instance):
        """Test that the 2/(t+2) rule approaches the same value."""
        inst = random_instance(m=2, n=6, k=3, seed=8)
        exact = solve_relaxation(inst)
        classic = solve_relaxation(
            inst, SolverConfig(line_search=False, pairwise=False, max_iters=5000, rel_tol=1e-4)
        )

        assert classic.value <= exact.value * (1.0 + 1e-6)
        assert classic.value == pytest.approx(exact.value, rel=1e-3)

    def test_non_convergence_is_flagged(self, random_instance):
        """Test that an iteration cap returns the best iterate unconverged."""
        inst = random_instance(m=3, n=12, k=5, seed=4)
        frac = solve_relaxation(inst, SolverConfig(max_iters=1, rel_tol=1e-12))

        assert not frac.converged
        assert frac.iterations == 1
        assert sum(frac.weights) == pytest.approx(inst.k)

    def test_dominates_integral_optimum(self, random_instance):
        """Test ŵ >= w* on small instances."""
        for seed in range(10):
            inst = random_instance(m=2, n=6, k=3, seed=seed)
            assert brute_force_optimum(inst).value <= solve_relaxation(inst).value + 1e-6
