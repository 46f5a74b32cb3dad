"""
Derandomization tests.

Tests for the conditional expectations and the greedy loops built on them.
"""
import math
from itertools import combinations, combinations_with_replacement

import pytest

from app.core.exceptions import InvalidParams, ModeViolation
from app.models.design import FractionalDesign
from app.models.instance import Mode
from app.models.objective import objective_of_design
from app.services import oracle
from app.services.bounds import g_without_reps, with_reps_floor
from app.services.derand import (
    asymptotic_weights,
    cond_exp_asymptotic,
    cond_exp_expanded,
    cond_exp_proportional,
    cond_exp_repetitions,
    derandomize_asymptotic,
    derandomize_proportional,
    derandomize_repetitions,
    final_determinant,
)
from app.services.relaxation import solve_relaxation


def _assert_monotone(trace, final: float) -> None:
    scale = max(1.0, trace[0].value)
    for before, after in zip(trace, trace[1:]):
        assert after.value >= before.value - 1e-9 * scale
    assert final >= trace[0].value - 1e-9 * scale


class TestConditionalExpectations:
    """Tests for H(S) of the three schemes."""

    def test_proportional_symmetric(self, symmetric_instance, uniform_symmetric_design):
        """Test H = 1 everywhere on the all-ties instance."""
        assert cond_exp_proportional(symmetric_instance, uniform_symmetric_design, []) == pytest.approx(1.0)
        assert cond_exp_proportional(symmetric_instance, uniform_symmetric_design, [2]) == pytest.approx(1.0)
        assert cond_exp_proportional(symmetric_instance, uniform_symmetric_design, [0, 1]) == pytest.approx(1.0)

    def test_proportional_symmetric_every_set(self, symmetric_instance, uniform_symmetric_design):
        """Test H(S) = 1 for every S with |S| <= k, including rank-one conditions."""
        for size in range(symmetric_instance.k + 1):
            for S in combinations(range(symmetric_instance.n), size):
                value = cond_exp_proportional(symmetric_instance, uniform_symmetric_design, S)
                assert value == pytest.approx(1.0, rel=1e-10), S

    def test_asymptotic_symmetric_singletons(self, symmetric_instance, uniform_symmetric_design):
        """Test that the three singleton conditions agree with each other and with the exact law."""
        law = oracle.exact_law_bernoulli_conditioned(uniform_symmetric_design, 0.5, symmetric_instance.k)
        expected = oracle.exact_conditional_expectation(law, symmetric_instance, (0,))
        values = [cond_exp_asymptotic(symmetric_instance, uniform_symmetric_design, 0.5, [i]) for i in range(3)]

        assert values == pytest.approx([expected] * 3, rel=1e-10)

    def test_single_completion(self, random_instance):
        """Test n = k = m with x̂ = 1: every H(S) is the determinant of the whole set."""
        inst = random_instance(m=2, n=2, k=2, seed=3)
        frac = FractionalDesign.from_weights(inst, [1.0, 1.0])
        whole = final_determinant(inst, derandomize_proportional(inst, frac))

        for S in ([], [0], [1], [0, 1]):
            assert cond_exp_proportional(inst, frac, S) == pytest.approx(whole, rel=1e-10), S

    def test_proportional_matches_oracle(self, random_instance, random_design):
        """Test every S of a random instance against the exact law."""
        inst = random_instance(m=2, n=6, k=3, seed=21)
        frac = random_design(inst, 21)
        law = oracle.exact_law_proportional(frac)

        for size in range(inst.k + 1):
            for S in combinations(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                assert cond_exp_proportional(inst, frac, S) == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_asymptotic_closed_form(self, symmetric_instance, uniform_symmetric_design):
        """Test H(∅) = Pr[|𝒮| = 2] / Pr[|𝒮| <= 2] with inclusion probability 4/9."""
        assert asymptotic_weights(uniform_symmetric_design, 0.5) == pytest.approx([4 / 5] * 3)
        value = cond_exp_asymptotic(symmetric_instance, uniform_symmetric_design, 0.5, [])

        assert value == pytest.approx(48 / 133, rel=1e-10)

    @pytest.mark.parametrize("eps", [0.25, 0.5])
    def test_asymptotic_matches_oracle(self, eps, random_instance, random_design):
        """Test every S of a random instance against the conditioned Bernoulli law."""
        inst = random_instance(m=2, n=6, k=3, seed=5)
        frac = random_design(inst, 5)
        law = oracle.exact_law_bernoulli_conditioned(frac, eps, inst.k)

        for size in range(inst.k + 1):
            for S in combinations(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                assert cond_exp_asymptotic(inst, frac, eps, S) == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_asymptotic_invalid_eps(self, symmetric_instance, uniform_symmetric_design):
        """Test eps outside (0, 1)."""
        with pytest.raises(InvalidParams):
            cond_exp_asymptotic(symmetric_instance, uniform_symmetric_design, 0.0, [])

    def test_repetitions_symmetric(self, symmetric_reps_instance):
        """Test H(∅) = (1 - 1/k)·det M(x̂) = 2/3."""
        frac = FractionalDesign.from_weights(symmetric_reps_instance, [2 / 3] * 3)

        assert cond_exp_repetitions(symmetric_reps_instance, frac, []) == pytest.approx(2 / 3, rel=1e-12)

    def test_repetitions_matches_oracle(self, random_instance, random_design):
        """Test every prefix multiset against the multinomial law."""
        inst = random_instance(m=2, n=4, k=3, seed=9, mode=Mode.WITH_REPS)
        frac = random_design(inst, 9)
        law = oracle.exact_law_multinomial(frac, inst.k)

        for size in range(inst.k + 1):
            for S in combinations_with_replacement(range(inst.n), size):
                expected = oracle.exact_conditional_expectation(law, inst, S)
                assert cond_exp_repetitions(inst, frac, S) == pytest.approx(expected, rel=1e-8, abs=1e-12)

    def test_expanded_tends_to_repetitions(self, two_point_reps_instance):
        """Test H_q(∅) = q/(2q-1) decreasing to the multinomial value 1/2."""
        frac = FractionalDesign.from_weights(two_point_reps_instance, [1.0, 1.0])
        limit = cond_exp_repetitions(two_point_reps_instance, frac, [])
        values = [cond_exp_expanded(two_point_reps_instance, frac, q, []) for q in (1, 2, 4, 8, 16)]

        assert limit == pytest.approx(0.5)
        assert values == pytest.approx([q / (2 * q - 1) for q in (1, 2, 4, 8, 16)])
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_mode_checks(self, symmetric_instance, symmetric_reps_instance, uniform_symmetric_design):
        """Test set and multiset schemes reject the other mode."""
        with pytest.raises(ModeViolation):
            cond_exp_repetitions(symmetric_instance, uniform_symmetric_design, [])
        with pytest.raises(ModeViolation):
            cond_exp_proportional(symmetric_reps_instance, uniform_symmetric_design, [])

    def test_oversized_partial_design(self, symmetric_instance, uniform_symmetric_design):
        """Test |S| > k."""
        with pytest.raises(InvalidParams):
            cond_exp_proportional(symmetric_instance, uniform_symmetric_design, [0, 1, 2])


class TestGreedyLoops:
    """Tests for the derandomized schemes."""

    def test_symmetric_tie_rule(self, symmetric_instance, uniform_symmetric_design):
        """Test the lowest-index pick on total ties."""
        design = derandomize_proportional(symmetric_instance, uniform_symmetric_design)

        assert design.members == (0, 1)
        assert design.value == pytest.approx(1.0)

    def test_integral_point_is_returned(self, random_instance):
        """Test that an indicator relaxation rounds to its support."""
        inst = random_instance(m=2, n=6, k=3, seed=1)
        frac = FractionalDesign.indicator(inst, [1, 3, 4])

        assert derandomize_proportional(inst, frac).members == (1, 3, 4)

    def test_proportional_floor_and_trace(self, random_instance):
        """Test f(S) >= g^{-1/m}·ŵ and H never decreasing."""
        for seed in range(6):
            inst = random_instance(m=3, n=8, k=4, seed=seed)
            frac = solve_relaxation(inst)
            trace: list = []
            design = derandomize_proportional(inst, frac, trace)

            alpha = g_without_reps(inst.m, inst.n, inst.k) ** (-1.0 / inst.m)
            assert alpha >= 1 / math.e
            assert design.value >= alpha * frac.value - 1e-6
            assert len(trace) == inst.k + 1
            _assert_monotone(trace, final_determinant(inst, design))

    def test_asymptotic_trace(self, random_instance):
        """Test k distinct members and a monotone trace."""
        inst = random_instance(m=2, n=7, k=4, seed=12)
        frac = solve_relaxation(inst)
        trace: list = []
        design = derandomize_asymptotic(inst, frac, 0.5, trace)

        assert len(set(design.members)) == inst.k
        _assert_monotone(trace, final_determinant(inst, design))

    def test_repetitions_floor(self, random_instance):
        """Test f(S)^m >= k!/((k-m)! k^m)·ŵ^m."""
        for seed in range(6):
            inst = random_instance(m=2, n=5, k=4, seed=seed, mode=Mode.WITH_REPS)
            frac = solve_relaxation(inst)
            trace: list = []
            design = derandomize_repetitions(inst, frac, trace)

            assert design.value ** inst.m >= with_reps_floor(inst.m, inst.k) * frac.value ** inst.m - 1e-6
            _assert_monotone(trace, final_determinant(inst, design))

    def test_repetitions_symmetric(self, symmetric_reps_instance):
        """Test the with-repetitions tie rule."""
        frac = solve_relaxation(symmetric_reps_instance)

        assert derandomize_repetitions(symmetric_reps_instance, frac).members == (0, 1)

    def test_repetitions_skips_zero_weight(self, symmetric_reps_instance):
        """Test that an index of weight 0 is never picked, even when its H would be largest."""
        frac = FractionalDesign.from_weights(symmetric_reps_instance, [1.0, 1.0, 0.0])
        trace: list = []
        design = derandomize_repetitions(symmetric_reps_instance, frac, trace)

        assert cond_exp_repetitions(symmetric_reps_instance, frac, [2]) > trace[1].value
        assert design.members == (0, 1)
        _assert_monotone(trace, final_determinant(symmetric_reps_instance, design))

    def test_replicated_instance(self, symmetric_reps_instance):
        """Test the set scheme on k copies of every vector."""
        copies = symmetric_reps_instance.replicated()
        design = derandomize_proportional(copies, solve_relaxation(copies))
        multiset = [i // symmetric_reps_instance.k for i in design.members]

        assert objective_of_design(symmetric_reps_instance, multiset) == pytest.approx(design.value)
        assert design.value >= solve_relaxation(copies).value / math.e
