"""
Derandomization service module.

Method of conditional expectations for the three rounding schemes. For a
partial design S, H(S) is the expected determinant det(Σ_{i∈𝒮} a_i a_iᵀ)
of the rounded design 𝒮 given that S is part of it. Each greedy loop starts
from S = ∅ and appends the experiment maximizing H, so the final
determinant is at least H(∅).

Set schemes (proportional, asymptotic). With weights z on the experiments
R outside S, the polynomial

    N(t) = Π_{i∈R} (1 + z_i t) · det(A_S + Σ_{i∈R} (z_i t / (1 + z_i t)) a_i a_iᵀ)

has t^j coefficient Σ_{|W|=j} Π_{i∈W} z_i · det(A_{S∪W}), where A_T is the
Gram sum of T. Proportional sampling uses z = x̂ and the coefficient of
t^{k-s}; inflated Bernoulli sampling uses z = x̂/(1+ε-x̂) and the
coefficients 0..k-s. The denominators are elementary symmetric
polynomials of z. Coefficients come from values on a circle of radius
chosen so the wanted coefficients dominate.

Multiset scheme (repetitions). Given the first s draws, the remaining k - s
draws are independent with Pr = x̂_i/k and

    H(S) = Σ_{r=0}^{min(k-s, m)} (k-s)! / ((k-s-r)! k^r) · [t^r] det(A_S + t M(x̂)).

The degree-m polynomial is recovered by exact rational interpolation.
"""
import logging
from typing import Callable, Optional, Sequence

import numpy as np

from app.core.exceptions import InvalidParams, ModeViolation, UnreachableCondition
from app.core.metrics import CONDITIONAL_EXPECTATIONS_TOTAL
from app.core.settings import settings
from app.models.design import ConditionalExpectation, Design, FractionalDesign
from app.models.instance import Instance, Mode
from app.models.objective import design_determinant, member_counts
from app.services.sampling import expansion_counts, leverage_pick, pick_best
from app.utils.linalg import determinant, gram_array
from app.utils.symfun import coefficients_on_circle, elem_sym_prefix, extraction_radius, interpolate

logger = logging.getLogger(__name__)

CondExp = Callable[[Sequence[int]], float]


def _count(scheme: str) -> None:
    if settings.METRICS_ENABLED:
        CONDITIONAL_EXPECTATIONS_TOTAL.labels(scheme=scheme).inc()


def _check_set(inst: Instance, frac: FractionalDesign, S: Sequence[int], mode: Mode) -> tuple:
    if inst.mode is not mode or frac.mode is not mode:
        raise ModeViolation(f"this conditional expectation needs mode {mode.value}, got {inst.mode.value}")
    counts = member_counts(inst, S)
    if len(S) > inst.k:
        raise InvalidParams(f"partial design of size {len(S)} exceeds k={inst.k}")
    return counts, gram_array(inst.matrix, counts)


def numerator_polynomial(inst: Instance, A_S: np.ndarray, rest: np.ndarray, z: np.ndarray, s: int, lo: int, hi: int):
    """
    Coefficients of N(t) for weights z on the experiments in rest.

    Parameters:
        inst: Problem instance
        A_S: Gram sum of the conditioned experiments
        rest: Indices outside S
        z: Weights of the indices in rest
        s: Size of S; coefficients below m - s vanish
        lo, hi: Coefficient window the caller needs; it decides the circle radius

    Returns:
        PolynomialCoeffs of degree len(rest)
    """
    A_R = inst.matrix[rest]
    degree = rest.size
    # [t^j] N <= e_j(z) det(A_S + Σ_R a aᵀ) by monotonicity of det on PSD matrices
    proxy = elem_sym_prefix(z, degree) * max(float(determinant(A_S + A_R.T @ A_R)), 0.0)
    proxy[:max(inst.m - s, 0)] = 0.0
    norm_S = float(np.linalg.norm(A_S, 2))
    squares = np.einsum("ij,ij->i", A_R, A_R)

    def log_noise(log_rho: np.ndarray) -> np.ndarray:
        # LU round-off on M(t) is of order |Π(1 + z t)| ‖M(t)‖^m
        zr = np.outer(np.exp(log_rho), z)
        with np.errstate(divide="ignore"):
            return np.log(inst.m) + np.log1p(zr).sum(axis=1) + inst.m * np.log(norm_S + (zr / (1.0 + zr)) @ squares)

    def evaluate(t: complex) -> complex:
        w = z * t / (1.0 + z * t)
        M = A_S + (A_R.T * w) @ A_R
        return np.prod(1.0 + z * t) * determinant(M, rel_tol=0.0)

    radius = extraction_radius(proxy, lo, hi, log_noise)
    return coefficients_on_circle(evaluate, degree, radius)


def _set_conditional(inst: Instance, A_S: np.ndarray, counts: np.ndarray, z_all: np.ndarray, need: int, window_lo: int):
    """Σ_{j=lo..need} [t^j] N(t) / Σ_{j=lo..need} e_j(z) over the experiments outside S."""
    rest = np.flatnonzero(counts == 0)
    if need > rest.size:
        raise UnreachableCondition(f"only {rest.size} experiments remain for {need} open slots")
    z = z_all[rest]
    e = elem_sym_prefix(z, need)
    denominator = float(e[window_lo:need + 1].sum())
    if denominator <= 0.0:
        raise UnreachableCondition("the conditioning event has probability zero")
    if need == 0:
        return max(float(determinant(A_S)), 0.0)
    s = inst.n - rest.size
    # completions with fewer than m experiments have determinant 0
    lo = max(window_lo, inst.m - s)
    if lo > need:
        return 0.0
    poly = numerator_polynomial(inst, A_S, rest, z, s, lo, need)
    return max(poly.window_sum(lo, need), 0.0) / denominator


def cond_exp_proportional(inst: Instance, frac: FractionalDesign, S: Sequence[int]) -> float:
    """
    H(S) under proportional sampling, Pr[𝒮] ∝ Π_{i∈𝒮} x̂_i over k-subsets.

    Parameters:
        inst: Problem instance without repetitions
        frac: Fractional design x̂
        S: Distinct experiments, |S| <= k

    Returns:
        E[det(Σ_{i∈𝒮} a_i a_iᵀ) | S ⊆ 𝒮]

    Raises:
        UnreachableCondition: If no k-subset of positive weight contains S
    """
    counts, A_S = _check_set(inst, frac, S, Mode.WITHOUT_REPS)
    _count("proportional")
    need = inst.k - len(S)
    return _set_conditional(inst, A_S, counts, frac.x, need, need)


def asymptotic_weights(frac: FractionalDesign, eps: float) -> np.ndarray:
    """Odds x̂_i/(1+ε-x̂_i) of the inflated Bernoulli inclusions."""
    if not 0.0 < eps < 1.0:
        raise InvalidParams(f"eps must lie in (0, 1), got {eps}")
    x = frac.x
    return x / (1.0 + eps - x)


def cond_exp_asymptotic(inst: Instance, frac: FractionalDesign, eps: float, S: Sequence[int]) -> float:
    """
    H(S) under independent inclusion with probability x̂_i/(1+ε), conditioned
    on at most k experiments being drawn.

    Returns:
        E[det(Σ_{i∈𝒮} a_i a_iᵀ) | S ⊆ 𝒮, |𝒮| <= k]; the determinant of a
        draw with fewer than m experiments is 0
    """
    counts, A_S = _check_set(inst, frac, S, Mode.WITHOUT_REPS)
    _count("asymptotic")
    need = inst.k - len(S)
    z = asymptotic_weights(frac, eps)
    if need > 0 and np.count_nonzero(counts == 0) < need:
        # every completion fits under the size cap
        need = int(np.count_nonzero(counts == 0))
    return _set_conditional(inst, A_S, counts, z, need, 0)


def _falling_ratio(need: int, k: int, r: int) -> float:
    """need! / ((need - r)! k^r)."""
    value = 1.0
    for i in range(r):
        value *= (need - i) / k
    return value


def _det_polynomial(A_S: np.ndarray, B: np.ndarray, m: int):
    """Coefficients of t ↦ det(A_S + tB) from values at t = 1..m+1."""
    return interpolate([(t, float(determinant(A_S + t * B, rel_tol=0.0))) for t in range(1, m + 2)])


def cond_exp_repetitions(inst: Instance, frac: FractionalDesign, S: Sequence[int]) -> float:
    """
    H(S) under k independent draws with Pr = x̂_i/k, given the first |S| draws are S.

    The constant term det(A_S) is part of the sum.

    Raises:
        ModeViolation: If the instance is without repetitions
    """
    _, A_S = _check_set(inst, frac, S, Mode.WITH_REPS)
    _count("repetitions")
    need = inst.k - len(S)
    if need == 0:
        return max(float(determinant(A_S)), 0.0)
    poly = _det_polynomial(A_S, gram_array(inst.matrix, frac.x), inst.m)
    value = sum(_falling_ratio(need, inst.k, r) * poly[r] for r in range(min(need, inst.m) + 1))
    return max(float(value), 0.0)


def cond_exp_expanded(inst: Instance, frac: FractionalDesign, q: int, S: Sequence[int]) -> float:
    """
    H(S) under a uniform k-subset of the multiset with q·x̂_i copies of i,
    given that copies forming S were drawn.

    With N = qk - s copies left and R their Gram sum,
    H(S) = Σ_r (k-s)_r / (N)_r · [t^r] det(A_S + tR), (a)_r falling factorials.
    Tends to cond_exp_repetitions as q grows.

    Raises:
        NotRationalized: If q·x̂ is not integral
        UnreachableCondition: If S uses more copies of an index than exist
    """
    counts, A_S = _check_set(inst, frac, S, Mode.WITH_REPS)
    copies = expansion_counts(frac, q)
    if np.any(counts > copies):
        raise UnreachableCondition("the partial design needs more copies than the expansion holds")
    need = inst.k - len(S)
    if need == 0:
        return max(float(determinant(A_S)), 0.0)
    left = int(copies.sum()) - len(S)
    R = gram_array(inst.matrix, (copies - counts).astype(float))
    poly = _det_polynomial(A_S, R, inst.m)
    value, ratio = 0.0, 1.0
    for r in range(min(need, inst.m) + 1):
        value += ratio * poly[r]
        ratio *= (need - r) / (left - r) if left > r else 0.0
    return max(float(value), 0.0)


def _reachable(frac: FractionalDesign, j: int) -> bool:
    return frac.weights[j] > 0.0


def greedy_trace(
    inst: Instance, frac: FractionalDesign, H: CondExp, label: str
) -> tuple[list[int], list[ConditionalExpectation]]:
    """
    Greedy conditional-expectation loop.

    Each step evaluates H(S ∪ {j}) for every experiment j of positive weight
    (not yet in S unless repetitions are allowed) and appends the lowest
    index within TIE_REL_TOL of the best value. Candidates whose condition
    is unreachable are skipped; when every value is 0 the step picks by
    leverage score.

    Returns:
        (members in order of selection, H value after each step, starting at H(∅))
    """
    members: list[int] = []
    trace = [ConditionalExpectation(base_set=(), value=H([]))]
    while len(members) < inst.k:
        taken = set(members)
        candidates, values = [], []
        for j in range(inst.n):
            if (j in taken and inst.mode is Mode.WITHOUT_REPS) or not _reachable(frac, j):
                continue
            try:
                values.append(H(members + [j]))
            except UnreachableCondition:
                continue
            candidates.append(j)
        if not candidates:
            raise UnreachableCondition(f"no reachable extension of a size-{len(members)} partial design")
        j = pick_best(values, candidates)
        if j < 0:
            j = leverage_pick(inst, members, candidates)
            logger.info(f"{label}: all conditional expectations vanish at size {len(members)}, using leverage scores")
        members.append(j)
        trace.append(ConditionalExpectation(base_set=tuple(members), value=values[candidates.index(j)]))
    logger.debug(f"{label}: selected {members}, H(∅)={trace[0].value:.6g}, final={trace[-1].value:.6g}")
    return members, trace


def derandomize_proportional(inst: Instance, frac: FractionalDesign, trace: Optional[list] = None) -> Design:
    """
    Deterministic counterpart of sample_proportional.

    det of the output is at least E[det] under proportional sampling.
    Pass a list as trace to collect the H value after every step.
    """
    members, steps = greedy_trace(inst, frac, lambda S: cond_exp_proportional(inst, frac, S), "derand-proportional")
    if trace is not None:
        trace.extend(steps)
    return Design.build(inst, members)


def derandomize_asymptotic(inst: Instance, frac: FractionalDesign, eps: float, trace: Optional[list] = None) -> Design:
    """
    Deterministic counterpart of sample_bernoulli_fill.

    det of the output is at least E[det | |𝒮| <= k] under inflated Bernoulli sampling.
    """
    members, steps = greedy_trace(inst, frac, lambda S: cond_exp_asymptotic(inst, frac, eps, S), "derand-asymptotic")
    if trace is not None:
        trace.extend(steps)
    return Design.build(inst, members)


def derandomize_repetitions(inst: Instance, frac: FractionalDesign, trace: Optional[list] = None) -> Design:
    """
    Deterministic counterpart of sample_with_repetitions.

    Every step may repeat an experiment; det of the output is at least the
    expected determinant of k independent draws with Pr = x̂_i/k.
    """
    members, steps = greedy_trace(inst, frac, lambda S: cond_exp_repetitions(inst, frac, S), "derand-repetitions")
    if trace is not None:
        trace.extend(steps)
    return Design.build(inst, members)


def final_determinant(inst: Instance, design: Design) -> float:
    """det(Σ_{i∈S} a_i a_iᵀ) of a derandomized design, for comparison with H(∅)."""
    return design_determinant(inst, design.members)
