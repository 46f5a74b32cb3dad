"""
Sampling service module.

Randomized rounding of a fractional design x̂ into an integral design:

- sample_proportional: Pr[S] ∝ Π_{i∈S} x̂_i over k-subsets, drawn one index
  at a time with elementary-symmetric conditional probabilities.
- sample_bernoulli_fill: independent inclusion with probability x̂_i/(1+ε),
  redrawn until at most k are chosen, then completed greedily.
- sample_with_repetitions: k independent categorical draws with Pr = x̂_i/k.
- sample_expanded: uniform k-subset of a multiset holding q·x̂_i copies of i.

Every sampler is a pure function of its inputs and the seed.
"""
import logging
from collections import Counter
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from app.core.exceptions import InvalidParams, ModeViolation, NotRationalized, UnreachableCondition
from app.core.metrics import REJECTION_ROUNDS_TOTAL, SAMPLES_DRAWN_TOTAL
from app.core.settings import settings
from app.models.design import Design, FractionalDesign
from app.models.instance import Instance, Mode
from app.models.objective import design_determinant, member_counts
from app.schemas.law import ExactLaw
from app.utils.linalg import gram_array, ridge_leverage_scores
from app.utils.rng import make_rng, trial_seed
from app.utils.symfun import elem_sym_prefix

logger = logging.getLogger(__name__)

RATIONAL_TOL = 1e-9


def _require_mode(inst: Instance, frac: FractionalDesign, mode: Mode, scheme: str) -> None:
    if inst.mode is not mode or frac.mode is not mode:
        raise ModeViolation(f"{scheme} sampling needs mode {mode.value}, got {inst.mode.value}")
    if len(frac.weights) != inst.n:
        raise InvalidParams(f"fractional design has {len(frac.weights)} weights for n={inst.n}")


def _count(scheme: str) -> None:
    if settings.METRICS_ENABLED:
        SAMPLES_DRAWN_TOTAL.labels(scheme=scheme).inc()


def inclusion_step_probability(x: np.ndarray, j: int, need: int) -> float:
    """
    Pr[j is taken | indices before j decided, need still missing].

    x_j · e_{need-1}(x_{j+1:}) / e_need(x_{j:}).
    """
    undecided = x.size - j
    if need == 0:
        return 0.0
    if need >= undecided:
        return 1.0
    e = elem_sym_prefix(x[j + 1:], need)
    taken = x[j] * e[need - 1]
    total = e[need] + taken
    if total <= 0.0:
        raise UnreachableCondition(f"no size-{need} completion of positive weight after index {j}")
    return float(taken / total)


def sample_proportional(frac: FractionalDesign, inst: Instance, seed: int) -> Design:
    """
    Draw a k-subset with Pr[S] = Π_{i∈S} x̂_i / e_k(x̂).

    Parameters:
        frac: Feasible fractional design, without repetitions
        inst: Problem instance
        seed: Unsigned 64-bit seed

    Returns:
        Sampled Design

    Raises:
        ModeViolation: If the instance allows repetitions
    """
    _require_mode(inst, frac, Mode.WITHOUT_REPS, "proportional")
    rng = make_rng(seed)
    x, k = frac.x, inst.k
    members: list[int] = []
    for j in range(inst.n):
        need = k - len(members)
        if need == 0:
            break
        if need == inst.n - j:
            members.extend(range(j, inst.n))
            break
        if rng.random() < inclusion_step_probability(x, j, need):
            members.append(j)
    _count("proportional")
    return Design.build(inst, members)


def path_probability(x: Sequence[float], k: int, members: Sequence[int]) -> float:
    """
    Probability that sample_proportional returns members, as the product of
    the conditional probabilities its sequential loop uses.
    """
    x = np.asarray(x, dtype=float)
    chosen = set(members)
    prob, taken = 1.0, 0
    for j in range(x.size):
        need = k - taken
        if need == 0:
            break
        p = inclusion_step_probability(x, j, need)
        if j in chosen:
            prob *= p
            taken += 1
        else:
            prob *= 1.0 - p
        if prob == 0.0:
            return 0.0
    return prob if taken == k else 0.0


def sequential_law_proportional(frac: FractionalDesign) -> ExactLaw:
    """Law of sample_proportional assembled from its step probabilities."""
    x = frac.x
    k = frac.budget
    table = {S: path_probability(x, k, S) for S in combinations(range(x.size), k)}
    return ExactLaw.from_weights(table)


def draw_bernoulli(frac: FractionalDesign, eps: float, rng: np.random.Generator) -> list[int]:
    """One round of independent inclusion with probability x̂_i/(1+ε)."""
    p = frac.x / (1.0 + eps)
    return [int(i) for i in np.flatnonzero(rng.random(p.size) < p)]


def leverage_pick(inst: Instance, members: Sequence[int], candidates: Sequence[int]) -> int:
    """
    Candidate with the largest ridge leverage score a_jᵀ(M + δI)⁻¹a_j, M the
    Gram sum of members; ties go to the lowest index.
    """
    M = gram_array(inst.matrix, member_counts(inst, members))
    scores = ridge_leverage_scores(inst.matrix[list(candidates)], M, settings.LEVERAGE_RIDGE)
    return int(candidates[int(np.argmax(scores))])


def pick_best(values: Sequence[float], candidates: Sequence[int]) -> int:
    """Lowest-index candidate within TIE_REL_TOL of the best positive value, or -1."""
    values = np.asarray(values, dtype=float)
    best = float(values.max()) if values.size else 0.0
    if not best > 0.0:
        return -1
    winners = np.flatnonzero(values >= best * (1.0 - settings.TIE_REL_TOL))
    return int(candidates[int(winners[0])])


def greedy_fill(inst: Instance, members: Sequence[int]) -> list[int]:
    """
    Complete a partial design to k members by repeatedly adding
    argmax_j f(S ∪ {j}); a zero-determinant step falls back to leverage scores.
    """
    members = list(members)
    while len(members) < inst.k:
        taken = set(members)
        candidates = [j for j in range(inst.n) if j not in taken or inst.mode is Mode.WITH_REPS]
        values = [design_determinant(inst, members + [j]) for j in candidates]
        j = pick_best(values, candidates)
        if j < 0:
            j = leverage_pick(inst, members, candidates)
            logger.info(f"Greedy fill at size {len(members)}: all candidates singular, using leverage scores")
        members.append(j)
    return members


def sample_bernoulli_fill(frac: FractionalDesign, inst: Instance, eps: float, seed: int) -> Design:
    """
    Inflated Bernoulli rounding with greedy completion.

    Each experiment is kept independently with probability x̂_i/(1+ε); the
    draw is repeated until at most k are kept, then filled greedily to k.
    After REJECTION_CAP rejected draws the sampler falls back to
    sample_proportional on the same x̂ and seed.

    Raises:
        InvalidParams: If eps is outside (0, 1)
        ModeViolation: If the instance allows repetitions
    """
    if not 0.0 < eps < 1.0:
        raise InvalidParams(f"eps must lie in (0, 1), got {eps}")
    _require_mode(inst, frac, Mode.WITHOUT_REPS, "asymptotic")
    rng = make_rng(seed)
    for rejected in range(settings.REJECTION_CAP):
        drawn = draw_bernoulli(frac, eps, rng)
        if len(drawn) <= inst.k:
            break
        if settings.METRICS_ENABLED:
            REJECTION_ROUNDS_TOTAL.inc()
    else:
        logger.warning(f"Rejection cap {settings.REJECTION_CAP} reached, falling back to proportional sampling")
        return sample_proportional(frac, inst, seed)
    _count("asymptotic")
    return Design.build(inst, greedy_fill(inst, drawn))


def sample_with_repetitions(frac: FractionalDesign, inst: Instance, seed: int) -> Design:
    """
    k independent draws with Pr[s = i] = x̂_i / k.

    Raises:
        ModeViolation: If the instance is without repetitions
    """
    _require_mode(inst, frac, Mode.WITH_REPS, "repetitions")
    rng = make_rng(seed)
    p = frac.x / frac.x.sum()
    draws = rng.choice(inst.n, size=inst.k, p=p)
    _count("repetitions")
    return Design.build(inst, draws.tolist())


def expansion_counts(frac: FractionalDesign, q: int) -> np.ndarray:
    """
    Copy counts q·x̂_i of the expanded multiset.

    Raises:
        InvalidParams: If q is not a positive integer
        NotRationalized: If some q·x̂_i is not an integer within 1e-9
    """
    if int(q) != q or q < 1:
        raise InvalidParams(f"q must be a positive integer, got {q}")
    scaled = int(q) * frac.x
    counts = np.rint(scaled)
    if np.any(np.abs(scaled - counts) > RATIONAL_TOL):
        raise NotRationalized(f"q={q} does not clear the denominators of the weights")
    return counts.astype(int)


def sample_expanded(frac: FractionalDesign, inst: Instance, q: int, seed: int) -> Design:
    """
    Uniform k-subset of the multiset with q·x̂_i copies of each index i.

    Raises:
        ModeViolation: If the instance is without repetitions
        NotRationalized: If q·x̂ is not integral
    """
    _require_mode(inst, frac, Mode.WITH_REPS, "expanded")
    counts = expansion_counts(frac, q)
    copies = np.repeat(np.arange(inst.n), counts)
    rng = make_rng(seed)
    picked = rng.choice(copies.size, size=inst.k, replace=False)
    _count("expanded")
    return Design.build(inst, copies[picked].tolist())


def empirical_law(sampler: Callable[[int], Design], trials: int, seed: int) -> ExactLaw:
    """
    Frequency table of a sampler over seeded trials.

    Parameters:
        sampler: Callable mapping a seed to a Design
        trials: Number of draws; trial t uses seed XOR t
        seed: Base seed

    Returns:
        Empirical law over the observed designs
    """
    if trials < 1:
        raise InvalidParams("trials must be positive")
    counts = Counter(sampler(trial_seed(seed, t)).members for t in range(trials))
    return ExactLaw.from_weights(dict(counts))
