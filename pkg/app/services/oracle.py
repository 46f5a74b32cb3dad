"""
Oracle service module.

Brute-force references for small instances: the exact optimum, exact laws
of every sampler, exact conditional expectations, and the distances and
inclusion statistics used to compare them. Enumerations that would exceed
ENUMERATION_CAP states, or laws over more than EXACT_LAW_MAX_N experiments,
raise TooLarge instead of subsampling.
"""
import logging
import math
from collections import Counter
from itertools import combinations, combinations_with_replacement, islice
from typing import Iterable, Sequence

import numpy as np

from app.core.exceptions import TooLarge, UnreachableCondition
from app.core.settings import settings
from app.models.design import Design, FractionalDesign
from app.models.instance import Instance, Mode
from app.models.objective import design_determinant
from app.schemas.law import Conditioning, ExactLaw
from app.services.sampling import expansion_counts

logger = logging.getLogger(__name__)

CHUNK = 50_000


def _check_cap(count: int, what: str) -> None:
    if count > settings.ENUMERATION_CAP:
        raise TooLarge(f"{what} has {count} states, above the cap {settings.ENUMERATION_CAP}")


def _check_law_size(n: int) -> None:
    if n > settings.EXACT_LAW_MAX_N:
        raise TooLarge(f"exact laws are limited to n <= {settings.EXACT_LAW_MAX_N}, got n={n}")


def _designs(inst: Instance) -> Iterable[tuple]:
    if inst.mode is Mode.WITH_REPS:
        _check_cap(math.comb(inst.n + inst.k - 1, inst.k), "the multiset enumeration")
        return combinations_with_replacement(range(inst.n), inst.k)
    _check_cap(math.comb(inst.n, inst.k), "the subset enumeration")
    return combinations(range(inst.n), inst.k)


def brute_force_optimum(inst: Instance) -> Design:
    """
    Exact optimum by enumeration of every feasible design.

    Determinants are evaluated in vectorized chunks; among designs within
    TIE_REL_TOL of the best value the lexicographically smallest wins.

    Raises:
        TooLarge: If the enumeration exceeds ENUMERATION_CAP
    """
    A = inst.matrix
    designs = _designs(inst)
    best_value, best = -np.inf, None
    while True:
        chunk = np.array(list(islice(designs, CHUNK)), dtype=int)
        if chunk.size == 0:
            break
        rows = A[chunk]
        dets = np.linalg.det(np.einsum("bki,bkj->bij", rows, rows))
        top = float(dets.max())
        if top > best_value * (1.0 + settings.TIE_REL_TOL) or best is None:
            window = top * (1.0 - settings.TIE_REL_TOL) if top > 0 else top
            best_value, best = top, tuple(chunk[int(np.flatnonzero(dets >= window)[0])])
    logger.debug(f"Brute-force optimum {best} with det {best_value:.6g}")
    return Design.build(inst, best)


def exact_law_proportional(frac: FractionalDesign) -> ExactLaw:
    """Pr[S] = Π_{i∈S} x̂_i / e_k(x̂) over k-subsets."""
    x = frac.x
    _check_law_size(x.size)
    k = frac.budget
    table = {S: float(np.prod(x[list(S)])) for S in combinations(range(x.size), k)}
    return ExactLaw.from_weights(table)


def exact_law_multinomial(frac: FractionalDesign, k: int) -> ExactLaw:
    """
    Law of the multiset of k independent draws with Pr = x̂_i/k.

    Conditioning on a partial design uses the first draws (prefix conditioning).
    """
    x = frac.x
    _check_law_size(x.size)
    _check_cap(math.comb(x.size + k - 1, k), "the multinomial law")
    p = x / x.sum()
    table = {S: _multinomial_probability(S, p) for S in combinations_with_replacement(range(x.size), k)}
    return ExactLaw.from_weights(table, conditioning=Conditioning.PREFIX, draw_probs=tuple(float(v) for v in p))


def _multinomial_probability(members: Sequence[int], p: np.ndarray) -> float:
    counts = Counter(members)
    log_coef = math.lgamma(len(members) + 1) - sum(math.lgamma(c + 1) for c in counts.values())
    return math.exp(log_coef) * float(np.prod([p[i] ** c for i, c in counts.items()]))


def exact_law_bernoulli_conditioned(frac: FractionalDesign, eps: float, k: int) -> ExactLaw:
    """Independent inclusion with probability x̂_i/(1+ε), conditioned on at most k inclusions."""
    x = frac.x
    _check_law_size(x.size)
    p = x / (1.0 + eps)
    table = {}
    for size in range(0, min(k, x.size) + 1):
        for S in combinations(range(x.size), size):
            inside = np.zeros(x.size, dtype=bool)
            inside[list(S)] = True
            table[S] = float(np.prod(np.where(inside, p, 1.0 - p)))
    return ExactLaw.from_weights(table)


def exact_law_expanded(frac: FractionalDesign, k: int, q: int) -> ExactLaw:
    """
    Law of the index multiset of a uniform k-subset of the copies, q·x̂_i copies of i.

    Pr[multiset b] = Π_i C(q x̂_i, b_i) / C(qk, k).

    Raises:
        NotRationalized: If q·x̂ is not integral
    """
    copies = expansion_counts(frac, q)
    _check_law_size(copies.size)
    _check_cap(math.comb(copies.size + k - 1, k), "the expanded law")
    table = {}
    for S in combinations_with_replacement(range(copies.size), k):
        table[S] = float(math.prod(math.comb(int(copies[i]), c) for i, c in Counter(S).items()))
    return ExactLaw.from_weights(table)


def _contains(outer: Counter, inner: Counter) -> bool:
    return all(outer[i] >= c for i, c in inner.items())


def inclusion_probability(law: ExactLaw, T: Sequence[int]) -> float:
    """Pr[T ⊆ 𝒮], with multiset containment for multisets."""
    need = Counter(T)
    return math.fsum(p for members, p in law.items() if _contains(Counter(members), need))


def exact_conditional_expectation(law: ExactLaw, inst: Instance, S: Sequence[int]) -> float:
    """
    E[det(Σ_{i∈𝒮} a_i a_iᵀ) | S] under an exact law.

    Containment laws condition on S ⊆ 𝒮. Prefix laws condition on the first
    |S| draws being S; the remaining draws keep their independent law.

    Raises:
        UnreachableCondition: If the conditioning event has probability 0
    """
    if law.conditioning is Conditioning.PREFIX:
        return _prefix_expectation(law, inst, S)
    need = Counter(S)
    mass, total = 0.0, 0.0
    for members, p in law.items():
        if _contains(Counter(members), need):
            mass += p
            total += p * design_determinant(inst, members)
    if mass <= 0.0:
        raise UnreachableCondition(f"Pr[{tuple(S)} ⊆ 𝒮] = 0")
    return total / mass


def _prefix_expectation(law: ExactLaw, inst: Instance, S: Sequence[int]) -> float:
    p = np.asarray(law.draw_probs)
    k = len(law.support[0])
    if any(p[i] <= 0.0 for i in S):
        raise UnreachableCondition(f"the draws {tuple(S)} have probability 0")
    total = 0.0
    for W in combinations_with_replacement(range(p.size), k - len(S)):
        weight = _multinomial_probability(W, p) if W else 1.0
        if weight > 0.0:
            total += weight * design_determinant(inst, list(S) + list(W))
    return total


def expected_determinant(law: ExactLaw, inst: Instance) -> float:
    """E[det(Σ_{i∈𝒮} a_i a_iᵀ)]."""
    return exact_conditional_expectation(law, inst, ())


def total_variation(law_a: ExactLaw, law_b: ExactLaw) -> float:
    """½ Σ |Pr_a − Pr_b| over the union of the supports."""
    support = set(law_a.support) | set(law_b.support)
    return 0.5 * math.fsum(abs(law_a.probability(s) - law_b.probability(s)) for s in support)


def correlation_floor(law: ExactLaw, frac: FractionalDesign, m: int) -> float:
    """
    min over m-sets T with Π x̂_T > 0 of Pr[T ⊆ 𝒮] / Π_{i∈T} x̂_i.

    A law is m-wise α-positively correlated exactly when this is at least α^m.
    """
    x = frac.x
    ratios = []
    for T in combinations(np.flatnonzero(x > 0).tolist(), m):
        ratios.append(inclusion_probability(law, T) / float(np.prod(x[list(T)])))
    return min(ratios) if ratios else 1.0


def max_deviation(law_a: ExactLaw, law_b: ExactLaw) -> float:
    """max |Pr_a − Pr_b| over the union of the supports."""
    support = set(law_a.support) | set(law_b.support)
    return max((abs(law_a.probability(s) - law_b.probability(s)) for s in support), default=0.0)
