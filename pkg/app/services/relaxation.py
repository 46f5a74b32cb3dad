"""
Relaxation service module.

Solves the continuous relaxation

    maximize log det(Σ x_i a_i a_iᵀ)  subject to  Σ x_i = k,  0 <= x_i (<= 1 without repetitions)

with Frank-Wolfe. The default step is a pairwise exchange e_i - e_j between
the best experiment that still has room and the worst experiment in the
support, sized by exact line search; the classic open-loop 2/(t+2) step
toward the oracle vertex is available through SolverConfig.
"""
import logging
from typing import Optional

import numpy as np

from app.core.exceptions import InfeasibleRank
from app.core.metrics import RELAXATION_DURATION_SECONDS, RELAXATION_ITERATIONS, RELAXATION_SOLVES_TOTAL
from app.core.settings import settings
from app.models.design import FractionalDesign
from app.models.instance import Instance, Mode
from app.schemas.solver import SolverConfig
from app.utils.linalg import gram_array, log_det, matrix_rank, ridge_leverage_scores
from app.utils.time_utils import Stopwatch

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-15
RIDGE_ANNEAL_EVERY = 100


def linear_maximization_oracle(grad: np.ndarray, k: int, mode: Mode) -> np.ndarray:
    """
    Vertex of the feasible region maximizing ⟨grad, v⟩.

    Parameters:
        grad: Length-n gradient
        k: Budget
        mode: WITHOUT_REPS picks the k largest entries, WITH_REPS puts all mass on the largest

    Returns:
        Vertex weight vector; ties go to the lowest index
    """
    grad = np.asarray(grad, dtype=float)
    v = np.zeros(grad.size)
    if mode is Mode.WITH_REPS:
        v[int(np.argmax(grad))] = float(k)
    else:
        # stable sort keeps lower indices first among equal entries
        v[np.argsort(-grad, kind="stable")[:k]] = 1.0
    return v


def log_det_gradient(inst: Instance, x: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """∂ log det M(x) / ∂x_i = a_iᵀ M(x)⁻¹ a_i, with an optional ridge on M."""
    A = inst.matrix
    return ridge_leverage_scores(A, gram_array(A, x), ridge)


def duality_gap(inst: Instance, x: np.ndarray) -> float:
    """Frank-Wolfe gap ⟨∇ log det(x), v - x⟩ with v from the oracle."""
    grad = log_det_gradient(inst, x)
    v = linear_maximization_oracle(grad, inst.k, inst.mode)
    return float(grad @ (v - x))


def _line_search(A: np.ndarray, M: np.ndarray, d: np.ndarray, gamma_max: float, steps: int) -> float:
    """
    Maximize log det(M + γD) over [0, gamma_max], D = Σ d_i a_i a_iᵀ.

    Bisection on the derivative tr((M + γD)⁻¹ D), which is decreasing in γ.
    """
    active = np.flatnonzero(d)
    A_d, d_d = A[active], d[active]
    D = gram_array(A_d, d_d)

    def slope(gamma: float) -> float:
        M_g = M + gamma * D
        if not np.isfinite(log_det(M_g)):
            return -np.inf
        return float(d_d @ ridge_leverage_scores(A_d, M_g, 0.0))

    if slope(gamma_max) >= 0.0:
        return gamma_max
    lo, hi = 0.0, gamma_max
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def _direction(x: np.ndarray, grad: np.ndarray, v: np.ndarray, cap: float, pairwise: bool):
    """Ascent direction and the largest feasible step along it."""
    if not pairwise:
        return v - x, 1.0
    room = np.flatnonzero(x < cap - SUPPORT_TOL)
    support = np.flatnonzero(x > SUPPORT_TOL)
    if room.size == 0 or support.size == 0:
        return np.zeros_like(x), 0.0
    i = int(room[np.argmax(grad[room])])
    j = int(support[np.argmin(grad[support])])
    d = np.zeros_like(x)
    if i == j or grad[i] <= grad[j]:
        return d, 0.0
    d[i], d[j] = 1.0, -1.0
    return d, float(min(cap - x[i], x[j]))


def solve_relaxation(inst: Instance, cfg: Optional[SolverConfig] = None) -> FractionalDesign:
    """
    Solve the continuous relaxation of the instance.

    Parameters:
        inst: Problem instance; its mode decides whether x <= 1 is imposed
        cfg: Solver settings, defaults from the SOLVER_* settings

    Returns:
        FractionalDesign with value f(x̂) recomputed from scratch. When the
        gap does not reach rel_tol * m within max_iters, the best iterate is
        returned with converged=False.

    Raises:
        InfeasibleRank: If the vectors do not span R^m
    """
    cfg = cfg or SolverConfig()
    A, n, m, k = inst.matrix, inst.n, inst.m, inst.k
    if matrix_rank(A) < m:
        raise InfeasibleRank(f"the {n} vectors do not span R^{m}")
    cap = 1.0 if inst.mode is Mode.WITHOUT_REPS else float(k)
    target = cfg.rel_tol * m

    logger.info(f"Solving relaxation: n={n}, m={m}, k={k}, mode={inst.mode.value}")
    x = np.full(n, k / n)
    best_x, best_value = x.copy(), -np.inf
    ridge = cfg.ridge
    converged, gap, iterations = False, np.inf, 0

    with Stopwatch() as sw:
        for t in range(cfg.max_iters):
            iterations = t + 1
            M = gram_array(A, x)
            value = log_det(M)
            singular = not np.isfinite(value)
            if not singular and value > best_value:
                best_x, best_value = x.copy(), value

            grad = ridge_leverage_scores(A, M, ridge if singular else 0.0)
            v = linear_maximization_oracle(grad, k, inst.mode)
            gap = float(grad @ (v - x))
            if not singular and gap <= target:
                converged = True
                break

            d, gamma_max = _direction(x, grad, v, cap, cfg.pairwise)
            if gamma_max <= 0.0:
                d, gamma_max = v - x, 1.0
            if cfg.line_search and not singular:
                gamma = _line_search(A, M, d, gamma_max, cfg.bisection_steps)
            else:
                gamma = gamma_max * 2.0 / (t + 2.0)

            x = np.clip(x + gamma * d, 0.0, cap)
            if (t + 1) % RIDGE_ANNEAL_EVERY == 0:
                ridge *= 0.1

        if converged:
            best_x = x
        else:
            gap = duality_gap(inst, best_x)
            logger.warning(f"Relaxation stopped after {iterations} iterations with gap {gap:.3e} > {target:.3e}")

    # remove drift in Σ x before handing the point out
    best_x = best_x * (k / best_x.sum())
    frac = FractionalDesign.from_weights(inst, best_x, converged=converged, iterations=iterations, gap=gap)
    logger.info(f"Relaxation value {frac.value:.10g} after {iterations} iterations ({sw.seconds:.3f}s)")

    if settings.METRICS_ENABLED:
        RELAXATION_SOLVES_TOTAL.labels(mode=inst.mode.value, converged=str(converged).lower()).inc()
        RELAXATION_ITERATIONS.observe(iterations)
        RELAXATION_DURATION_SECONDS.observe(sw.seconds)
    return frac
