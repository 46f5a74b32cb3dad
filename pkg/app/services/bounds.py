"""
Bounds service module.

Approximation-ratio quantities and sample-size thresholds:

- g_without_reps(m, n, k): correlation gap of proportional sampling; the
  ratio g^{-1/m} is at least 1/e.
- g_with_reps(m, k) = [(k-m)! k^m / k!]^{1/m} for multinomial sampling.
- threshold_asymptotic(m, eps): budget from which inflated Bernoulli
  sampling is a (1 - eps)-approximation.
- size_tail_bound(m, k, eps): lower bound on Pr[at most k - m further
  experiments are drawn] for the inflated Bernoulli draw.

Factorials and binomials are evaluated as log-gamma sums.
"""
import math
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp, xlogy

from app.core.exceptions import InvalidParams
from app.schemas.certificate import ApproximationCertificate, Scheme

GRID_POINTS = 1025
GOLDEN_XTOL = 1e-10


def _log_comb(n: float, r: np.ndarray) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    out = np.full(r.shape, -np.inf)
    ok = (r >= 0) & (r <= n)
    out[ok] = gammaln(n + 1) - gammaln(r[ok] + 1) - gammaln(n - r[ok] + 1)
    return out


def _check_order(m: int, n: int, k: int) -> None:
    if not (1 <= m <= k <= n):
        raise InvalidParams(f"need 1 <= m <= k <= n, got m={m}, k={k}, n={n}")


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise InvalidParams(f"eps must lie in (0, 1), got {eps}")


def _log_gap_polynomial(m: int, n: int, k: int):
    """
    log of y ↦ Σ_τ [C(n-m, k-τ) / ((n-m)^{m-τ} C(n-m, k-m))] [C(m, τ) / m^τ] (k-y)^{m-τ} y^τ.

    Terms whose binomial C(n-m, k-τ) vanishes are dropped.
    """
    tau = np.arange(m + 1, dtype=float)
    log_coef = (
        _log_comb(n - m, k - tau)
        - (m - tau) * math.log(n - m)
        - _log_comb(n - m, np.array([k - m]))[0]
        + _log_comb(m, tau)
        - tau * math.log(m)
    )
    keep = np.isfinite(log_coef)
    tau, log_coef = tau[keep], log_coef[keep]

    def log_value(y: float) -> float:
        return float(logsumexp(log_coef + xlogy(m - tau, k - y) + xlogy(tau, y)))

    return log_value


def g_without_reps(m: int, n: int, k: int) -> float:
    """
    g(m, n, k): maximum of the gap polynomial over y in [mk/n, m].

    The maximum is located on a 1025-point grid, refined by golden-section
    search around the best grid point, and compared with both endpoints.

    Raises:
        InvalidParams: If 1 <= m <= k <= n fails
    """
    _check_order(m, n, k)
    if n == m:
        return 1.0
    log_value = _log_gap_polynomial(m, n, k)
    lo, hi = m * k / n, float(m)
    ys = np.linspace(lo, hi, GRID_POINTS)
    values = np.array([log_value(y) for y in ys])
    i = int(np.argmax(values))
    best = max(values[i], values[0], values[-1])

    if 0 < i < GRID_POINTS - 1:
        try:
            res = minimize_scalar(
                lambda y: -log_value(min(max(y, lo), hi)),
                bracket=(ys[i - 1], ys[i], ys[i + 1]),
                method="golden",
                tol=GOLDEN_XTOL,
            )
            best = max(best, log_value(min(max(float(res.x), lo), hi)))
        except ValueError:
            # flat neighbourhood: the grid value stands
            pass
    return float(math.exp(best))


def ratio_without_reps(m: int, n: int, k: int, eps: Optional[float] = None) -> ApproximationCertificate:
    """
    Certificate for proportional sampling and its derandomization.

    alpha = g(m, n, k)^{-1/m} >= 1/e. With eps given, also reports the
    regime k >= (m-1)/(2 eps) in which the ratio is at least 0.5 - eps.
    """
    _check_order(m, n, k)
    alpha = min(1.0, g_without_reps(m, n, k) ** (-1.0 / m))
    threshold = threshold_met = floor = None
    if eps is not None:
        if not 0.0 < eps < 0.5:
            raise InvalidParams(f"eps must lie in (0, 0.5), got {eps}")
        threshold = math.ceil((m - 1) / (2 * eps))
        threshold_met = k >= (m - 1) / (2 * eps)
        floor = 0.5 - eps
    return ApproximationCertificate(
        scheme=Scheme.PROPORTIONAL, alpha=alpha, m=m, n=n, k=k, eps=eps,
        threshold=threshold, threshold_met=threshold_met, floor=floor,
    )


def threshold_asymptotic(m: int, eps: float) -> int:
    """
    ceil(4m/ε + (12/ε²)·ln(1/ε)).

    >>> threshold_asymptotic(2, 0.5)
    50
    """
    if m < 1:
        raise InvalidParams(f"m must be positive, got {m}")
    _check_eps(eps)
    return math.ceil(4 * m / eps + 12 / eps ** 2 * math.log(1 / eps))


def size_tail_bound(m: int, k: int, eps: float) -> float:
    """
    1 - exp(-(εk - (1+ε)m)² / (k(2+ε)(1+ε))), or 0 when εk <= (1+ε)m.

    Lower bound on the probability that the inflated draw keeps at most
    k - m experiments outside any fixed m-set.
    """
    if not (1 <= m <= k):
        raise InvalidParams(f"need 1 <= m <= k, got m={m}, k={k}")
    _check_eps(eps)
    slack = eps * k - (1 + eps) * m
    if slack <= 0:
        return 0.0
    return float(-math.expm1(-slack ** 2 / (k * (2 + eps) * (1 + eps))))


def ratio_asymptotic(m: int, k: int, eps: float, n: Optional[int] = None) -> ApproximationCertificate:
    """
    Certificate for inflated Bernoulli sampling and its derandomization.

    alpha = size_tail_bound^{1/m} / (1+ε); from threshold_asymptotic(m, ε)
    on the ratio is at least 1 - ε.
    """
    bound = size_tail_bound(m, k, eps)
    threshold = threshold_asymptotic(m, eps)
    return ApproximationCertificate(
        scheme=Scheme.ASYMPTOTIC, alpha=bound ** (1.0 / m) / (1.0 + eps), m=m, n=n, k=k, eps=eps,
        threshold=threshold, threshold_met=k >= threshold, floor=1.0 - eps,
    )


def g_with_reps(m: int, k: int) -> float:
    """
    g(m, k) = [(k-m)! k^m / k!]^{1/m}.

    >>> round(g_with_reps(2, 2), 6)
    1.414214

    Raises:
        InvalidParams: If m > k or m < 1
    """
    if not (1 <= m <= k):
        raise InvalidParams(f"need 1 <= m <= k, got m={m}, k={k}")
    return float(math.exp((gammaln(k - m + 1) + m * math.log(k) - gammaln(k + 1)) / m))


def with_reps_floor(m: int, k: int) -> float:
    """k! / ((k-m)! k^m) = g(m, k)^{-m}, the expected-determinant ratio of multinomial sampling."""
    return float(math.exp(gammaln(k + 1) - gammaln(k - m + 1) - m * math.log(k)))


def ratio_with_reps(m: int, k: int, eps: Optional[float] = None) -> ApproximationCertificate:
    """
    Certificate for multinomial sampling and its derandomization.

    alpha = 1/g(m, k); with eps given, reports the threshold ceil((m-1)/ε)
    from which the ratio is at least 1 - ε.
    """
    alpha = min(1.0, 1.0 / g_with_reps(m, k))
    threshold = threshold_met = floor = None
    if eps is not None:
        _check_eps(eps)
        threshold = math.ceil((m - 1) / eps)
        threshold_met = k >= (m - 1) / eps
        floor = 1.0 - eps
    return ApproximationCertificate(
        scheme=Scheme.REPETITIONS, alpha=alpha, m=m, k=k, eps=eps,
        threshold=threshold, threshold_met=threshold_met, floor=floor,
    )


def certificate_for(scheme: Scheme, m: int, n: int, k: int, eps: Optional[float] = None) -> ApproximationCertificate:
    """Certificate of a scheme; eps is required for the asymptotic scheme."""
    if scheme is Scheme.PROPORTIONAL:
        return ratio_without_reps(m, n, k, eps if eps is not None and eps < 0.5 else None)
    if scheme is Scheme.ASYMPTOTIC:
        if eps is None:
            raise InvalidParams("the asymptotic scheme needs eps")
        return ratio_asymptotic(m, k, eps, n=n)
    return ratio_with_reps(m, k, eps)
