"""
Elementary symmetric polynomials and univariate polynomial helpers.

e_r(x) is the coefficient of y^r in Π(1 + x_i y); the O(t·r) dynamic program
below expands that product one factor at a time. All additions are of
nonnegative terms for nonnegative weights, so there is no cancellation.

Coefficient extraction from point values comes in two flavours:
interpolate() runs Newton divided differences in exact rational arithmetic on
real nodes (used for low-degree determinant polynomials), and
coefficients_on_circle() inverts values at equally spaced complex nodes with
a discrete Fourier transform (used for the degree-n polynomials of the
conditional expectations). Accuracy of the real-node route degrades quickly
with the degree; keep it to degree m.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from app.core.exceptions import DegenerateNodes, InvalidOrder


@dataclass(frozen=True)
class PolynomialCoeffs:
    """
    Dense coefficient list of a univariate real polynomial.

    coeffs[r] is the coefficient of y^r. Trailing zeros are allowed.
    """
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not all(np.isfinite(self.coeffs)):
            raise ValueError("polynomial coefficients must be finite")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, r: int) -> float:
        return self.coeffs[r] if 0 <= r < len(self.coeffs) else 0.0

    def __call__(self, t):
        """Horner evaluation."""
        value = 0.0 * t
        for c in reversed(self.coeffs):
            value = value * t + c
        return value

    def window_sum(self, lo: int, hi: int) -> float:
        """Sum of coefficients lo..hi inclusive."""
        return float(sum(self[r] for r in range(max(lo, 0), hi + 1)))


def elem_sym_prefix(weights: Sequence[float], r_max: int) -> np.ndarray:
    """
    Elementary symmetric polynomials e_0..e_{r_max} of the weights.

    Parameters:
        weights: t nonnegative reals
        r_max: Highest order needed, 0 <= r_max <= t

    Returns:
        Array of length r_max + 1

    Raises:
        InvalidOrder: If r_max is outside [0, t]
    """
    weights = np.asarray(weights, dtype=float).ravel()
    if r_max < 0 or r_max > weights.size:
        raise InvalidOrder(f"order {r_max} outside [0, {weights.size}]")
    e = np.zeros(r_max + 1)
    e[0] = 1.0
    for x in weights:
        e[1:] += x * e[:-1]
    return e


def elem_sym(weights: Sequence[float], r: int) -> float:
    """
    e_r(weights): sum over size-r subsets of the product of their weights.

    Raises:
        InvalidOrder: If r is outside [0, len(weights)]
    """
    return float(elem_sym_prefix(weights, r)[r])


def interpolate(points: Sequence[tuple]) -> PolynomialCoeffs:
    """
    Interpolating polynomial through (t, value) pairs.

    Newton divided differences are computed with Fractions, so the result is
    the exact interpolant of the given values; floats enter exactly and only
    the final coefficients are rounded back to floats.

    Parameters:
        points: d + 1 pairs with pairwise distinct abscissae

    Returns:
        Monomial coefficients of the degree <= d interpolant

    Raises:
        DegenerateNodes: If two abscissae coincide
    """
    nodes = [Fraction(t) for t, _ in points]
    if len(set(nodes)) != len(nodes):
        raise DegenerateNodes("interpolation abscissae must be pairwise distinct")
    table = [Fraction(v) for _, v in points]
    d = len(nodes) - 1

    # table[j] becomes the divided difference f[t_0, ..., t_j]
    for level in range(1, d + 1):
        for j in range(d, level - 1, -1):
            table[j] = (table[j] - table[j - 1]) / (nodes[j] - nodes[j - level])

    # Expand c_0 + (t - t_0)(c_1 + (t - t_1)(c_2 + ...)) from the inside out
    poly = [table[d]]
    for j in range(d - 1, -1, -1):
        shifted = [Fraction(0)] + poly
        for r in range(len(poly)):
            shifted[r] -= nodes[j] * poly[r]
        shifted[0] += table[j]
        poly = shifted
    return PolynomialCoeffs(tuple(float(c) for c in poly))


def circle_nodes(degree: int, radius: float) -> np.ndarray:
    """degree + 1 equally spaced nodes on |t| = radius, rotated off the real axis."""
    count = degree + 1
    theta0 = np.pi / (2 * count)
    return radius * np.exp(1j * (theta0 + 2 * np.pi * np.arange(count) / count))


def coefficients_on_circle(evaluate: Callable[[complex], complex], degree: int, radius: float) -> PolynomialCoeffs:
    """
    Coefficients of a real polynomial of known degree bound from values on a circle.

    The rotation keeps every node away from the negative real axis, where
    the rational forms evaluated by the callers have their poles.

    Parameters:
        evaluate: Callable returning p(t) for complex t
        degree: Upper bound on deg p
        radius: Circle radius; choose it with extraction_radius()

    Returns:
        Real parts of the recovered coefficients
    """
    nodes = circle_nodes(degree, radius)
    values = np.array([evaluate(t) for t in nodes], dtype=complex)
    count = degree + 1
    theta0 = np.pi / (2 * count)
    r = np.arange(count)
    coeffs = np.fft.fft(values) / count / (radius ** r * np.exp(1j * r * theta0))
    return PolynomialCoeffs(tuple(coeffs.real))


def extraction_radius(
    proxy: Sequence[float], lo: int, hi: int, log_noise: Optional[Callable[[np.ndarray], np.ndarray]] = None
) -> float:
    """
    Radius that makes coefficients lo..hi of a positive polynomial recoverable.

    Minimizes the round-off estimate (Σ_j p_j ρ^j + ν(ρ))(Σ_{lo..hi} ρ^{-j})
    over a logarithmic grid of radii, where p is a nonnegative proxy for the
    coefficient profile and ν is the evaluation error of the callback in units
    of the unit roundoff. Without ν a window that holds the only nonzero
    proxy entries gives a flat cost; ties go to the radius closest to 1.

    Parameters:
        proxy: Upper bounds on the coefficient magnitudes
        lo, hi: Coefficient window
        log_noise: Optional log ν, evaluated on an array of log ρ
    """
    p = np.asarray(proxy, dtype=float)
    window = np.arange(max(lo, 0), min(hi, p.size - 1) + 1)
    if window.size == 0 or not np.any(p[window] > 0):
        return 1.0
    with np.errstate(divide="ignore"):
        log_p = np.log(p)
    degrees = np.arange(p.size)
    # ρ^degree must stay inside double range
    bound = min(30.0, 600.0 / max(p.size - 1, 1))
    grid = np.linspace(-bound, bound, 481)
    cost = logsumexp(log_p + np.outer(grid, degrees), axis=1)
    if log_noise is not None:
        cost = np.logaddexp(cost, log_noise(grid))
    cost = cost + logsumexp(-np.outer(grid, window), axis=1)
    near = np.flatnonzero(cost <= cost.min() + 1e-12)
    return float(np.exp(grid[near[np.argmin(np.abs(grid[near]))]]))
