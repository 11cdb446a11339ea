"""Continuous two-sided power distribution TSP(a, m, b, n).

The density is a pair of power functions glued at the threshold ``m``::

    f(x) = n/(b-a) * ((x-a)/(m-a))**(n-1)   for a <= x <= m
    f(x) = n/(b-a) * ((b-x)/(b-m))**(n-1)   for m <= x <= b

``n = 1`` gives Uniform[a, b] and ``n = 2`` the triangular distribution.
When ``m == a`` (or ``m == b``) the corresponding branch is empty and is never
evaluated, so no ``0 ** (n-1)`` with a zero base is formed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, EmptySupport, NonPositiveShape, ThresholdOutOfRange

__all__ = [
    "TspParams",
    "tsp_pdf",
    "tsp_cdf",
    "tsp_survival",
    "tsp_quantile",
    "tsp_mean",
    "tsp_variance",
]


@dataclass(frozen=True)
class TspParams:
    a: float
    m: float
    b: float
    n: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.a, self.m, self.b, self.n)):
            raise DomainError("parameters must be finite")
        if not self.a < self.b:
            raise EmptySupport(f"need a < b, got a={self.a}, b={self.b}")
        if not self.a <= self.m <= self.b:
            raise ThresholdOutOfRange(f"need a <= m <= b, got m={self.m}")
        if not self.n > 0:
            raise NonPositiveShape(f"need n > 0, got n={self.n}")

    @property
    def threshold_mass(self) -> float:
        """F(m) = (m-a)/(b-a), the mass to the left of the threshold."""
        return (self.m - self.a) / (self.b - self.a)


def _left_applies(p: TspParams, x: float) -> bool:
    # tie at x == m goes right unless the right branch is empty
    return p.m > p.a and (x < p.m or p.m == p.b)


def tsp_pdf(p: TspParams, x: float) -> float:
    a, m, b, n = p.a, p.m, p.b, p.n
    if not a <= x <= b:
        raise DomainError(f"x={x} outside [{a}, {b}]")
    scale = n / (b - a)
    if _left_applies(p, x):
        return scale * ((x - a) / (m - a)) ** (n - 1)
    return scale * ((b - x) / (b - m)) ** (n - 1)


def tsp_cdf(p: TspParams, x: float) -> float:
    a, m, b, n = p.a, p.m, p.b, p.n
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    if x < m:
        return (m - a) / (b - a) * ((x - a) / (m - a)) ** n
    return 1.0 - (b - m) / (b - a) * ((b - x) / (b - m)) ** n


def tsp_survival(p: TspParams, x: float) -> float:
    """P(X >= x).

    Written branch by branch rather than as ``1 - tsp_cdf`` so the right-hand
    branch keeps full relative precision in the upper tail. The discrete
    survival function reuses exactly these expressions at integer points.
    """
    a, m, b, n = p.a, p.m, p.b, p.n
    if x <= a:
        return 1.0
    if x >= b:
        return 0.0
    if x < m:
        return 1.0 - (m - a) / (b - a) * ((x - a) / (m - a)) ** n
    return (b - m) / (b - a) * ((b - x) / (b - m)) ** n


def tsp_quantile(p: TspParams, u: float) -> float:
    """Closed-form inverse of :func:`tsp_cdf`.

    At the branch threshold ``u == (m-a)/(b-a)`` the left branch is used;
    both branches give ``m`` there. ``u == 1`` maps to ``b``.
    """
    a, m, b, n = p.a, p.m, p.b, p.n
    if not 0.0 <= u <= 1.0:
        raise DomainError(f"u={u} outside [0, 1]")
    if u == 1.0:
        return float(b)
    if m > a and u <= (m - a) / (b - a):
        x = a + (m - a) * (u * (b - a) / (m - a)) ** (1.0 / n)
    else:
        x = b - (b - m) * ((1.0 - u) * (b - a) / (b - m)) ** (1.0 / n)
    # b - (b - a) need not round back to a
    return min(max(x, a), b)


def tsp_mean(p: TspParams) -> float:
    return (p.a + (p.n - 1) * p.m + p.b) / (p.n + 1)


def tsp_variance(p: TspParams) -> float:
    a, m, b, n = p.a, p.m, p.b, p.n
    w = b - a
    lam = (m - a) / w
    mu = (b - m) / w
    return w * w * (n - 2 * (n - 1) * lam * mu) / ((n + 2) * (n + 1) ** 2)
