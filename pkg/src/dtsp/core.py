"""The discrete two-sided power distribution DTSP(a, m, b, n).

Support is ``{a, ..., b-1}``. With ``D(c) = (c+1)**n - c**n``::

    P(Y = y) = D(y - a)     / ((b-a) * (m-a)**(n-1))    a <= y <= m-1
    P(Y = y) = D(b - 1 - y) / ((b-a) * (b-m)**(n-1))    m <= y <= b-1

This is exactly the law of ``floor(X)`` for ``X ~ TSP(a, m, b, n)``, so the
discrete survival function coincides with the continuous one at integers.
When ``m == a`` or ``m == b`` one branch is empty and is never evaluated.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._pykernels import log_powdiff, powdiff
from .errors import (
    BranchCrossing,
    DomainError,
    EmptySupport,
    NonIntegerEndpoint,
    NonPositiveShape,
    OutOfSupport,
    ParameterError,
    ThresholdOutOfRange,
)
from .tsp import TspParams

__all__ = [
    "DtspParams",
    "MomentSummary",
    "validate",
    "pmf",
    "log_pmf",
    "pmf_ratio",
    "pmf_table",
    "pmf_array",
    "cdf",
    "survival",
    "hazard",
    "mode_set",
    "quantile",
    "median",
    "generalized_harmonic",
    "moments_by_summation",
    "mean_closed_form",
    "second_moment_closed_form",
    "moments",
    "reflect",
]

MODE_RTOL = 1e-12


def _as_int(name, value):
    if isinstance(value, bool):
        raise NonIntegerEndpoint(f"{name}={value!r} is not an integer")
    if isinstance(value, numbers.Integral):
        return int(value)
    if isinstance(value, numbers.Real) and math.isfinite(value) and float(value).is_integer():
        return int(value)
    raise NonIntegerEndpoint(f"{name}={value!r} is not an integer")


@dataclass(frozen=True)
class DtspParams:
    """Integer endpoints ``a < b``, integer threshold ``a <= m <= b``, shape ``n > 0``.

    Construction validates; an existing instance is always a valid parameter set.
    """

    a: int
    m: int
    b: int
    n: float

    def __post_init__(self):
        a = _as_int("a", self.a)
        m = _as_int("m", self.m)
        b = _as_int("b", self.b)
        if b <= a:
            raise EmptySupport(f"need a < b, got a={a}, b={b}")
        if not a <= m <= b:
            raise ThresholdOutOfRange(f"need a <= m <= b, got a={a}, m={m}, b={b}")
        try:
            n = float(self.n)
        except (TypeError, ValueError):
            raise NonPositiveShape(f"n={self.n!r} is not a real number") from None
        if not (n > 0 and math.isfinite(n)):
            raise NonPositiveShape(f"need finite n > 0, got n={self.n!r}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "n", n)

    @property
    def width(self) -> int:
        return self.b - self.a

    @property
    def support(self) -> range:
        return range(self.a, self.b)

    def continuous(self) -> TspParams:
        """The TSP parent with the same (a, m, b, n)."""
        return TspParams(self.a, self.m, self.b, self.n)

    def as_dict(self) -> dict:
        return {"a": self.a, "m": self.m, "b": self.b, "n": self.n}


def validate(p) -> DtspParams:
    """Coerce ``p`` (DtspParams, mapping with keys a/m/b/n, or 4-sequence)."""
    if isinstance(p, DtspParams):
        return p
    if isinstance(p, dict):
        try:
            return DtspParams(p["a"], p["m"], p["b"], p["n"])
        except KeyError as exc:
            raise ParameterError(f"missing field {exc.args[0]!r}") from None
    try:
        a, m, b, n = p
    except (TypeError, ValueError):
        raise ParameterError(f"cannot interpret {p!r} as (a, m, b, n)") from None
    return DtspParams(a, m, b, n)


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    second_moment: float
    variance: float
    index_of_dispersion: Optional[float]  # None when the mean is zero

    @classmethod
    def from_raw(cls, mean, second_moment):
        var = second_moment - mean * mean
        if var < 0.0:
            # only rounding noise can make this negative (single-point support)
            var = 0.0
        idx = var / mean if mean != 0.0 else None
        return cls(mean, second_moment, var, idx)


def _offset(p: DtspParams, y: int):
    """Return ``(c, branch_width)`` for a support point."""
    if y < p.m:
        return y - p.a, p.m - p.a
    return p.b - 1 - y, p.b - p.m


def _in_support(p: DtspParams, y) -> bool:
    return p.a <= y < p.b


def pmf(p: DtspParams, y: int) -> float:
    if not _in_support(p, y):
        return 0.0
    c, w = _offset(p, y)
    return powdiff(c, p.n) / (p.width * float(w) ** (p.n - 1))


def log_pmf(p: DtspParams, y: int) -> float:
    if not _in_support(p, y):
        raise OutOfSupport(f"y={y} outside {{{p.a}, ..., {p.b - 1}}}")
    c, w = _offset(p, y)
    return log_powdiff(c, p.n) - math.log(p.width) - (p.n - 1) * math.log(w)


def pmf_ratio(p: DtspParams, y: int) -> float:
    """P(Y = y+1) / P(Y = y) for ``y`` and ``y+1`` in the same branch."""
    if not (_in_support(p, y) and _in_support(p, y + 1)):
        raise OutOfSupport(f"y={y} and y+1 must both lie in the support")
    if y == p.m - 1:
        raise BranchCrossing(f"y={y} and y+1 straddle the threshold m={p.m}")
    n = p.n
    if y < p.m:
        c = y - p.a
        return powdiff(c + 1, n) / powdiff(c, n)
    c = p.b - 1 - y
    return powdiff(c - 1, n) / powdiff(c, n)


def pmf_table(p: DtspParams) -> list[tuple[int, float]]:
    """Whole pmf, each branch grown by the within-branch ratio from one direct value."""
    rows = []
    for lo, hi in ((p.a, p.m), (p.m, p.b)):
        if lo >= hi:
            continue
        prob = pmf(p, lo)
        rows.append((lo, prob))
        for y in range(lo, hi - 1):
            prob *= pmf_ratio(p, y)
            rows.append((y + 1, prob))
    return rows


def pmf_array(p: DtspParams) -> tuple[np.ndarray, np.ndarray]:
    ys = np.arange(p.a, p.b)
    return ys, np.array([pmf(p, int(y)) for y in ys])


def survival(p: DtspParams, y: int) -> float:
    """P(Y >= y); the continuous TSP survival expression evaluated at ``y``."""
    a, m, b, n = p.a, p.m, p.b, p.n
    if y <= a:
        return 1.0
    if y >= b:
        return 0.0
    if y < m:
        return 1.0 - (m - a) / (b - a) * ((y - a) / (m - a)) ** n
    return (b - m) / (b - a) * ((b - y) / (b - m)) ** n


def cdf(p: DtspParams, y: int) -> float:
    """P(Y <= y).

    Equal to ``1 - survival(y+1)``. The left branch is written in its direct
    form so lower-tail values keep their relative precision and
    ``cdf(m-1) == (m-a)/(b-a)`` exactly.
    """
    a, m, b, n = p.a, p.m, p.b, p.n
    if y < a:
        return 0.0
    if y >= b - 1:
        return 1.0
    if y < m:
        return (m - a) / (b - a) * ((y + 1 - a) / (m - a)) ** n
    return 1.0 - survival(p, y + 1)


def hazard(p: DtspParams, y: int) -> float:
    """P(Y = y) / P(Y >= y)."""
    if not _in_support(p, y):
        raise OutOfSupport(f"y={y} outside {{{p.a}, ..., {p.b - 1}}}")
    if y == p.b - 1:
        return 1.0
    if y >= p.m:
        c = p.b - 1 - y
        # reduces to D(c) / (c+1)**n
        return powdiff(c, p.n) / (c + 1.0) ** p.n
    return pmf(p, y) / survival(p, y)


def mode_set(p: DtspParams) -> list[int]:
    """All support points whose pmf is within a relative 1e-12 of the maximum."""
    ys, probs = pmf_array(p)
    top = probs.max()
    return [int(y) for y, q in zip(ys, probs) if q >= top * (1.0 - MODE_RTOL)]


def quantile(p: DtspParams, q: float) -> int:
    """Smallest support point ``y`` with ``cdf(y) >= q``."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q={q} outside (0, 1]")
    lo, hi = p.a, p.b - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if cdf(p, mid) >= q:
            hi = mid
        else:
            lo = mid + 1
    return lo


def median(p: DtspParams) -> int:
    return quantile(p, 0.5)


def generalized_harmonic(count: int, order: float) -> float:
    """H_count^(order) = sum_{k=1}^{count} k**(-order); 0 for an empty sum."""
    if count <= 0:
        return 0.0
    k = np.arange(1, count + 1, dtype=np.float64)
    return float(np.sum(k ** (-order)))


def moments_by_summation(p: DtspParams) -> MomentSummary:
    ys = range(p.a, p.b)
    probs = [pmf(p, y) for y in ys]
    mean = math.fsum(y * q for y, q in zip(ys, probs))
    second = math.fsum(y * y * q for y, q in zip(ys, probs))
    return MomentSummary.from_raw(mean, second)


def mean_closed_form(p: DtspParams) -> float:
    a, m, b, n = p.a, p.m, p.b, p.n
    left_w, right_w, width = m - a, b - m, b - a
    total = 0.0
    if left_w > 0:
        h = generalized_harmonic(left_w - 1, -n)
        total += ((m - 1) * float(left_w) ** n - h) / (width * float(left_w) ** (n - 1))
    if right_w > 0:
        h = generalized_harmonic(right_w - 1, -n)
        total += (m * float(right_w) ** n + h) / (width * float(right_w) ** (n - 1))
    return total


def second_moment_closed_form(p: DtspParams) -> float:
    a, m, b, n = p.a, p.m, p.b, p.n
    left_w, right_w, width = m - a, b - m, b - a
    total = 0.0
    if left_w > 0:
        h0 = generalized_harmonic(left_w - 1, -n)
        h1 = generalized_harmonic(left_w - 1, -n - 1)
        num = (m - 1) ** 2 * float(left_w) ** n - (2 * a - 1) * h0 - 2 * h1
        total += num / (width * float(left_w) ** (n - 1))
    if right_w > 0:
        h0 = generalized_harmonic(right_w - 1, -n)
        h1 = generalized_harmonic(right_w - 1, -n - 1)
        num = m * m * float(right_w) ** n + (2 * b - 1) * h0 - 2 * h1
        total += num / (width * float(right_w) ** (n - 1))
    return total


def moments(p: DtspParams) -> MomentSummary:
    return MomentSummary.from_raw(mean_closed_form(p), second_moment_closed_form(p))


def reflect(p: DtspParams) -> DtspParams:
    """Mirror the support: ``pmf(reflect(p), a+b-1-y) == pmf(p, y)``."""
    return DtspParams(p.a, p.a + p.b - p.m, p.b, p.n)
