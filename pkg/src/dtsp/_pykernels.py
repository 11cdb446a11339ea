"""Pure-Python/numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them operation for
operation so both backends produce identical integers from identical uniforms.

Every pmf term of the distribution is a power difference ``(c+1)**n - c**n``
with an integer offset ``c >= 0``:

* left branch, ``y < m``:  ``c = y - a``
* right branch, ``y >= m``: ``c = b - 1 - y``
"""

import math

import numpy as np

# naive subtraction is used at or below this offset
NAIVE_OFFSET_MAX = 8
# below this shape the naive form cancels badly even for small offsets
NAIVE_SHAPE_MIN = 0.25


def powdiff(c, n):
    """(c+1)**n - c**n, cancellation-safe for large ``c``."""
    if c == 0:
        return 1.0
    if c <= NAIVE_OFFSET_MAX and n >= NAIVE_SHAPE_MIN:
        return (c + 1.0) ** n - float(c) ** n
    return float(c) ** n * math.expm1(n * math.log1p(1.0 / c))


def log_powdiff(c, n):
    if c == 0:
        return 0.0
    if c <= NAIVE_OFFSET_MAX and n >= NAIVE_SHAPE_MIN:
        return math.log((c + 1.0) ** n - float(c) ** n)
    return n * math.log(c) + math.log(math.expm1(n * math.log1p(1.0 / c)))


def dlog_powdiff(c, n):
    """d/dn log((c+1)**n - c**n), with 0*log(0) taken as 0."""
    if c == 0:
        return 0.0
    g = math.log1p(1.0 / c)
    return math.log(c) + g / -math.expm1(-n * g)


def loglik_terms(offsets, weights, n):
    """Weighted sums of log power differences and their n-derivatives.

    Returns ``(sum w*log D(c), sum w*dlog D(c)/dn)`` over paired arrays.
    """
    c = np.asarray(offsets, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    pos = c > 0
    cp = c[pos]
    wp = w[pos]
    if cp.size == 0:
        return 0.0, 0.0
    g = np.log1p(1.0 / cp)
    logc = np.log(cp)
    naive = (cp <= NAIVE_OFFSET_MAX) & (n >= NAIVE_SHAPE_MIN)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp_safe = n * logc + np.log(np.expm1(n * g))
        lp_naive = np.log((cp + 1.0) ** n - cp**n)
    lp = np.where(naive, lp_naive, lp_safe)
    dl = logc + g / -np.expm1(-n * g)
    return float(np.dot(wp, lp)), float(np.dot(wp, dl))


def floor_quantile(us, a, m, b, n):
    """Map uniforms through the continuous TSP quantile and take the floor.

    Results are clamped to ``[a, b-1]``; the clamp only fires on rounding at
    ``u -> 1``.
    """
    u = np.asarray(us, dtype=np.float64)
    a = float(a)
    m = float(m)
    b = float(b)
    inv = 1.0 / n
    x = np.empty_like(u)
    if m > a:
        left = u <= (m - a) / (b - a)
        x[left] = a + (m - a) * (u[left] * (b - a) / (m - a)) ** inv
    else:
        left = np.zeros(u.shape, dtype=bool)
    right = ~left
    if m < b:
        x[right] = b - (b - m) * ((1.0 - u[right]) * (b - a) / (b - m)) ** inv
    else:
        x[right] = b
    y = np.floor(x)
    np.clip(y, a, b - 1.0, out=y)
    return y.astype(np.int64)
