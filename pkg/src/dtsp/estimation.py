"""Estimation of the shape ``n`` with the endpoints and threshold known.

Both estimators search a fixed interval (default ``[1e-3, 50]``) and report
when the optimum sits on its edge instead of pretending to converge.

The log-likelihood is strictly concave in ``n``: each observation contributes
``log((c+1)**n - c**n)``, a log of a difference of exponentials in ``n``,
plus a term linear in ``n``. So the score is decreasing and has at most one
root, and a score that does not change sign pins the maximizer to an edge.
"""

from __future__ import annotations

import enum
import functools
import math
import re
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy import optimize

from . import kernels
from .core import DtspParams, mean_closed_form, second_moment_closed_form
from .errors import DataOutOfSupport, DataParseError, EmptyData, InvalidInterval, NumericalFailure

__all__ = [
    "Method",
    "Status",
    "EstimationResult",
    "DEFAULT_INTERVAL",
    "DEFAULT_TOL",
    "log_likelihood",
    "score",
    "fit_mle",
    "fit_mme",
    "fit",
    "endpoints_heuristic",
    "parse_data",
    "read_data",
]

DEFAULT_INTERVAL = (1e-3, 50.0)
DEFAULT_TOL = 1e-8
MAX_ITER = 200
FLAT_MOMENT_RANGE = 1e-9
_FLAT_GRID = 41


class Method(str, enum.Enum):
    MLE = "MLE"
    MME = "MME"


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    AT_LOWER_BOUND = "AtLowerBound"
    AT_UPPER_BOUND = "AtUpperBound"
    DEGENERATE_MOMENT = "DegenerateMoment"


@dataclass(frozen=True)
class EstimationResult:
    n_hat: float
    method: Method
    status: Status
    objective: float
    iterations: int
    moment_order_used: Optional[int] = None

    @property
    def at_boundary(self) -> bool:
        return self.status in (Status.AT_LOWER_BOUND, Status.AT_UPPER_BOUND)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["status"] = self.status.value
        return d


@dataclass(frozen=True)
class _Reduced:
    """A sample collapsed to weighted power-difference offsets."""

    params: DtspParams
    offsets: np.ndarray
    weights: np.ndarray
    size: int
    branch_log_sum: float  # k_L*log(m-a) + k_R*log(b-m)


def _values(data) -> np.ndarray:
    values = getattr(data, "values", data)
    arr = np.asarray(list(values) if not isinstance(values, np.ndarray) else values)
    if arr.size == 0:
        raise EmptyData("no observations")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise DataOutOfSupport("observations must be integers")
    return arr.astype(np.int64).reshape(-1)


def _reduce(data, a, m, b) -> _Reduced:
    p = DtspParams(a, m, b, 1.0)
    y = _values(data)
    bad = (y < p.a) | (y >= p.b)
    if bad.any():
        first = int(y[np.argmax(bad)])
        raise DataOutOfSupport(f"observation {first} outside {{{p.a}, ..., {p.b - 1}}}")
    counts = np.bincount(y - p.a, minlength=p.width)
    ys = np.arange(p.a, p.b)
    offs = np.where(ys < p.m, ys - p.a, p.b - 1 - ys)
    keep = counts > 0
    k_left = int(counts[: p.m - p.a].sum())
    k_right = int(counts[p.m - p.a :].sum())
    branch = 0.0
    if k_left:
        branch += k_left * math.log(p.m - p.a)
    if k_right:
        branch += k_right * math.log(p.b - p.m)
    return _Reduced(
        p,
        offs[keep].astype(np.int64),
        counts[keep].astype(np.float64),
        int(y.size),
        branch,
    )


def _loglik(r: _Reduced, n: float) -> float:
    lp, _ = kernels.loglik_terms(r.offsets, r.weights, n)
    return lp - r.size * math.log(r.params.width) - (n - 1.0) * r.branch_log_sum


def _score(r: _Reduced, n: float) -> float:
    _, dl = kernels.loglik_terms(r.offsets, r.weights, n)
    return dl - r.branch_log_sum


def log_likelihood(data, a: int, m: int, b: int, n: float) -> float:
    """Sum of log-pmf over the observations."""
    return _loglik(_reduce(data, a, m, b), float(n))


def score(data, a: int, m: int, b: int, n: float) -> float:
    """Derivative of :func:`log_likelihood` with respect to ``n``."""
    return _score(_reduce(data, a, m, b), float(n))


def _check_interval(interval, tol):
    lo, hi = (float(v) for v in interval)
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise InvalidInterval(f"need 0 < n_lo < n_hi < inf, got [{lo}, {hi}]")
    if not tol > 0:
        raise InvalidInterval(f"tolerance must be positive, got {tol}")
    return lo, hi


def _brent(f, lo, hi, tol):
    # root tolerance tighter than the contract so moment residuals stay small
    root, info = optimize.brentq(
        f, lo, hi, xtol=tol * 1e-3, rtol=4 * np.finfo(float).eps,
        maxiter=MAX_ITER, full_output=True, disp=False,
    )
    if not info.converged:
        raise NumericalFailure(f"root finding did not converge: {info.flag}")
    return root, info.iterations


def fit_mle(data, a: int, m: int, b: int, interval=DEFAULT_INTERVAL,
            tol: float = DEFAULT_TOL) -> EstimationResult:
    lo, hi = _check_interval(interval, tol)
    r = _reduce(data, a, m, b)

    def result(n, status, iterations):
        return EstimationResult(n, Method.MLE, status, _loglik(r, n), iterations)

    if _score(r, lo) <= 0.0:
        return result(lo, Status.AT_LOWER_BOUND, 0)
    if _score(r, hi) >= 0.0:
        return result(hi, Status.AT_UPPER_BOUND, 0)
    root, iterations = _brent(lambda n: _score(r, n), lo, hi, tol)
    return result(root, Status.CONVERGED, iterations)


_MOMENT_FUNCS = {1: mean_closed_form, 2: second_moment_closed_form}


def _moment(a, m, b, order, n):
    return _MOMENT_FUNCS[order](DtspParams(a, m, b, n))


@functools.lru_cache(maxsize=256)
def _moment_is_flat(a, m, b, order, lo, hi) -> bool:
    grid = np.geomspace(lo, hi, _FLAT_GRID)
    vals = [_moment(a, m, b, order, float(n)) for n in grid]
    return max(vals) - min(vals) < FLAT_MOMENT_RANGE


def fit_mme(data, a: int, m: int, b: int, interval=DEFAULT_INTERVAL,
            tol: float = DEFAULT_TOL) -> EstimationResult:
    """Match the first moment, or the raw second moment when the first is flat in n.

    The mean does not depend on ``n`` when ``m`` sits at the centre of the
    support (``2m == a + b``), so that case falls back to ``E(Y**2)``.
    """
    lo, hi = _check_interval(interval, tol)
    r = _reduce(data, a, m, b)
    a, m, b = r.params.a, r.params.m, r.params.b
    y = _values(data).astype(np.float64)

    order = 1
    if _moment_is_flat(a, m, b, 1, lo, hi):
        order = 2
        if _moment_is_flat(a, m, b, 2, lo, hi):
            n0 = min(max(1.0, lo), hi)
            resid = _moment(a, m, b, 2, n0) - float(np.mean(y * y))
            return EstimationResult(n0, Method.MME, Status.DEGENERATE_MOMENT,
                                    resid * resid, 0, 2)
    target = float(np.mean(y ** order))

    def f(n):
        return _moment(a, m, b, order, n) - target

    def result(n, status, iterations):
        d = f(n)
        return EstimationResult(n, Method.MME, status, d * d, iterations, order)

    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0.0:
        return result(lo, Status.CONVERGED, 0)
    if f_hi == 0.0:
        return result(hi, Status.CONVERGED, 0)
    if (f_lo < 0.0) != (f_hi < 0.0):
        root, iterations = _brent(f, lo, hi, tol)
        return result(root, Status.CONVERGED, iterations)

    # no sign change: minimize the squared distance instead
    opt = optimize.minimize_scalar(
        lambda n: f(n) ** 2, bounds=(lo, hi), method="bounded",
        options={"xatol": tol, "maxiter": MAX_ITER},
    )
    candidates = [
        (f_lo * f_lo, lo, Status.AT_LOWER_BOUND),
        (f_hi * f_hi, hi, Status.AT_UPPER_BOUND),
        (float(opt.fun), float(opt.x), Status.CONVERGED),
    ]
    _, n_hat, status = min(candidates, key=lambda t: t[0])
    return result(n_hat, status, int(opt.nit))


def fit(data, a, m, b, method, **options) -> EstimationResult:
    method = Method(str(getattr(method, "value", method)).upper())
    func = fit_mle if method is Method.MLE else fit_mme
    return func(data, a, m, b, **options)


def endpoints_heuristic(data) -> tuple[int, int, int]:
    """Advisory (a, m, b): min, smallest most frequent value, max + 1."""
    y = _values(data)
    lo = int(y.min())
    counts = np.bincount(y - lo)
    return lo, lo + int(np.argmax(counts)), int(y.max()) + 1


_INT_RE = re.compile(r"^[+-]?\d+$")


def parse_data(text: str) -> list[int]:
    """Parse newline-separated integers, optionally under a single ``y`` header."""
    values = []
    header_allowed = True
    for lineno, raw in enumerate(text.splitlines(), start=1):
        token = raw.strip()
        if not token:
            continue
        if header_allowed and token == "y":
            header_allowed = False
            continue
        header_allowed = False
        if not _INT_RE.match(token):
            raise DataParseError(f"line {lineno}: not an integer: {token!r}")
        values.append(int(token))
    if not values:
        raise EmptyData("no observations")
    return values


def read_data(source) -> list[int]:
    """Read observations from a path or an open text stream."""
    if hasattr(source, "read"):
        return parse_data(source.read())
    with open(source, encoding="utf-8") as fh:
        return parse_data(fh.read())
