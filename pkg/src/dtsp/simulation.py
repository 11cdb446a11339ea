"""Monte-Carlo study of the shape estimators.

For every (method, sample size) cell, ``replicates`` samples are drawn from
the true distribution, each is fitted, and the estimates are summarized by
mean, bias, MSE, variance (all with the 1/k convention) and the share of
estimates inside ``mean +/- 1.96 * sd`` of the pooled estimates.

Replicate ``r`` of sample size ``k`` for method ``j`` (MLE=0, MME=1) draws
from ``RngState(master_seed, substream_id(j, k, r))``. Cells and replicates
can therefore run in any order, or in parallel, with identical results.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

from .core import DtspParams
from .errors import ConfigError, DtspError, ParameterError
from .estimation import DEFAULT_INTERVAL, DEFAULT_TOL, Method, fit
from .sampling import RngState, sample_many, substream_id

__all__ = [
    "StudyConfig",
    "CellResult",
    "StudyReport",
    "PUBLISHED_TABLES",
    "criteria",
    "ci_coverage",
    "run_study",
    "render_report",
    "parse_report",
    "compare_published",
    "CSV_COLUMNS",
]

METHOD_INDEX = {Method.MLE: 0, Method.MME: 1}
CI_Z = 1.96
CSV_COLUMNS = [
    "method",
    "sample_size",
    "mean_estimate",
    "bias",
    "mse",
    "variance",
    "ci_coverage_percent",
    "boundary_hits",
]
ROW_LABELS = [
    ("E(n̂)", "mean_estimate"),
    ("Bias(n̂)", "bias"),
    ("MSE(n̂)", "mse"),
    ("Var(n̂)", "variance"),
    ("% of n in CI", "ci_coverage_percent"),
]

# Published simulation results for DTSP(-10, 0, 10, n), 1000 replicates.
# (method, size) -> (mean, bias, mse, variance, ci%)
PUBLISHED_TABLES = {
    0.5: {
        ("MLE", 25): (0.6087, -0.1087, 0.0360, 0.0242, 95.30),
        ("MME", 25): (0.4224, 0.0776, 0.0190, 0.0130, 94.40),
        ("MLE", 50): (0.5950, -0.0950, 0.0197, 0.0107, 95.40),
        ("MME", 50): (0.4095, 0.0905, 0.0133, 0.0051, 95.60),
        ("MLE", 100): (0.5868, -0.0868, 0.0131, 0.0056, 94.60),
        ("MME", 100): (0.4052, 0.0948, 0.0114, 0.0024, 94.90),
    },
    3.5: {
        ("MLE", 25): (1.7344, 1.7656, 3.2829, 0.1656, 95.70),
        ("MME", 25): (3.5534, -0.0537, 0.6981, 0.6959, 95.70),
        ("MLE", 50): (1.9604, 1.5396, 2.4924, 0.1222, 95.50),
        ("MME", 50): (3.4511, 0.0489, 0.3088, 0.3067, 95.80),
        ("MLE", 100): (2.1736, 1.3264, 1.8553, 0.0960, 94.90),
        ("MME", 100): (3.3887, 0.1113, 0.1614, 0.1492, 96.00),
    },
}


def _fmt12(x) -> str:
    if isinstance(x, (int, str)):
        return str(x)
    return f"{x:.12g}"


@dataclass(frozen=True)
class StudyConfig:
    params: DtspParams
    sample_sizes: tuple = (25, 50, 100)
    replicates: int = 1000
    methods: tuple = (Method.MLE, Method.MME)
    master_seed: int = 0
    interval: tuple = DEFAULT_INTERVAL
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        sizes = tuple(int(k) for k in self.sample_sizes)
        if not sizes:
            raise ConfigError("at least one sample size is required")
        if any(k < 1 for k in sizes):
            raise ConfigError(f"sample sizes must be positive, got {list(sizes)}")
        if len(set(sizes)) != len(sizes):
            raise ConfigError(f"sample sizes must be distinct, got {list(sizes)}")
        if int(self.replicates) < 2:
            raise ConfigError(f"replicates must be >= 2 for a variance, got {self.replicates}")
        try:
            methods = tuple(Method(str(getattr(m, "value", m)).upper()) for m in self.methods)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if not methods:
            raise ConfigError("at least one method is required")
        if len(set(methods)) != len(methods):
            raise ConfigError("methods must be distinct")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigError(f"master_seed must be an unsigned 64-bit integer, got {self.master_seed}")
        object.__setattr__(self, "sample_sizes", sizes)
        object.__setattr__(self, "replicates", int(self.replicates))
        object.__setattr__(self, "methods", methods)
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "interval", tuple(float(v) for v in self.interval))
        object.__setattr__(self, "tol", float(self.tol))

    def as_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "sample_sizes": list(self.sample_sizes),
            "replicates": self.replicates,
            "methods": [m.value for m in self.methods],
            "master_seed": self.master_seed,
            "interval": list(self.interval),
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StudyConfig":
        return cls(
            params=DtspParams(**d["params"]),
            sample_sizes=tuple(d["sample_sizes"]),
            replicates=d["replicates"],
            methods=tuple(d["methods"]),
            master_seed=d["master_seed"],
            interval=tuple(d["interval"]),
            tol=d["tol"],
        )


@dataclass(frozen=True)
class CellResult:
    method: str
    sample_size: int
    mean_estimate: float
    bias: float
    mse: float
    variance: float
    ci_coverage_percent: float
    boundary_hits: int
    failures: int = 0


@dataclass
class StudyReport:
    config: StudyConfig
    cells: list
    runtime_seconds: Optional[float] = field(default=None, compare=False)

    def cell(self, method, sample_size) -> CellResult:
        method = str(getattr(method, "value", method)).upper()
        for c in self.cells:
            if c.method == method and c.sample_size == sample_size:
                return c
        raise KeyError((method, sample_size))


def criteria(estimates: Sequence[float], true_value: float):
    """(mean, bias, mse, variance) of replicate estimates, 1/k normalized."""
    est = [float(t) for t in estimates]
    k = len(est)
    if k < 2:
        raise ConfigError("need at least 2 estimates")
    mean = math.fsum(est) / k
    bias = math.fsum(t - true_value for t in est) / k
    mse = math.fsum((t - true_value) ** 2 for t in est) / k
    var = math.fsum((t - mean) ** 2 for t in est) / k
    return mean, bias, mse, var


def ci_coverage(estimates: Sequence[float]) -> float:
    """Percentage of estimates inside ``mean +/- 1.96*sd`` of the estimates.

    This measures how normal the estimates look, not the coverage of a
    confidence interval in the usual sense.
    """
    est = [float(t) for t in estimates]
    k = len(est)
    if k < 2:
        raise ConfigError("need at least 2 estimates")
    if min(est) == max(est):
        return 100.0
    mean = math.fsum(est) / k
    sd = math.sqrt(math.fsum((t - mean) ** 2 for t in est) / k)
    lo, hi = mean - CI_Z * sd, mean + CI_Z * sd
    inside = sum(1 for t in est if lo <= t <= hi)
    return 100.0 * inside / k


def _run_replicates(config: StudyConfig, method: Method, size: int, start: int, stop: int):
    """Fit replicates ``start..stop-1`` of one cell -> list of (n_hat, boundary) or None."""
    p = config.params
    j = METHOD_INDEX[method]
    out = []
    for r in range(start, stop):
        rng = RngState(config.master_seed, substream_id(j, size, r))
        sample = sample_many(p, size, rng)
        try:
            res = fit(sample, p.a, p.m, p.b, method, interval=config.interval, tol=config.tol)
        except DtspError:
            out.append(None)
            continue
        out.append((res.n_hat, res.at_boundary))
    return out


def _aggregate(config: StudyConfig, method: Method, size: int, fits) -> CellResult:
    ok = [f for f in fits if f is not None]
    failures = len(fits) - len(ok)
    est = [f[0] for f in ok]
    if len(est) < 2:
        nan = float("nan")
        return CellResult(method.value, size, nan, nan, nan, nan, nan, 0, failures)
    mean, bias, mse, var = criteria(est, config.params.n)
    return CellResult(
        method.value, size, mean, bias, mse, var, ci_coverage(est),
        sum(1 for f in ok if f[1]), failures,
    )


def run_study(config: StudyConfig, workers: int = 1, chunk: int = 250) -> StudyReport:
    """Run every cell of the study; ``workers > 1`` uses a process pool."""
    t0 = time.perf_counter()
    cells = [(m, k) for m in config.methods for k in config.sample_sizes]
    jobs = []
    for m, k in cells:
        for start in range(0, config.replicates, chunk):
            jobs.append((m, k, start, min(start + chunk, config.replicates)))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_replicates, config, *job) for job in jobs]
            parts = [f.result() for f in futures]
    else:
        parts = [_run_replicates(config, *job) for job in jobs]

    # reassemble in replicate order before aggregating
    fits = {cell: [] for cell in cells}
    for (m, k, _, _), part in zip(jobs, parts):
        fits[(m, k)].extend(part)
    results = [_aggregate(config, m, k, fits[(m, k)]) for m, k in cells]
    return StudyReport(config, results, time.perf_counter() - t0)


def _render_csv(report: StudyReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.cells:
        writer.writerow([_fmt12(getattr(c, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def _render_json(report: StudyReport, include_runtime: bool) -> str:
    doc = {
        "config": report.config.as_dict(),
        "cells": [asdict(c) for c in report.cells],
    }
    if include_runtime and report.runtime_seconds is not None:
        doc["runtime_seconds"] = report.runtime_seconds
    return json.dumps(doc, indent=2) + "\n"


def _render_markdown(report: StudyReport) -> str:
    cfg = report.config
    p = cfg.params
    lines = [
        f"Results of simulation from DTSP(a, m, b, n) for a = {p.a}, m = {p.m}, "
        f"b = {p.b}, n = {_fmt12(p.n)} ({cfg.replicates} replicates, seed {cfg.master_seed})",
        "",
    ]
    cols = [(k, m.value) for k in cfg.sample_sizes for m in cfg.methods]
    lines.append("| Estimate | " + " | ".join(f"k={k} {m}" for k, m in cols) + " |")
    lines.append("|---|" + "---|" * len(cols))
    for label, attr in ROW_LABELS:
        vals = [_fmt12(getattr(report.cell(m, k), attr)) for k, m in cols]
        lines.append(f"| {label} | " + " | ".join(vals) + " |")
    hits = [(k, m, report.cell(m, k)) for k, m in cols]
    flagged = [f"k={k} {m}: {c.boundary_hits}" for k, m, c in hits if c.boundary_hits]
    if flagged:
        lines.append("")
        lines.append("Boundary hits: " + ", ".join(flagged))
    failed = [f"k={k} {m}: {c.failures}" for k, m, c in hits if c.failures]
    if failed:
        lines.append("Failed fits: " + ", ".join(failed))
    return "\n".join(lines) + "\n"


def render_report(report: StudyReport, fmt: str = "markdown", include_runtime: bool = False) -> str:
    """Render as ``csv``, ``json`` or ``markdown``.

    Runtime is left out unless asked for, so identical runs render identically.
    """
    if fmt == "csv":
        return _render_csv(report)
    if fmt == "json":
        return _render_json(report, include_runtime)
    if fmt in ("markdown", "md"):
        return _render_markdown(report)
    raise ConfigError(f"unknown format {fmt!r}")


def parse_report(text: str, fmt: str = "json"):
    """Inverse of :func:`render_report` for ``json`` (a StudyReport) and ``csv`` (cells)."""
    if fmt == "json":
        doc = json.loads(text)
        cells = [CellResult(**c) for c in doc["cells"]]
        return StudyReport(StudyConfig.from_dict(doc["config"]), cells, doc.get("runtime_seconds"))
    if fmt == "csv":
        rows = list(csv.DictReader(io.StringIO(text)))
        if rows and list(rows[0].keys()) != CSV_COLUMNS:
            raise ConfigError("unexpected CSV header")
        return [
            CellResult(
                r["method"], int(r["sample_size"]), float(r["mean_estimate"]), float(r["bias"]),
                float(r["mse"]), float(r["variance"]), float(r["ci_coverage_percent"]),
                int(r["boundary_hits"]),
            )
            for r in rows
        ]
    raise ConfigError(f"cannot parse format {fmt!r}")


def compare_published(report: StudyReport) -> str:
    """Side-by-side markdown table against the published cells, when they exist."""
    p = report.config.params
    if (p.a, p.m, p.b) != (-10, 0, 10) or p.n not in PUBLISHED_TABLES:
        raise ParameterError("no published reference for these parameters")
    ref = PUBLISHED_TABLES[p.n]
    lines = [
        "| cell | E(n̂) ours | E(n̂) published | MSE ours | MSE published | CI% ours | CI% published |",
        "|---|---|---|---|---|---|---|",
    ]
    for c in report.cells:
        key = (c.method, c.sample_size)
        if key not in ref:
            continue
        mean, _, mse, _, ci = ref[key]
        lines.append(
            f"| k={c.sample_size} {c.method} | {c.mean_estimate:.4f} | {mean:.4f} | "
            f"{c.mse:.4f} | {mse:.4f} | {c.ci_coverage_percent:.2f} | {ci:.2f} |"
        )
    return "\n".join(lines) + "\n"
