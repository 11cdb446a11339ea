"""One test per acceptance criterion, each at its stated tolerance.

Every test records a single PASS/FAIL line (shown in the "acceptance criteria"
section of the pytest summary) before asserting.
"""

import io
import math
import time
from contextlib import redirect_stdout

import numpy as np
import pytest
from scipy import stats

from dtsp import core
from dtsp.cli import main
from dtsp.core import DtspParams
from dtsp.estimation import Method, Status, fit_mle, fit_mme, log_likelihood, score
from dtsp.sampling import RngState, sample_many
from dtsp.simulation import PUBLISHED_TABLES, StudyConfig, compare_published, run_study
from dtsp.tsp import tsp_mean, tsp_survival, tsp_variance

SIZES = (25, 50, 100)
STUDY_SEED = 7
TABLE_PARAMS = {0.5: DtspParams(-10, 0, 10, 0.5), 3.5: DtspParams(-10, 0, 10, 3.5)}


def _fmt_worst(name, value):
    return f"{name}={value:.2e}"


def _rel(got, want):
    """Relative error, falling back to absolute where the reference is exactly zero."""
    return abs(got - want) / abs(want) if want != 0.0 else abs(got)


def test_c1_normalization_and_chain_identities(grid, record):
    t0 = time.perf_counter()
    worst_norm = worst_cdf = worst_surv = worst_haz = 0.0
    for p in grid:
        ys, probs = core.pmf_array(p)
        worst_norm = max(worst_norm, abs(math.fsum(probs) - 1.0))
        running = 0.0
        for y, q in zip(ys.tolist(), probs.tolist()):
            running += q
            worst_cdf = max(worst_cdf, abs(core.cdf(p, y) - running))
            s = core.survival(p, y)
            worst_surv = max(worst_surv, abs(s - (1.0 - core.cdf(p, y - 1))))
            worst_haz = max(worst_haz, abs(core.hazard(p, y) - q / s))
    elapsed = time.perf_counter() - t0
    worst = max(worst_norm, worst_cdf, worst_surv, worst_haz)
    ok = len(grid) >= 200 and worst < 1e-12 and elapsed < 10
    record(
        "C1 normalization and chain identities",
        ok,
        f"{len(grid)} combos, {_fmt_worst('sum', worst_norm)}, {_fmt_worst('cdf', worst_cdf)}, "
        f"{_fmt_worst('survival', worst_surv)}, {_fmt_worst('hazard', worst_haz)}, {elapsed:.1f}s",
    )
    assert ok


def test_c2_closed_form_moments(grid, record):
    worst_mean = worst_m2 = 0.0
    for p in grid:
        summed = core.moments_by_summation(p)
        mean = core.mean_closed_form(p)
        m2 = core.second_moment_closed_form(p)
        worst_mean = max(worst_mean, _rel(mean, summed.mean))
        worst_m2 = max(worst_m2, _rel(m2, summed.second_moment))
    tri = DtspParams(0, 2, 4, 2)
    exact = (core.mean_closed_form(tri), core.second_moment_closed_form(tri), core.moments(tri).variance)
    ok = worst_mean < 1e-10 and worst_m2 < 1e-10 and exact == (1.5, 3.0, 0.75)
    record(
        "C2 closed-form moments vs summation",
        ok,
        f"worst rel mean {worst_mean:.2e}, E(Y^2) {worst_m2:.2e}; DTSP(0,2,4,2) -> {exact}",
    )
    assert ok


def test_c3_survival_equals_continuous(grid, record):
    worst = 0.0
    threshold_exact = True
    for p in grid:
        parent = p.continuous()
        for y in range(p.a, p.b + 1):
            worst = max(worst, abs(core.survival(p, y) - tsp_survival(parent, y)))
        if p.m < p.b:
            threshold_exact &= core.survival(p, p.m) == (p.b - p.m) / (p.b - p.a)
    ok = worst <= 1e-15 and threshold_exact
    record(
        "C3 discrete survival equals continuous survival",
        ok,
        f"max |diff| {worst:.1e}, survival(m) exact: {threshold_exact}",
    )
    assert ok


def test_c4_mean_bounds_and_variance_census(grid, record):
    mean_violations = []
    var_lower = var_upper = 0
    for p in grid:
        parent = p.continuous()
        summary = core.moments(p)
        mx, vx = tsp_mean(parent), tsp_variance(parent)
        if not mx - 1 < summary.mean < mx:
            mean_violations.append(p)
        if not vx < summary.variance:
            var_lower += 1
        if not summary.variance <= vx + 0.25:
            var_upper += 1
    ok = not mean_violations
    record(
        "C4 mean bounds (asserted), variance bounds (census only)",
        ok,
        f"mean violations {len(mean_violations)}/{len(grid)}; variance census: "
        f"Var_X < Var_Y fails {var_lower}, Var_Y <= Var_X + 0.25 fails {var_upper}",
    )
    assert ok


def test_c5_sampler_law(record):
    t0 = time.perf_counter()
    draws = 1_000_000
    details = []
    ok = True
    for seed, p in ((50, DtspParams(0, 2, 4, 2)), (51, DtspParams(-10, 0, 10, 0.5))):
        sample = sample_many(p, draws, RngState(seed))
        ys, probs = core.pmf_array(p)
        counts = np.bincount(sample.values - p.a, minlength=p.width)
        dev = float(np.max(np.abs(counts / draws - probs)))
        chi2 = float(np.sum((counts - draws * probs) ** 2 / (draws * probs)))
        crit = float(stats.chi2.ppf(0.999, p.width - 1))
        ok &= dev < 0.005 and chi2 < crit
        details.append(f"({p.a},{p.m},{p.b},{p.n}) max dev {dev:.1e}, chi2 {chi2:.1f} < {crit:.1f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 30
    record("C5 sampler law", ok, "; ".join(details) + f"; {elapsed:.1f}s")
    assert ok


@pytest.fixture(scope="module")
def studies():
    out = {}
    for n, p in TABLE_PARAMS.items():
        out[n] = run_study(StudyConfig(p, SIZES, 1000, (Method.MLE, Method.MME), STUDY_SEED))
    return out


def _cell(report, method, k):
    return report.cell(method, k)


def test_c6_table_one(studies, record):
    rep = studies[0.5]
    ref = PUBLISHED_TABLES[0.5]
    misses = []
    for k in SIZES:
        mle, mme = _cell(rep, "MLE", k), _cell(rep, "MME", k)
        mme_ref, mle_ref = ref[("MME", k)], ref[("MLE", k)]
        if abs(mme.mean_estimate - mme_ref[0]) > 0.05:
            misses.append(f"MME k={k} mean {mme.mean_estimate:.4f} vs {mme_ref[0]}")
        if not mme_ref[2] / 1.5 <= mme.mse <= mme_ref[2] * 1.5:
            misses.append(f"MME k={k} MSE {mme.mse:.4f} vs {mme_ref[2]}")
        if abs(mle.mean_estimate - mle_ref[0]) > 0.08:
            misses.append(f"MLE k={k} mean {mle.mean_estimate:.4f} vs {mle_ref[0]}")
        for c in (mle, mme):
            if not 93.0 <= c.ci_coverage_percent <= 97.0:
                misses.append(f"{c.method} k={k} CI {c.ci_coverage_percent:.1f}")
    runtime = rep.runtime_seconds
    if runtime >= 300:
        misses.append(f"runtime {runtime:.0f}s")
    ok = not misses
    record("C6 table reproduction n=0.5", ok,
           f"{runtime:.1f}s" + ("" if ok else "; misses: " + "; ".join(misses)))
    assert ok, "\n" + compare_published(rep)


def test_c7_table_two(studies, record):
    rep = studies[3.5]
    ref = PUBLISHED_TABLES[3.5]
    misses = []
    for k in SIZES:
        mme, mme_ref = _cell(rep, "MME", k), ref[("MME", k)]
        if abs(mme.mean_estimate - mme_ref[0]) > 0.15:
            misses.append(f"MME k={k} mean {mme.mean_estimate:.4f} vs {mme_ref[0]}")
        if not mme_ref[2] / 1.5 <= mme.mse <= mme_ref[2] * 1.5:
            misses.append(f"MME k={k} MSE {mme.mse:.4f} vs {mme_ref[2]}")
    mle_mse = [_cell(rep, "MLE", k).mse for k in SIZES]
    if not mle_mse[0] > mle_mse[1] > mle_mse[2]:
        misses.append(f"MLE MSE not decreasing {mle_mse}")
    mle100 = _cell(rep, "MLE", 100).mean_estimate
    if not 2.8 <= mle100 <= 4.2:
        misses.append(f"MLE k=100 mean {mle100:.4f} outside [2.8, 4.2]")
    # the published MLE column is non-binding; its divergence must show up in the comparison
    comparison = compare_published(rep)
    divergent = [k for k in SIZES if abs(_cell(rep, "MLE", k).mean_estimate - ref[("MLE", k)][0]) > 0.15]
    for k in divergent:
        if f"| k={k} MLE | " not in comparison:
            misses.append(f"MLE k={k} divergence missing from comparison")
    ok = not misses
    record(
        "C7 table reproduction n=3.5 (MLE column non-binding)",
        ok,
        f"MLE means {[round(_cell(rep, 'MLE', k).mean_estimate, 4) for k in SIZES]}, "
        f"divergent from published at k={divergent}"
        + ("" if ok else "; misses: " + "; ".join(misses)),
    )
    assert ok, "\n" + comparison


def test_c8_estimator_unit_truths(record):
    data = [0, 1, 2, 3]
    mle = fit_mle(data, 0, 2, 4)
    mme = fit_mme(data, 0, 2, 4)
    fixtures = [
        ((0, 2, 4), data),
        ((0, 2, 4), [0, 0, 1, 2, 3, 3, 3, 1]),
        ((-10, 0, 10), list(sample_many(DtspParams(-10, 0, 10, 0.5), 60, RngState(80)))),
        ((0, 3, 12), list(sample_many(DtspParams(0, 3, 12, 1.8), 200, RngState(81)))),
        ((0, 30, 30), list(sample_many(DtspParams(0, 30, 30, 0.7), 150, RngState(82)))),
    ]
    worst = 0.0
    for abc, xs in fixtures:
        for n in (0.2, 1.0, 2.5, 8.0):
            h = 1e-5 * n
            fd = (log_likelihood(xs, *abc, n + h) - log_likelihood(xs, *abc, n - h)) / (2 * h)
            s = score(xs, *abc, n)
            # at a stationary point the difference quotient is pure rounding noise
            err = abs(s - fd) if abs(fd) < 1e-7 else abs(s - fd) / abs(fd)
            worst = max(worst, err)
    ok = (
        abs(mle.n_hat - 1.0) <= 1e-6
        and mle.status is Status.CONVERGED
        and abs(mme.n_hat - 1.0) <= 1e-6
        and mme.moment_order_used == 2
        and worst < 1e-6
    )
    record(
        "C8 estimator unit truths",
        ok,
        f"MLE {mle.n_hat:.9f}, MME {mme.n_hat:.9f} (order {mme.moment_order_used}), "
        f"worst score rel err {worst:.1e}",
    )
    assert ok


def _simulate(*extra):
    buf = io.StringIO()
    argv = ["simulate", "--a", "-10", "--m", "0", "--b", "10", "--n", "3.5", "--seed", str(STUDY_SEED),
            "--format", "json", *extra]
    with redirect_stdout(buf):
        code = main(argv)
    assert code == 0
    return buf.getvalue()


def test_c9_determinism(record):
    first = _simulate()
    second = _simulate()
    parallel = _simulate("--workers", "2")
    ok = first == second == parallel
    record("C9 byte-identical simulate output", ok,
           f"{len(first)} bytes; rerun equal {first == second}, workers=2 equal {first == parallel}")
    assert ok


def test_mse_non_increasing_in_sample_size(studies):
    for rep in studies.values():
        for method in ("MLE", "MME"):
            mse = [_cell(rep, method, k).mse for k in SIZES]
            assert mse[0] >= mse[1] >= mse[2], (rep.config.params.n, method, mse)
