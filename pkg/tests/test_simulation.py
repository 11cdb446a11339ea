import json

import numpy as np
import pytest

from dtsp.core import DtspParams
from dtsp.errors import ConfigError, ParameterError
from dtsp.estimation import Method
from dtsp.simulation import (
    CSV_COLUMNS,
    PUBLISHED_TABLES,
    StudyConfig,
    ci_coverage,
    compare_published,
    criteria,
    parse_report,
    render_report,
    run_study,
)

SYM = DtspParams(-10, 0, 10, 0.5)


def _small(**kw):
    base = dict(params=SYM, sample_sizes=(10, 20), replicates=40, master_seed=11)
    base.update(kw)
    return StudyConfig(**base)


@pytest.fixture(scope="module")
def report():
    return run_study(_small())


class TestCriteria:
    def test_examples(self):
        assert criteria([0.5, 0.5], 0.5) == (0.5, 0.0, 0.0, 0.0)
        mean, bias, mse, var = criteria([0.4, 0.6], 0.5)
        assert mean == pytest.approx(0.5, abs=1e-15)
        assert bias == pytest.approx(0.0, abs=1e-15)
        assert mse == pytest.approx(0.01, rel=1e-12)
        assert var == pytest.approx(0.01, rel=1e-12)

    def test_published_rows_satisfy_identity(self):
        cell = PUBLISHED_TABLES[0.5][("MLE", 25)]
        assert cell[1] ** 2 + cell[3] == pytest.approx(0.0360, abs=5e-4)
        for table in PUBLISHED_TABLES.values():
            for mean, bias, mse, var, _ in table.values():
                assert bias**2 + var == pytest.approx(mse, abs=2e-3)

    def test_identity_on_random_estimates(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            est = rng.gamma(2.0, 0.3, size=int(rng.integers(2, 500)))
            mean, bias, mse, var = criteria(est, 0.5)
            assert mse == pytest.approx(var + bias**2, abs=1e-12)
            assert var == pytest.approx(np.var(est), rel=1e-10)

    def test_needs_two(self):
        with pytest.raises(ConfigError):
            criteria([1.0], 1.0)


class TestCoverage:
    def test_normal_deviates(self):
        z = np.random.default_rng(1000).standard_normal(1000)
        assert 93.0 <= ci_coverage(z) <= 97.0

    def test_all_equal(self):
        assert ci_coverage([2.0] * 7) == 100.0

    def test_closed_interval(self):
        # two points sit exactly one sd from the mean, well inside 1.96 sd
        assert ci_coverage([0.0, 1.0]) == 100.0

    def test_needs_two(self):
        with pytest.raises(ConfigError):
            ci_coverage([1.0])


class TestConfig:
    @pytest.mark.parametrize("kw", [
        dict(replicates=1),
        dict(sample_sizes=()),
        dict(sample_sizes=(10, 10)),
        dict(sample_sizes=(0, 5)),
        dict(methods=()),
        dict(methods=("MLE", "mle")),
        dict(methods=("ols",)),
        dict(master_seed=-1),
        dict(master_seed=2**64),
    ])
    def test_rejects(self, kw):
        with pytest.raises(ConfigError):
            _small(**kw)

    def test_normalizes(self):
        cfg = _small(methods=("mme", Method.MLE))
        assert cfg.methods == (Method.MME, Method.MLE)
        assert StudyConfig.from_dict(cfg.as_dict()) == cfg


class TestRunStudy:
    def test_shape(self, report):
        assert [(c.method, c.sample_size) for c in report.cells] == [
            ("MLE", 10), ("MLE", 20), ("MME", 10), ("MME", 20),
        ]
        assert report.runtime_seconds > 0

    def test_cell_invariants(self, report):
        for c in report.cells:
            assert c.mse == pytest.approx(c.variance + c.bias**2, abs=1e-9)
            assert 0.0 <= c.ci_coverage_percent <= 100.0
            assert c.bias == pytest.approx(c.mean_estimate - 0.5, abs=1e-12)
            assert c.failures == 0

    def test_deterministic(self):
        cfg = StudyConfig(SYM, sample_sizes=(25,), replicates=2, master_seed=99)
        assert run_study(cfg) == run_study(cfg)

    def test_serial_matches_parallel(self, report):
        par = run_study(_small(), workers=2, chunk=7)
        assert par == report
        assert render_report(par, "json") == render_report(report, "json")

    def test_chunking_irrelevant(self, report):
        assert run_study(_small(), chunk=3) == report

    def test_cells_independent_of_other_cells(self, report):
        alone = run_study(_small(methods=("MME",), sample_sizes=(20,)))
        assert alone.cells[0] == report.cell("MME", 20)

    def test_seed_changes_results(self, report):
        assert run_study(_small(master_seed=12)) != report

    def test_boundary_fits_counted(self):
        # tiny samples from a wide, peaked law often have every point in one
        # branch, which sends one of the estimators to an interval edge
        cfg = StudyConfig(DtspParams(0, 0, 200, 30.0), sample_sizes=(2,), replicates=50,
                          master_seed=3)
        cells = run_study(cfg).cells
        assert any(c.boundary_hits > 0 for c in cells)

    def test_cell_lookup(self, report):
        assert report.cell(Method.MLE, 10) is report.cells[0]
        with pytest.raises(KeyError):
            report.cell("MLE", 999)


class TestRender:
    def test_csv(self, report):
        text = render_report(report, "csv")
        lines = text.splitlines()
        assert lines[0] == "method,sample_size,mean_estimate,bias,mse,variance,ci_coverage_percent,boundary_hits"
        assert lines[0].split(",") == CSV_COLUMNS
        assert len(lines) == 1 + len(report.cells)
        cells = parse_report(text, "csv")
        for got, want in zip(cells, report.cells):
            assert got.method == want.method and got.sample_size == want.sample_size
            assert got.mse == pytest.approx(want.mse, rel=1e-11)

    def test_json_round_trip(self, report):
        text = render_report(report, "json")
        back = parse_report(text, "json")
        assert back == report
        assert render_report(back, "json") == text
        assert "runtime_seconds" not in json.loads(text)

    def test_json_runtime_opt_in(self, report):
        doc = json.loads(render_report(report, "json", include_runtime=True))
        assert doc["runtime_seconds"] == report.runtime_seconds

    def test_markdown_labels(self, report):
        text = render_report(report, "markdown")
        labels = [line.split("|")[1].strip() for line in text.splitlines() if line.startswith("| ")]
        assert labels == ["Estimate", "E(n̂)", "Bias(n̂)", "MSE(n̂)", "Var(n̂)", "% of n in CI"]
        assert "a = -10, m = 0, b = 10, n = 0.5" in text

    def test_unknown_format(self, report):
        with pytest.raises(ConfigError):
            render_report(report, "xml")

    def test_compare_published(self, report):
        assert "k=10" not in compare_published(report)  # no published cell for this size
        r = run_study(_small(sample_sizes=(25,), replicates=5))
        lines = compare_published(r).splitlines()
        assert lines[2].startswith("| k=25 MLE | ")
        assert "| 0.6087 |" in lines[2]
        with pytest.raises(ParameterError):
            compare_published(run_study(_small(params=DtspParams(0, 2, 4, 2), replicates=2)))
