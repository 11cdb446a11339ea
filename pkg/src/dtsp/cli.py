"""Command-line front end: ``dtsp {pmf,moments,sample,fit,simulate}``.

Exit codes: 0 success, 1 usage or validation error, 2 data error,
3 numerical failure (or a non-converged fit under ``--strict``).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import core, tsp
from .errors import DtspError, NumericalFailure
from .estimation import endpoints_heuristic, fit, parse_data, read_data
from .sampling import RngState, sample_many
from .simulation import StudyConfig, compare_published, render_report, run_study

PMF_COLUMNS = ["y", "pmf", "cdf", "survival", "hazard"]
FIT_COLUMNS = [
    "method", "n_hat", "status", "objective", "iterations", "moment_order_used",
    "a", "m", "b", "auto_endpoints",
]


class UsageError(DtspError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.12g}"
    if v is None:
        return ""
    if isinstance(v, (list, tuple)):
        return " ".join(_fmt(x) for x in v)
    return str(v)


def _table(rows: list[dict], columns: list[str], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for r in rows:
            writer.writerow([_fmt(r[c]) for c in columns])
        return buf.getvalue()
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for r in rows:
        lines.append("| " + " | ".join(_fmt(r[c]) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def parse_table(text: str, fmt: str = "csv") -> list[dict]:
    """Read back a table emitted by ``pmf``, ``moments`` or ``fit``."""
    if fmt == "json":
        doc = json.loads(text)
        return doc if isinstance(doc, list) else [doc]
    rows = []
    for r in csv.DictReader(io.StringIO(text)):
        rows.append({k: _coerce(v) for k, v in r.items()})
    return rows


def _coerce(v: str):
    for conv in (int, float):
        try:
            return conv(v)
        except ValueError:
            pass
    if v in ("true", "false"):
        return v == "true"
    return v if v != "" else None


def _params(args) -> core.DtspParams:
    missing = [f"--{k}" for k in "ambn" if getattr(args, k) is None]
    if missing:
        raise UsageError(f"missing {', '.join(missing)}")
    return core.DtspParams(args.a, args.m, args.b, args.n)


def _int_or_float(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def _add_dist_flags(p, need_n=True):
    p.add_argument("--a", type=_int_or_float, help="lower endpoint (integer)")
    p.add_argument("--m", type=_int_or_float, help="threshold (integer)")
    p.add_argument("--b", type=_int_or_float, help="one past the upper support point (integer)")
    if need_n:
        p.add_argument("--n", type=float, help="shape, positive real")


def _add_io_flags(p):
    p.add_argument("--format", choices=["csv", "json", "markdown"], default="csv")
    p.add_argument("--output", default="-", help="output path, '-' for standard output")


def cmd_pmf(args) -> str:
    p = _params(args)
    rows = [
        {
            "y": y,
            "pmf": core.pmf(p, y),
            "cdf": core.cdf(p, y),
            "survival": core.survival(p, y),
            "hazard": core.hazard(p, y),
        }
        for y in p.support
    ]
    return _table(rows, PMF_COLUMNS, args.format)


def moments_record(p: core.DtspParams) -> dict:
    closed = core.moments(p)
    summed = core.moments_by_summation(p)
    parent = p.continuous()
    mean_x = tsp.tsp_mean(parent)
    var_x = tsp.tsp_variance(parent)
    return {
        "a": p.a,
        "m": p.m,
        "b": p.b,
        "n": p.n,
        "mean": closed.mean,
        "variance": closed.variance,
        "second_moment": closed.second_moment,
        "index_of_dispersion": closed.index_of_dispersion,
        "mean_summation": summed.mean,
        "variance_summation": summed.variance,
        "second_moment_summation": summed.second_moment,
        "mean_abs_diff": abs(closed.mean - summed.mean),
        "second_moment_abs_diff": abs(closed.second_moment - summed.second_moment),
        "modes": core.mode_set(p),
        "median": core.median(p),
        "tsp_mean": mean_x,
        "tsp_variance": var_x,
        "mean_bound_holds": mean_x - 1 < closed.mean < mean_x,
        "variance_bound_holds": var_x < closed.variance <= var_x + 0.25,
    }


def cmd_moments(args) -> str:
    rec = moments_record(_params(args))
    return _table([rec], list(rec), args.format)


def cmd_sample(args) -> str:
    p = _params(args)
    if args.seed is None:
        raise UsageError("--seed is required for sampling")
    if args.count is None or args.count < 1:
        raise UsageError("--count must be >= 1")
    sample = sample_many(p, args.count, RngState(args.seed, args.stream))
    return "".join(f"{v}\n" for v in sample)


def _load_data(path):
    if path in (None, "-"):
        return parse_data(sys.stdin.read())
    return read_data(path)


def cmd_fit(args) -> str:
    data = _load_data(args.data)
    auto = args.auto_endpoints
    if auto:
        a, m, b = endpoints_heuristic(data)
    else:
        missing = [f"--{k}" for k in "amb" if getattr(args, k) is None]
        if missing:
            raise UsageError(f"missing {', '.join(missing)} (or pass --auto-endpoints)")
        a, m, b = args.a, args.m, args.b
    core.DtspParams(a, m, b, 1.0)
    methods = ["MLE", "MME"] if args.method == "both" else [args.method.upper()]
    rows = []
    for method in methods:
        res = fit(data, a, m, b, method, interval=(args.n_lo, args.n_hi), tol=args.tol)
        if args.strict and res.status.value != "Converged":
            raise NumericalFailure(f"{method} fit ended with status {res.status.value}")
        row = res.as_dict()
        row.update({"a": a, "m": m, "b": b, "auto_endpoints": auto})
        rows.append(row)
    return _table(rows, FIT_COLUMNS, args.format)


def _sizes(text):
    try:
        return tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --sizes {text!r}") from None


def cmd_simulate(args) -> str:
    p = _params(args)
    if args.seed is None:
        raise UsageError("--seed is required for simulation")
    methods = ("MLE", "MME") if args.method == "both" else (args.method.upper(),)
    config = StudyConfig(
        p, args.sizes, args.replicates, methods, args.seed,
        interval=(args.n_lo, args.n_hi), tol=args.tol,
    )
    report = run_study(config, workers=args.workers)
    text = render_report(report, args.format)
    if args.compare_published:
        if args.format != "markdown":
            raise UsageError("--compare-published needs --format markdown")
        text += "\n" + compare_published(report)
    if args.timing:
        print(f"runtime {report.runtime_seconds:.3f} s", file=sys.stderr)
    return text


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dtsp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("pmf", help="pmf, cdf, survival and hazard over the support")
    _add_dist_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("moments", help="moments, modes, median and bound checks")
    _add_dist_flags(p)
    _add_io_flags(p)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("sample", help="draw variates, one per line")
    _add_dist_flags(p)
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int, default=0)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_sample)

    fit_opts = argparse.ArgumentParser(add_help=False)
    fit_opts.add_argument("--n-lo", type=float, default=1e-3)
    fit_opts.add_argument("--n-hi", type=float, default=50.0)
    fit_opts.add_argument("--tol", type=float, default=1e-8)

    p = sub.add_parser("fit", help="estimate n from data", parents=[fit_opts])
    _add_dist_flags(p, need_n=False)
    _add_io_flags(p)
    p.add_argument("--data", default="-", help="data file, '-' for standard input")
    p.add_argument("--method", choices=["mle", "mme", "both"], default="mle")
    p.add_argument("--auto-endpoints", action="store_true")
    p.add_argument("--strict", action="store_true",
                   help="exit 3 unless every fit converged inside the interval")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="Monte-Carlo study of the estimators", parents=[fit_opts])
    _add_dist_flags(p)
    _add_io_flags(p)
    p.add_argument("--sizes", type=_sizes, default=(25, 50, 100))
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--method", choices=["mle", "mme", "both"], default="both")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--compare-published", action="store_true")
    p.add_argument("--timing", action="store_true", help="print runtime to standard error")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        text = args.func(args)
    except DtspError as exc:
        print(f"dtsp: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"dtsp: DataError: {exc}", file=sys.stderr)
        return 2
    if args.output in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
