"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 7]

Times each hot kernel on both backends with identical inputs, then a small
end-to-end simulation study with each backend selected through the
``DTSP_PURE_PYTHON`` switch.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dtsp import _pykernels

try:
    from dtsp import _ckernels
except ImportError:
    _ckernels = None

STUDY = (
    "from dtsp import DtspParams, StudyConfig, run_study;"
    "run_study(StudyConfig(DtspParams(-10, 0, 10, 0.5), (25, 50, 100), 200, master_seed=1))"
)


def _cases():
    rng = np.random.default_rng(0)
    offsets = np.arange(0, 200, dtype=np.int64)
    weights = rng.integers(1, 20, size=offsets.size).astype(np.float64)
    small_offsets = np.arange(0, 10, dtype=np.int64)
    small_weights = rng.integers(1, 20, size=10).astype(np.float64)
    us = rng.random(100_000)
    return [
        ("loglik_terms, 10 distinct values", "loglik_terms", (small_offsets, small_weights, 0.7)),
        ("loglik_terms, 200 distinct values", "loglik_terms", (offsets, weights, 3.5)),
        ("floor_quantile, 100 draws", "floor_quantile", (us[:100], -10, 0, 10, 0.5)),
        ("floor_quantile, 100k draws", "floor_quantile", (us, -10, 0, 10, 0.5)),
        ("log_powdiff scalar", "log_powdiff", (37, 2.5)),
    ]


def _best(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


def _study_seconds(pure, repeat):
    env = dict(os.environ)
    if pure:
        env["DTSP_PURE_PYTHON"] = "1"
    else:
        env.pop("DTSP_PURE_PYTHON", None)
    code = f"import timeit; print(min(timeit.repeat({STUDY!r}, number=1, repeat={repeat})))"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()

    if _ckernels is None:
        print("compiled kernels not built; only the fallback can be timed")
    print(f"{'kernel':36s} {'numpy':>12s} {'cython':>12s} {'speedup':>8s}")
    for label, name, call_args in _cases():
        t_py = _best(getattr(_pykernels, name), call_args, args.repeat)
        if _ckernels is None:
            print(f"{label:36s} {t_py * 1e6:10.2f}us {'-':>12s} {'-':>8s}")
            continue
        t_c = _best(getattr(_ckernels, name), call_args, args.repeat)
        print(f"{label:36s} {t_py * 1e6:10.2f}us {t_c * 1e6:10.2f}us {t_py / t_c:7.1f}x")

    study_repeat = max(1, args.repeat // 3)
    t_py = _study_seconds(True, study_repeat)
    line = f"{'study, 2 methods x 3 sizes x 200':36s} {t_py:11.3f}s"
    if _ckernels is not None:
        t_c = _study_seconds(False, study_repeat)
        line += f" {t_c:11.3f}s {t_py / t_c:7.1f}x"
    print(line)


if __name__ == "__main__":
    main()
