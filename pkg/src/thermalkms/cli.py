"""Command-line front end: ``thermalkms run <config>`` and ``thermalkms list``.

Exit status: 0 all verdicts pass, 1 some verdict fails, 2 configuration
error, 3 numerical failure (quadrature did not converge).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import yaml
from pydantic import ValidationError

from .config import RunConfig, dump_config, load_config
from .errors import KMSError, QuadratureError
from .experiments import ExperimentReport
from .registry import listing, run_experiment

log = logging.getLogger("thermalkms")

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


def _atomic_write(path: Path, data: str | bytes):
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, mode) as fh:
        fh.write(data)
    os.replace(tmp, path)


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["grid", "lambda_order", "re", "im", "err"])
    for grid, order, re, im, err in report.rows():
        w.writerow([float(grid), order, float(re), float(im), float(err)])
    return buf.getvalue()


def report_svg(report: ExperimentReport) -> bytes | None:
    """Log-log plot of |value| per lambda order; None for single-point reports."""
    if len(report.grid) < 2 or min(report.grid) <= 0:
        return None
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for order, vals in sorted(report.values.items()):
        mags = [abs(v.value) for v in vals]
        if any(m > 0 for m in mags):
            ax.loglog(report.grid, [m if m > 0 else float("nan") for m in mags], "o-",
                      label=f"order {order}")
    ax.set_xlabel("grid (units of 1/m)")
    ax.set_ylabel("|value|")
    ax.set_title(report.experiment)
    if ax.lines:
        ax.legend()
    buf = io.BytesIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def _run_one(cfg: RunConfig, exp, tol_scale: float):
    start = time.perf_counter()
    report = run_experiment(cfg, exp, tol_scale)
    return report, time.perf_counter() - start


def run(config_path: str, out_dir: str | None = None, threads: int = 1, tol_scale: float = 1.0) -> int:
    try:
        cfg = load_config(config_path)
    except (ValidationError, yaml.YAMLError, ValueError, OSError) as exc:
        print(f"configuration error in {config_path}:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not tol_scale > 0:
        print("--tol-scale must be > 0", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(out_dir or cfg.out_dir)
    _atomic_write(out / "resolved_config.yaml", dump_config(cfg))

    jobs = list(cfg.experiments)
    try:
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            results = list(pool.map(lambda e: _run_one(cfg, e, tol_scale), jobs))
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (KMSError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    summaries = []
    for exp, (report, wall) in zip(jobs, results):
        summary = report.summary() | {"wall_time": wall}
        summaries.append(summary)
        _atomic_write(out / f"{exp.id}.csv", report_csv(report))
        _atomic_write(out / f"{exp.id}.json", json.dumps(summary, indent=2))
        svg = report_svg(report)
        if svg is not None:
            _atomic_write(out / f"{exp.id}.svg", svg)
        log.info("%s: %s (%.1fs)", exp.id, summary["verdict"], wall)
        print(f"{exp.id}: {summary['verdict'].upper()}")
    all_pass = all(s["verdict"] == "pass" for s in summaries)
    _atomic_write(out / "summary.json", json.dumps(
        {"n_experiments": len(summaries), "all_pass": all_pass, "experiments": summaries}, indent=2))
    return EXIT_OK if all_pass else EXIT_FAIL


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="thermalkms", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run the experiments selected in a YAML config")
    p_run.add_argument("config")
    p_run.add_argument("--out-dir", default=None, help="overrides out_dir from the config")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--tol-scale", type=float, default=1.0,
                       help="multiplier applied to both quadrature tolerances")
    sub.add_parser("list", help="list the registered experiments")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        print(listing())
        return EXIT_OK
    return run(args.config, args.out_dir, args.threads, args.tol_scale)


if __name__ == "__main__":
    sys.exit(main())
