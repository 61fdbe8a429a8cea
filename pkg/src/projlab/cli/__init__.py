"""``projlab`` command line: run, verify and sweep experiments.

Exit codes: 0 success, 1 verification failure, 2 config error, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from projlab.cli.config import FORMATS, ConfigError, ExperimentConfig, expand_grid, load_yaml, parse_config
from projlab.cli.report import RunReport, write_report
from projlab.cli.runner import execute
from projlab.dynamics import StepFailure
from projlab.experiments import RecurrenceError
from projlab.geometry import DEFAULT_TOL, Tolerances
from projlab.projectors import CapacityError, IterationBudgetError

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
NUMERIC_ERRORS = (StepFailure, RecurrenceError, IterationBudgetError, CapacityError, FloatingPointError)

log = logging.getLogger("projlab")

__all__ = ["ConfigError", "ExperimentConfig", "RunReport", "execute", "main", "parse_config"]


def _output_path(cfg: ExperimentConfig, output_dir: Path, fmt: str, name: str | None = None) -> Path:
    if name is None:
        name = Path(cfg.output_path).name if cfg.output_path else f"{cfg.kind}.{fmt}"
        if cfg.output_path and Path(cfg.output_path).parent != Path("."):
            return output_dir / cfg.output_path
    return output_dir / name


def cmd_run(args) -> int:
    try:
        cfg = parse_config(load_yaml(args.config), args.seed)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    fmt = args.format or cfg.format
    try:
        report = execute(cfg)
    except NUMERIC_ERRORS as exc:
        log.error("numeric failure: %s", exc)
        return EXIT_NUMERIC
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    path = write_report(report, _output_path(cfg, Path(args.output_dir), fmt), fmt)
    print(f"wrote {path} ({len(report.rows)} rows, {report.duration_s:.2f}s)")
    return EXIT_OK


def cmd_verify(args) -> int:
    from projlab.acceptance import run_all

    tol = DEFAULT_TOL
    if args.root_tol is not None:
        tol = Tolerances(root_tol=args.root_tol, equality_tol=max(DEFAULT_TOL.equality_tol, args.root_tol))
    results = run_all(only=set(args.only) if args.only else None, tol=tol)
    for r in results:
        print(r.line(), flush=True)
    failed = [r.key for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_VERIFY if failed else EXIT_OK


def _sweep_point(job) -> dict:
    i, data, seed, out_dir, fmt = job
    entry = {"index": i, "parameters": data.get("parameters"), "status": "ok", "report": None, "error": None}
    try:
        cfg = parse_config(data, seed)
        report = execute(cfg)
        path = write_report(report, Path(out_dir) / f"{cfg.kind}_{i:03d}.{fmt}", fmt)
        entry["report"] = path.name
        entry["ratios"] = report.ratios[-1:] if report.ratios else []
    except ConfigError as exc:
        entry.update(status="config_error", error=str(exc))
    except NUMERIC_ERRORS as exc:
        entry.update(status="numeric_failure", error=str(exc))
    return entry


def cmd_sweep(args) -> int:
    try:
        data = load_yaml(args.config)
        points, dups = expand_grid(data)
        base = {k: v for k, v in data.items() if k != "grid"}
        # validate the first point so that structural errors stop the sweep early
        parse_config({**base, "parameters": points[0]}, args.seed)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    if dups:
        log.warning("dropped %d duplicate grid point(s)", dups)
    fmt = args.format or (data.get("output") or {}).get("format", "csv")
    if fmt not in FORMATS:
        log.error("config error: output format must be csv or json")
        return EXIT_CONFIG
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    jobs = [(i, {**base, "parameters": p}, args.seed, str(out_dir), fmt) for i, p in enumerate(points)]
    workers = args.jobs or None
    with ProcessPoolExecutor(max_workers=workers) as pool:
        entries = list(pool.map(_sweep_point, jobs))
    index = {"kind": base.get("kind"), "n_points": len(entries), "duplicates_dropped": dups, "points": entries}
    (out_dir / "index.json").write_text(json.dumps(index, indent=2) + "\n", encoding="utf-8")
    failed = [e for e in entries if e["status"] != "ok"]
    for e in failed:
        log.error("point %d failed (%s): %s", e["index"], e["status"], e["error"])
    print(f"sweep: {len(entries) - len(failed)}/{len(entries)} points ok; index at {out_dir / 'index.json'}")
    if not failed:
        return EXIT_OK
    return EXIT_CONFIG if all(e["status"] == "config_error" for e in failed) else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    from projlab.acceptance import FAMILIES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output-dir", default=".", help="directory for report files (default: .)")
    common.add_argument("--format", choices=FORMATS, help="report format; overrides the config")
    common.add_argument("--seed", type=int, help="seed for randomized kinds; overrides the config")

    parser = argparse.ArgumentParser(prog="projlab", description="Relaxed projection experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", parents=[common], help="run one experiment config")
    p.add_argument("config", help="YAML experiment config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    p.add_argument("--only", action="append", choices=FAMILIES, help="restrict to a criterion family (repeatable)")
    p.add_argument("--root-tol", type=float, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="run a parameter grid")
    p.add_argument("config", help="YAML config with a grid mapping")
    p.add_argument("--jobs", type=int, help="worker processes (default: CPU count)")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="projlab: %(levelname)s: %(message)s", stream=sys.stderr)
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
