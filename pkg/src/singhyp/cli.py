"""Command line entry point ``singhyp``.

Usage::

    singhyp <experiment> --config FILE [--seed N] [--workers K] [--out DIR]
    singhyp acceptance [--suite NAME] [--seed N] [--workers K] [--out DIR]

Exit status: 0 on success, 1 on usage or configuration errors, 2 when a run
violates one of its invariants (or an acceptance check fails).
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .acceptance import SUITES, run_suites
from .config import EXPERIMENTS, load_config
from .errors import ConfigError, InvalidParams, SinghypError
from .experiments import RUNNERS
from .output import RunManifest, json_text, write_text

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="singhyp", description="Reproducible experiments on skew products and flows.")
    p.add_argument("experiment", choices=EXPERIMENTS + ("acceptance",))
    p.add_argument("--config", help="config file (required except for acceptance)")
    p.add_argument("--seed", type=int, help="overrides [run] seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default="out")
    p.add_argument("--suite", default="all", help=f"acceptance suite: all or one of {', '.join(SUITES)}")
    return p


def run_experiment(experiment: str, config_path: str, seed=None, workers: int = 1, out: str = "out") -> int:
    start = time.perf_counter()
    try:
        cfg = load_config(config_path, experiment)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if seed is not None:
        cfg.seed = seed
    out_dir = Path(out)
    status = EXIT_OK
    warnings: list = []
    outputs: list = []
    try:
        result = RUNNERS[experiment](cfg, workers)
    except (ConfigError, InvalidParams) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SinghypError as exc:
        print(f"invariant violation: {type(exc).__name__}: {exc}", file=sys.stderr)
        status = EXIT_VIOLATION
        warnings.append(f"{type(exc).__name__}: {exc}")
        summary = {"error": type(exc).__name__, "message": str(exc)}
    else:
        for name, text in result.csvs.items():
            write_text(out_dir / name, text)
            outputs.append(name)
        summary = dict(result.summary)
        warnings.extend(result.warnings)
        if result.violations:
            status = EXIT_VIOLATION
            summary["violations"] = result.violations
            for v in result.violations:
                print(f"invariant violation: {v}", file=sys.stderr)
    write_text(out_dir / "summary.json", json_text(summary))
    outputs.append("summary.json")
    manifest = RunManifest(experiment, cfg.digest, cfg.seed, workers, time.perf_counter() - start, status,
                           warnings, outputs)
    write_text(out_dir / "manifest.json", manifest.to_json())
    return status


def run_acceptance(suite: str, seed: int = 0, workers: int = 1, out: str = "out") -> int:
    names = list(SUITES) if suite == "all" else [suite]
    if any(n not in SUITES for n in names):
        print(f"error: unknown suite {suite!r}", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(out)
    verdicts = []
    for res in run_suites(names, seed, workers):
        for name, text in res.csvs.items():
            write_text(out_dir / res.suite / name, text)
        verdicts.append(res.as_dict())
        for c in res.checks:
            print(f"[{'PASS' if c.passed else 'FAIL'}] {res.suite}: {c.name} = {c.value:.6g} ({c.threshold})")
    write_text(out_dir / "verdict.json", json_text({"seed": seed, "suites": verdicts}))
    return EXIT_OK if all(v["passed"] for v in verdicts) else EXIT_VIOLATION


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.workers < 1:
        print("error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    if args.experiment == "acceptance":
        return run_acceptance(args.suite, 0 if args.seed is None else args.seed, args.workers, args.out)
    if not args.config:
        print("error: --config is required", file=sys.stderr)
        return EXIT_USAGE
    return run_experiment(args.experiment, args.config, args.seed, args.workers, args.out)


if __name__ == "__main__":
    sys.exit(main())
