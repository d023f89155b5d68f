"""``dioph <command>``: run one experiment and write CSV tables plus a manifest."""

from __future__ import annotations

import argparse
import subprocess
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata
from pathlib import Path

from . import io
from .config import ExperimentConfig, load
from .errors import DiophError
from .experiments import COMMANDS, Context, run_command


def code_version() -> str:
    try:
        ver = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        ver = "unknown"
    try:
        desc = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=Path(__file__).parent,
                              capture_output=True, text=True, timeout=5).stdout.strip()
    except (OSError, subprocess.SubprocessError):
        desc = ""
    return f"{ver}+{desc}" if desc else ver


def run(config: ExperimentConfig) -> dict:
    """Execute ``config``, write outputs atomically under ``config.out`` and return the manifest."""
    cache = io.Cache(config.cache) if config.cache else None
    out = Path(config.out)
    t0 = time.perf_counter()
    if config.threads > 1:
        with ProcessPoolExecutor(config.threads) as pool:
            outcome = run_command(config.command, config.resolved_params(), config.seed,
                                  Context(cache, pool.map))
    else:
        outcome = run_command(config.command, config.resolved_params(), config.seed, Context(cache))
    wall = time.perf_counter() - t0

    files = {}
    for name, (header, rows) in sorted(outcome.tables.items()):
        fname = f"{config.command}_{name}.csv"
        files[fname] = io.write_csv(out / fname, header, rows)
    summary_name = f"{config.command}_summary.json"
    files[summary_name] = io.write_json(out / summary_name, outcome.summary)

    manifest = {
        "schema_version": io.MANIFEST_SCHEMA,
        "command": config.command,
        "config": config.as_dict(),
        "resolved_params": config.resolved_params(),
        "code_version": code_version(),
        "wall_clock_s": wall,
        "checks": outcome.checks,
        "passed": outcome.passed,
        "hypotheses": outcome.hypotheses,
        "files": {k: {"sha256": v} for k, v in files.items()},
    }
    io.write_json(out / f"{config.command}_manifest.json", manifest)
    return manifest


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dioph", description=__doc__)
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="TOML config; its command must match")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    ap.add_argument("--cache")
    ap.add_argument("--threads", type=int)
    return ap


def config_from_args(args) -> ExperimentConfig:
    base = load(args.config) if args.config else ExperimentConfig(args.command)
    if base.command != args.command:
        raise DiophError(f"config is for {base.command!r}, not {args.command!r}")
    fields = base.as_dict()
    for k in ("seed", "out", "cache", "threads"):
        v = getattr(args, k)
        if v is not None:
            fields[k] = v
    return ExperimentConfig(**fields)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        manifest = run(config_from_args(args))
    except DiophError as e:
        print(f"dioph {args.command}: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"dioph {args.command}: {e}", file=sys.stderr)
        return 1
    for name, ok in manifest["checks"].items():
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    return 0 if manifest["passed"] else 2


if __name__ == "__main__":
    sys.exit(main())
