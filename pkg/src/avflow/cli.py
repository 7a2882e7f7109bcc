"""Batch driver: `avflow run|picard|compare <config>` and `avflow info <snapshot.json>`.

Exit codes: 0 ok, 2 config error, 3 numerical failure, 4 no contraction.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import RunSettings, load_settings
from .driver import continuation_run
from .errors import (AvflowError, CflViolation, ConfigError, NoContraction,
                     NonFinite)
from .evolve import picard_solve
from .output import DiagnosticsWriter, write_snapshot
from .scenarios import generate_ic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_NO_CONTRACTION = 4


def _apply_thread_limit():
    raw = os.environ.get("AVFLOW_THREADS")
    if not raw:
        return
    try:
        import threadpoolctl

        threadpoolctl.threadpool_limits(int(raw))
    except (ImportError, ValueError):
        pass


def _log(quiet: bool, msg: str):
    if not quiet:
        print(msg, flush=True)


def _dump_fields(state, settings: RunSettings, index: int):
    getters = {
        "u": lambda s: s.u,
        "delta": lambda s: s.delta,
        "phi": lambda s: s.phi,
    }
    for name in settings.output.fields:
        if name not in getters:
            raise ConfigError(f"unknown snapshot field {name!r}")
        write_snapshot(settings.output.snapshot_dir, name, getters[name](state),
                       settings.grid, state.t, state.chart_index, index)


def _field_run(settings: RunSettings, quiet: bool, with_oracle: bool) -> int:
    grid, cfg = settings.grid, settings.run
    phi = generate_ic(settings.scenario, grid)
    mode = "oracle_compare" if with_oracle else "direct"
    snap_index = [0]

    with DiagnosticsWriter(settings.output.csv_path, mode) as writer:

        def on_sample(rec, extra, state):
            writer.write(rec, extra)

        def on_reset(state):
            _log(quiet, f"reset at t={state.t:.6f} "
                        f"(chart {state.chart_index - 1} -> {state.chart_index})")

        def on_step(state, nstep):
            if settings.output.snapshot_cadence and nstep % settings.output.snapshot_cadence == 0:
                snap_index[0] += 1
                _dump_fields(state, settings, snap_index[0])

        result = continuation_run(
            phi, grid, cfg, cadence=settings.output.cadence,
            with_oracle=with_oracle, sample_callback=on_sample,
            reset_callback=on_reset, step_callback=on_step)
        _dump_fields(result.state, settings, snap_index[0] + 1)
    _log(quiet, f"done: t={result.state.t:.6f}, "
                f"charts used={result.state.chart_index + 1}, "
                f"diagnostics -> {settings.output.csv_path}")
    return EXIT_OK


def _picard_run(settings: RunSettings, quiet: bool) -> int:
    grid, cfg = settings.grid, settings.run
    phi = generate_ic(settings.scenario, grid)
    result = picard_solve(phi, cfg, grid)
    with DiagnosticsWriter(settings.output.csv_path, "picard") as writer:
        for i, res in enumerate(result.residuals, start=1):
            writer.write_row([i, res])
    _log(quiet, f"picard: {len(result.residuals)} iterations, "
                f"converged={result.converged}, final residual="
                f"{result.residuals[-1]:.3e}")
    return EXIT_OK


def _info(path: str) -> int:
    meta = json.loads(Path(path).read_text())
    print(json.dumps(meta, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    _apply_thread_limit()
    parser = argparse.ArgumentParser(prog="avflow")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd in ("run", "picard", "compare"):
        sp = sub.add_parser(cmd)
        sp.add_argument("config")
        sp.add_argument("--override", action="append", default=[],
                        metavar="section.key=value")
        sp.add_argument("--quiet", action="store_true")
    sp = sub.add_parser("info")
    sp.add_argument("snapshot_json")

    args = parser.parse_args(argv)
    if args.command == "info":
        return _info(args.snapshot_json)

    try:
        settings = load_settings(args.config, args.override)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if args.command == "picard":
        settings.mode = "picard"
    elif args.command == "compare":
        settings.mode = "oracle_compare"

    try:
        if settings.mode == "picard":
            return _picard_run(settings, args.quiet)
        return _field_run(settings, args.quiet,
                          with_oracle=settings.mode == "oracle_compare")
    except NoContraction as exc:
        print(f"no contraction: {exc}", file=sys.stderr)
        return EXIT_NO_CONTRACTION
    except (NonFinite, CflViolation) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AvflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
