"""Command-line interface.

Subcommands: simulate (one scheme, sim rows), bounds (theory rows),
sweep (both schemes, sim + theory), reproduce-figure (canned experiments).
A JSON config file supplies defaults; flags override individual fields.
Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .errors import ConfigError, SimulatorError, UnknownFigure
from .harness import (
    FIGURE_IDS,
    OUTPUT_DIR_ENV,
    ExperimentConfig,
    config_from_dict,
    reproduce_figure,
    run_bounds,
    run_sweep,
)
from .protocol import SCHEME_BASELINE, SCHEME_TWOPATH

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def _default_out_dir() -> str:
    return os.environ.get(OUTPUT_DIR_ENV, ".")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file (flag values override it)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--snr", help="comma-separated SNR grid in dB, e.g. '0,5,10'")
    p.add_argument("--frames", type=int, help="frames per SNR point")
    p.add_argument("--scheme", choices=[SCHEME_TWOPATH, SCHEME_BASELINE])
    p.add_argument("--out", help="output CSV path")
    p.add_argument("--workers", type=int, help="worker processes")


def _load_config(args) -> ExperimentConfig:
    raw = {
        "frame": {"n_sources": 2, "L": 16, "alphabet": "BPSK"},
        "snr_grid_db": [0.0, 5.0, 10.0, 15.0, 20.0],
    }
    if args.config:
        try:
            with open(args.config) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise OSError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from exc
    cfg = config_from_dict(raw)
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.snr is not None:
        try:
            grid = tuple(float(v) for v in args.snr.split(","))
        except ValueError as exc:
            raise ConfigError(f"bad --snr value: {exc}") from exc
        cfg = replace(cfg, snr_grid_db=grid)
    if args.frames is not None:
        cfg = replace(cfg, frames_per_point=args.frames)
    if getattr(args, "scheme", None):
        cfg = replace(cfg, frame=replace(cfg.frame, scheme=args.scheme))
    if args.workers is not None:
        cfg = replace(cfg, n_workers=args.workers)
    return cfg


def _csv_path(args, cfg: ExperimentConfig, default_name: str) -> str:
    if args.out:
        return args.out
    name = cfg.csv_name or default_name
    return os.path.join(cfg.out_dir or _default_out_dir(), name)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="twopath",
        description="Link-level simulator and bound calculator for two-path relay "
        "networks with network-coded interference cancellation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="Monte Carlo simulation of one scheme")
    _add_common(p_sim)

    p_bounds = sub.add_parser("bounds", help="analytical lower bounds over the SNR grid")
    _add_common(p_bounds)

    p_sweep = sub.add_parser("sweep", help="both schemes, simulation plus theory")
    _add_common(p_sweep)

    p_fig = sub.add_parser("reproduce-figure", help="run a canned figure experiment")
    p_fig.add_argument("--figure", required=True, help=f"one of {', '.join(FIGURE_IDS)}")
    p_fig.add_argument("--out-dir", help="output directory")
    p_fig.add_argument("--seed", type=int, default=12345)
    p_fig.add_argument("--frames", type=int, default=2000)
    p_fig.add_argument("--L", type=int, default=16)
    p_fig.add_argument("--workers", type=int, default=1)
    p_fig.add_argument("--theta-row", type=int, default=1)

    args = parser.parse_args(argv)
    try:
        if args.command == "reproduce-figure":
            out_dir = args.out_dir or _default_out_dir()
            csv_path, manifest = reproduce_figure(
                args.figure,
                out_dir,
                seed=args.seed,
                frames=args.frames,
                L=args.L,
                n_workers=args.workers,
                theta_row=args.theta_row,
            )
            print(csv_path)
            print(manifest)
            return EXIT_OK

        cfg = _load_config(args)
        if args.command == "simulate":
            path = _csv_path(args, cfg, "simulate.csv")
            run_sweep(cfg, csv_path=path)
        elif args.command == "bounds":
            path = _csv_path(args, cfg, "bounds.csv")
            run_bounds(cfg, schemes=[SCHEME_TWOPATH, SCHEME_BASELINE], csv_path=path)
        elif args.command == "sweep":
            path = _csv_path(args, cfg, "sweep.csv")
            run_sweep(
                cfg,
                schemes=[SCHEME_TWOPATH, SCHEME_BASELINE],
                csv_path=path,
                include_theory=True,
            )
        print(path)
        return EXIT_OK
    except (ConfigError, UnknownFigure) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SimulatorError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
