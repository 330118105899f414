"""Command-line front end.

Subcommands: ``run`` (one seed, writes trace CSV + summary JSON), ``sweep``
(N consecutive seeds, one CSV each plus an aggregate JSON), ``presets``
(print the built-in experiment presets as config JSON).  Exit codes:
0 success, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import (
    ServicePolicyChoice,
    SystemConfig,
    config_to_dict,
    load_config,
    validate_config,
)
from .engine import run
from .errors import ConfigError, IoFailure, SimError, UnknownKind
from .metrics import summarize, write_summary, write_traces
from .presets import PRESETS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoicache",
        description="AoI-aware cache refresh + queue-aware service simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one config/seed")
    p_run.add_argument("--config", required=True, help="config JSON path")
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--policy", default=None, help="override refresh policy")
    p_run.add_argument("--service-policy", default=None,
                       help="override service policy (lyapunov, always_serve, periodic:P)")

    p_sweep = sub.add_parser("sweep", help="simulate N consecutive seeds")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--seeds", type=int, required=True, help="number of seeds")
    p_sweep.add_argument("--out", default=".")

    p_presets = sub.add_parser("presets", help="print built-in presets as config JSON")
    p_presets.add_argument("name", nargs="?", choices=sorted(PRESETS), default=None)
    return parser


def _parse_service_policy(text: str) -> ServicePolicyChoice:
    if text.startswith("periodic:"):
        return ServicePolicyChoice(kind="periodic", period=int(text.split(":", 1)[1]))
    if text == "periodic":
        raise UnknownKind("periodic service override needs a period: periodic:P")
    return ServicePolicyChoice(kind=text)


def _load_with_overrides(args) -> SystemConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "policy", None):
        cfg = replace(cfg, policy=args.policy)
    if getattr(args, "service_policy", None):
        cfg = replace(cfg, service_policy=_parse_service_policy(args.service_policy))
    return validate_config(cfg)


def _ensure_dir(path: Path) -> Path:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {path}: {exc}") from exc
    return path


def _cmd_run(args) -> int:
    cfg = _load_with_overrides(args)
    out = _ensure_dir(Path(args.out))
    traces = run(cfg)
    csv_path = out / f"trace_seed{cfg.seed}.csv"
    write_traces(traces, csv_path)
    print(f"wrote {csv_path}")
    if traces:
        summary_path = out / f"summary_seed{cfg.seed}.json"
        write_summary(summarize(traces, cfg), summary_path)
        print(f"wrote {summary_path}")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    base = validate_config(load_config(args.config))
    out = _ensure_dir(Path(args.out))
    summaries = []
    for offset in range(args.seeds):
        cfg = replace(base, seed=base.seed + offset)
        traces = run(cfg)
        write_traces(traces, out / f"trace_seed{cfg.seed}.csv")
        if traces:
            summary = summarize(traces, cfg)
            write_summary(summary, out / f"summary_seed{cfg.seed}.json")
            summaries.append(summary)
    aggregate = {
        "seeds": [s.seed for s in summaries],
        "mean_time_avg_reward": _mean([s.time_avg_reward for s in summaries]),
        "mean_time_avg_service_cost": _mean([s.time_avg_service_cost for s in summaries]),
        "mean_drop_count": _mean([float(s.drop_count) for s in summaries]),
        "summaries": [s.to_dict() for s in summaries],
    }
    agg_path = out / "aggregate.json"
    try:
        agg_path.write_text(json.dumps(aggregate, indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write {agg_path}: {exc}") from exc
    print(f"wrote {args.seeds} trace files and {agg_path}")
    return EXIT_OK


def _mean(xs: list[float]) -> float | None:
    return sum(xs) / len(xs) if xs else None


def _cmd_presets(args) -> int:
    if args.name:
        print(json.dumps(config_to_dict(PRESETS[args.name]()), indent=2))
    else:
        print(json.dumps({name: config_to_dict(make()) for name, make in PRESETS.items()},
                         indent=2))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return _cmd_presets(args)
    except (ConfigError, UnknownKind, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IoFailure as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
