"""Trace persistence and run summaries.

The CSV contract is bit-exact: header
``slot,reward,aoi_utility,mbs_cost,cumulative_reward,updates_issued`` followed
by one ``aoi_<k>_<h>`` column per tracked (RSU, content) pair in coverage
order, then ``q_<k>`` and ``served_<k>`` per RSU.  Numbers are written as the
shortest round-trip decimal, newlines are LF.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path

from .config import SystemConfig, config_digest, coverage_of
from .errors import EmptyTraces, IoFailure
from .state import SlotTrace

_FIXED_HEADER = ("slot", "reward", "aoi_utility", "mbs_cost", "cumulative_reward",
                 "updates_issued")


def trace_header(traces: list[SlotTrace]) -> list[str]:
    keys = traces[0].aoi_keys if traces else ()
    n_rsus = len(traces[0].backlogs) if traces else 0
    header = list(_FIXED_HEADER)
    header += [f"aoi_{k}_{h}" for k, h in keys]
    header += [f"q_{k}" for k in range(n_rsus)]
    header += [f"served_{k}" for k in range(n_rsus)]
    return header


def write_traces(traces: list[SlotTrace], path: str | Path) -> None:
    """Write the per-slot trace CSV (header-only when the list is empty)."""
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(trace_header(traces))
            for t in traces:
                row = [str(t.slot), repr(t.reward), repr(t.aoi_utility), repr(t.mbs_cost),
                       repr(t.cumulative_reward), str(t.updates_issued)]
                row += [str(a) for a in t.aoi_samples]
                row += [repr(q) for q in t.backlogs]
                row += [str(s) for s in t.served]
                writer.writerow(row)
    except OSError as exc:
        raise IoFailure(f"cannot write traces to {path}: {exc}") from exc


def read_traces(path: str | Path) -> tuple[list[str], list[dict[str, float]]]:
    """Parse a trace CSV back into (header, one dict per row)."""
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [
                {name: float(value) for name, value in zip(header, row)}
                for row in reader
            ]
    except OSError as exc:
        raise IoFailure(f"cannot read traces from {path}: {exc}") from exc
    return header, rows


@dataclass(frozen=True)
class RunSummary:
    """Aggregate statistics for one run, JSON-serializable via to_dict()."""

    seed: int
    config_digest: str
    slots: int
    mean_backlog: tuple[float, ...]
    max_backlog: tuple[float, ...]
    time_avg_service_cost: float
    time_avg_mbs_cost: float
    time_avg_reward: float
    aoi_mean: dict[str, float]
    aoi_max: dict[str, int]
    drop_count: int
    violation_count: int

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(traces: list[SlotTrace], cfg: SystemConfig) -> RunSummary:
    """Aggregate a run's traces (EmptyTraces when there is nothing to aggregate)."""
    if not traces:
        raise EmptyTraces("cannot summarize an empty trace list")
    n = len(traces)
    keys = traces[0].aoi_keys
    n_rsus = len(traces[0].backlogs)

    mean_backlog = tuple(sum(t.backlogs[k] for t in traces) / n for k in range(n_rsus))
    max_backlog = tuple(max(t.backlogs[k] for t in traces) for k in range(n_rsus))
    serve_cost = sum(cfg.service_cost * sum(t.serve_decisions) for t in traces) / n
    aoi_mean = {}
    aoi_max = {}
    violations = 0
    for idx, (k, h) in enumerate(keys):
        series = [t.aoi_samples[idx] for t in traces]
        aoi_mean[f"{k}:{h}"] = sum(series) / n
        aoi_max[f"{k}:{h}"] = max(series)
        violations += sum(1 for a in series if a > cfg.max_aoi[h])
    return RunSummary(
        seed=cfg.seed,
        config_digest=config_digest(cfg),
        slots=n,
        mean_backlog=mean_backlog,
        max_backlog=max_backlog,
        time_avg_service_cost=serve_cost,
        time_avg_mbs_cost=sum(t.mbs_cost for t in traces) / n,
        time_avg_reward=sum(t.reward for t in traces) / n,
        aoi_mean=aoi_mean,
        aoi_max=aoi_max,
        drop_count=sum(t.drops for t in traces),
        violation_count=violations,
    )


def write_summary(summary: RunSummary, path: str | Path) -> None:
    try:
        Path(path).write_text(json.dumps(summary.to_dict(), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write summary to {path}: {exc}") from exc
