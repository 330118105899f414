"""Per-RSU service decisions: drift-plus-penalty rule, queue dynamics, AoI gate.

The per-slot rule evaluates V*C(alpha) - Q*b(alpha) for both actions and
serves only when serving strictly beats idling (idle on exact tie, the
cost-minimizing choice).  Equivalent closed form: serve iff
backlog > V*service_cost/service_rate.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import SystemConfig, coverage_of
from .errors import BadPeriod, NegativeArrivals, OutOfCoverage, UnknownKind
from .state import CacheState, ServiceQueue

SERVE = "serve"
IDLE = "idle"


@dataclass(frozen=True)
class ServiceDecision:
    """One RSU's per-slot choice plus the evaluated objective for each action.

    alpha == serve exactly when objective_serve < objective_idle.  Baseline
    rules encode their preference as 0/1 indicator objectives so the invariant
    holds for them too.
    """

    alpha: str
    objective_serve: float
    objective_idle: float

    @property
    def serving(self) -> bool:
        return self.alpha == SERVE


def decide_service(q: ServiceQueue, cfg: SystemConfig) -> ServiceDecision:
    """Minimize V*C(alpha) - Q*b(alpha) over {serve, idle}; idle on tie."""
    objective_serve = cfg.lyapunov_v * cfg.service_cost - q.backlog * cfg.service_rate
    objective_idle = 0.0
    alpha = SERVE if objective_serve < objective_idle else IDLE
    return ServiceDecision(alpha, objective_serve, objective_idle)


def serve_threshold(cfg: SystemConfig) -> float:
    """Backlog above which the drift-plus-penalty rule serves."""
    return cfg.lyapunov_v * cfg.service_cost / cfg.service_rate


def queue_step(q: ServiceQueue, arrivals: float, decision: ServiceDecision,
               cfg: SystemConfig) -> ServiceQueue:
    """Lindley recursion: backlog' = max(backlog - b(alpha), 0) + arrivals."""
    if arrivals < 0:
        raise NegativeArrivals(f"arrivals must be >= 0, got {arrivals}")
    departed = cfg.service_rate if decision.serving else 0.0
    return ServiceQueue(backlog=max(q.backlog - departed, 0.0) + arrivals, rsu_id=q.rsu_id)


def aoi_admissible(rsu_id: int, content: int, state: CacheState, cfg: SystemConfig) -> bool:
    """Whether the cached copy is fresh enough to serve (AoI <= limit, inclusive)."""
    if content not in coverage_of(rsu_id, cfg):
        raise OutOfCoverage(f"content {content} not covered by rsu {rsu_id}")
    return int(state.rsu_aoi[rsu_id, content]) <= cfg.max_aoi[content]


def service_baseline(kind: str, q: ServiceQueue, slot: int, cfg: SystemConfig,
                     period: int | None = None) -> ServiceDecision:
    """Comparator rules: always_serve (whenever backlog > 0) and periodic(p)."""
    if kind == "always_serve":
        return _indicator_decision(q.backlog > 0)
    if kind == "periodic":
        if period is None or period < 1:
            raise BadPeriod(f"periodic service requires period >= 1, got {period}")
        return _indicator_decision(slot % period == 0 and q.backlog > 0)
    raise UnknownKind(f"unknown service baseline {kind!r}")


def _indicator_decision(serve: bool) -> ServiceDecision:
    if serve:
        return ServiceDecision(SERVE, 0.0, 1.0)
    return ServiceDecision(IDLE, 1.0, 0.0)
