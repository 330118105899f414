"""Per-slot simulation loop.

Fixed phase order inside one slot (documented because every layer observes
it): (1) MBS content generation and aging, (2) cache-refresh decision and RSU
AoI advance, (3) UV arrivals, (4) mobility and exits, (5) per-RSU waiting
accumulation, (6) service decisions with the AoI admissibility gate,
(7) popularity update, (8) reward accounting and trace emission.

The refresh layer draws only from the "generation" and "initial_aoi" streams
and the traffic layer only from "uv_arrivals" and "requests", so changing the
service side never perturbs AoI trajectories and vice versa.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .aoi import advance_mbs_aoi
from .config import SystemConfig, coverage_of, rng_streams, validate_config
from .mdp import (
    PolicyTable,
    RewardBreakdown,
    baseline_policy,
    select_updates,
    solve_policy_table,
)
from .service import aoi_admissible, decide_service, service_baseline
from .state import (
    CacheState,
    ServiceQueue,
    SlotTrace,
    UpdateAction,
    Uv,
    coverage_mask,
    max_aoi_array,
    update_cost_array,
)

#: Empirical popularity is re-solved for an RSU when its row drifts by more
#: than this in L1 distance from the popularity the policies were solved at.
RESOLVE_DRIFT_L1 = 0.1


@dataclass(frozen=True)
class _RunContext:
    """Config-derived arrays fetched once per run (hot-path cache)."""

    mask: np.ndarray
    max_aoi: np.ndarray          # float, for the utility ratio
    costs: np.ndarray
    key_rows: np.ndarray
    key_cols: np.ndarray
    batch_size: int


@dataclass
class WorldState:
    """Everything one simulation run mutates, plus derived read-only helpers."""

    slot: int
    cache: CacheState
    queues: list[ServiceQueue]
    uvs: list[Uv]
    rng_streams: dict[str, np.random.Generator]
    cumulative_reward: float

    # internals
    fifos: list[list[Uv]] = field(default_factory=list)
    uv_rsu: dict[int, int] = field(default_factory=dict)
    request_windows: list[deque] = field(default_factory=list)
    policies: PolicyTable | None = None
    policy_popularity: np.ndarray | None = None
    next_uv_id: int = 0
    aoi_keys: tuple[tuple[int, int], ...] = ()
    total_new: int = 0
    total_served: int = 0
    total_dropped: int = 0
    ctx: _RunContext | None = None


def zipf_popularity(cfg: SystemConfig) -> np.ndarray:
    """Static Zipf(exponent) profile over each RSU's covered contents, by
    content-index rank inside the window.  Exponent 0 is uniform."""
    exponent = cfg.popularity_mode.exponent or 0.0
    weights = 1.0 / np.power(np.arange(1, cfg.regions_per_rsu + 1, dtype=float), exponent)
    weights /= weights.sum()
    popularity = np.zeros((cfg.num_rsus, cfg.num_regions))
    for k in range(cfg.num_rsus):
        popularity[k, coverage_of(k, cfg)] = weights
    return popularity


def uniform_popularity(cfg: SystemConfig) -> np.ndarray:
    popularity = np.zeros((cfg.num_rsus, cfg.num_regions))
    for k in range(cfg.num_rsus):
        popularity[k, coverage_of(k, cfg)] = 1.0 / cfg.regions_per_rsu
    return popularity


def make_world(cfg: SystemConfig, *, rsu_aoi: np.ndarray | None = None,
               mbs_aoi: np.ndarray | None = None) -> WorldState:
    """Fresh world at slot 0.

    Unless given explicitly, RSU AoIs are drawn uniformly from {1..max_aoi[h]}
    and each MBS age uniformly from {1..min_k rsu_aoi[k][h]} so the master is
    never staler than any cached copy.  Draw order: RSU matrix, then MBS.
    """
    validate_config(cfg)
    streams = rng_streams(cfg.seed)
    limits = max_aoi_array(cfg)
    if rsu_aoi is None:
        rsu_aoi = streams["initial_aoi"].integers(
            1, np.broadcast_to(limits + 1, (cfg.num_rsus, cfg.num_regions))
        ).astype(np.int64)
    else:
        rsu_aoi = np.array(rsu_aoi, dtype=np.int64)
    if mbs_aoi is None:
        mbs_aoi = streams["initial_aoi"].integers(1, rsu_aoi.min(axis=0) + 1).astype(np.int64)
    else:
        mbs_aoi = np.array(mbs_aoi, dtype=np.int64)

    if cfg.popularity_mode.kind == "static_zipf":
        popularity = zipf_popularity(cfg)
    else:
        popularity = uniform_popularity(cfg)

    keys = tuple((k, h) for k in range(cfg.num_rsus) for h in coverage_of(k, cfg))
    ctx = _RunContext(
        mask=coverage_mask(cfg),
        max_aoi=max_aoi_array(cfg).astype(float),
        costs=update_cost_array(cfg),
        key_rows=np.array([k for k, _ in keys]),
        key_cols=np.array([h for _, h in keys]),
        batch_size=math.ceil(cfg.service_rate),
    )
    cache = CacheState(rsu_aoi=rsu_aoi, mbs_aoi=mbs_aoi, popularity=popularity)
    world = WorldState(
        slot=0,
        cache=cache,
        queues=[ServiceQueue(backlog=0.0, rsu_id=k) for k in range(cfg.num_rsus)],
        uvs=[],
        rng_streams=streams,
        cumulative_reward=0.0,
        fifos=[[] for _ in range(cfg.num_rsus)],
        request_windows=[deque() for _ in range(cfg.num_rsus)],
        aoi_keys=keys,
        ctx=ctx,
    )
    if cfg.policy == "mdp_index":
        world.policies = solve_policy_table(cfg, popularity)
        world.policy_popularity = popularity.copy()
    return world


def step(world: WorldState, cfg: SystemConfig) -> tuple[WorldState, SlotTrace]:
    """Advance the world by one slot; returns the (mutated) world and its trace."""
    ctx = world.ctx
    world.slot += 1
    slot = world.slot
    cache = world.cache

    # (1) content generation at the MBS
    events = world.rng_streams["generation"].random(cfg.num_regions) < cfg.mbs_generation_prob
    mbs_aoi = np.where(events, 1, cache.mbs_aoi + 1)
    cache = CacheState(cache.rsu_aoi, mbs_aoi, cache.popularity)

    # (2) cache refresh decision on the post-generation state, then RSU aging.
    # Policy outputs satisfy the action constraints by construction; the
    # public stage_reward/advance ops re-validate for external callers.
    if cfg.policy == "mdp_index":
        action = select_updates(cache, world.policies, cfg)
    else:
        action = baseline_policy(cfg.policy, cache, cfg)
    updates_issued = int(action.x.sum())
    if updates_issued:
        refresh = action.x.astype(bool)
        post = np.where(refresh, np.broadcast_to(mbs_aoi, cache.rsu_aoi.shape),
                        cache.rsu_aoi + 1)
        cost = float((ctx.costs * action.x).sum())
    else:
        post = cache.rsu_aoi + 1
        cost = 0.0
    utility = float((ctx.max_aoi / post * cache.popularity)[ctx.mask].sum())
    breakdown = RewardBreakdown(utility, cost, utility * cfg.aoi_weight - cost)
    cache = CacheState(post, mbs_aoi, cache.popularity)
    world.cache = cache

    # (3) UV arrivals at road position 0, uniformly random requested content
    n_new = int(world.rng_streams["uv_arrivals"].poisson(cfg.uv_arrival_rate))
    for _ in range(n_new):
        content = int(world.rng_streams["requests"].integers(0, cfg.num_regions))
        world.uvs.append(Uv(id=world.next_uv_id, position=0.0, requested_content=content))
        world.next_uv_id += 1
    world.total_new += n_new

    # (4) mobility, exits, coverage-window transitions
    drops = 0
    handovers = 0
    survivors: list[Uv] = []
    for uv in world.uvs:
        uv.position += cfg.uv_speed
        if uv.position >= cfg.num_regions:
            if not uv.served:
                drops += 1
                _fifo_discard(world, uv)
            continue
        survivors.append(uv)
        if uv.served:
            continue
        window = int(uv.position // cfg.regions_per_rsu)
        prev = world.uv_rsu.get(uv.id)
        if prev != window:
            if prev is not None:
                world.fifos[prev].remove(uv)
                handovers += 1
            world.fifos[window].append(uv)
            world.uv_rsu[uv.id] = window
            if uv.requested_content in coverage_of(window, cfg):
                world.request_windows[window].append((slot, uv.requested_content))
    world.uvs = survivors
    world.total_dropped += drops

    # (5) waiting accumulation: every unserved UV in coverage adds one
    # request-slot to its RSU's backlog this slot
    arrivals = [float(len(world.fifos[k])) for k in range(cfg.num_rsus)]
    for fifo in world.fifos:
        for uv in fifo:
            uv.wait_slots += 1

    # (6) service decision + admissibility gate + queue step, per RSU
    served = [0] * cfg.num_rsus
    serve_flags = [False] * cfg.num_rsus
    misses = 0
    for k in range(cfg.num_rsus):
        decision = _service_decision(world.queues[k], slot, cfg)
        serve_flags[k] = decision.serving
        if decision.serving and world.fifos[k]:
            window_range = coverage_of(k, cfg)
            for uv in list(world.fifos[k][:ctx.batch_size]):
                if uv.requested_content not in window_range:
                    misses += 1        # not cached here; stays queued for a later window
                    continue
                if aoi_admissible(k, uv.requested_content, cache, cfg):
                    uv.served = True
                    world.fifos[k].remove(uv)
                    world.uv_rsu.pop(uv.id, None)
                    served[k] += 1
        departed = cfg.service_rate if decision.serving else 0.0
        queue = world.queues[k]
        queue.backlog = max(queue.backlog - departed, 0.0) + arrivals[k]
    world.total_served += sum(served)

    # (7) popularity update (empirical sliding window; static profiles unchanged)
    if cfg.popularity_mode.kind == "empirical":
        _update_empirical_popularity(world, cfg, slot)

    # (8) reward accounting and trace emission
    world.cumulative_reward += breakdown.total
    trace = SlotTrace(
        slot=slot,
        reward=breakdown.total,
        aoi_utility=breakdown.aoi_utility,
        mbs_cost=breakdown.mbs_cost,
        cumulative_reward=world.cumulative_reward,
        updates_issued=updates_issued,
        aoi_keys=world.aoi_keys,
        aoi_samples=tuple(cache.rsu_aoi[ctx.key_rows, ctx.key_cols].tolist()),
        backlogs=tuple(q.backlog for q in world.queues),
        served=tuple(served),
        serve_decisions=tuple(serve_flags),
        aoi_row_sums=tuple((cache.rsu_aoi * ctx.mask).sum(axis=1).tolist()),
        new_uvs=n_new,
        drops=drops,
        misses=misses,
        handovers=handovers,
    )
    return world, trace


def _service_decision(queue: ServiceQueue, slot: int, cfg: SystemConfig):
    choice = cfg.service_policy
    if choice.kind == "lyapunov":
        return decide_service(queue, cfg)
    return service_baseline(choice.kind, queue, slot, cfg, period=choice.period)


def _fifo_discard(world: WorldState, uv: Uv) -> None:
    k = world.uv_rsu.pop(uv.id, None)
    if k is not None:
        world.fifos[k].remove(uv)


def _update_empirical_popularity(world: WorldState, cfg: SystemConfig, slot: int) -> None:
    window = cfg.popularity_mode.window_slots
    popularity = world.cache.popularity.copy()
    for k in range(cfg.num_rsus):
        events = world.request_windows[k]
        while events and events[0][0] <= slot - window:
            events.popleft()
        cov = coverage_of(k, cfg)
        row = np.zeros(cfg.num_regions)
        if events:
            for _, h in events:
                row[h] += 1.0
            row /= row.sum()
        else:
            row[cov] = 1.0 / cfg.regions_per_rsu
        popularity[k] = row
    world.cache = CacheState(world.cache.rsu_aoi, world.cache.mbs_aoi, popularity)
    if world.policies is not None:
        _resolve_drifted(world, cfg)


def _resolve_drifted(world: WorldState, cfg: SystemConfig) -> None:
    for k in range(cfg.num_rsus):
        cov = coverage_of(k, cfg)
        drift = float(np.abs(world.cache.popularity[k, cov]
                             - world.policy_popularity[k, cov]).sum())
        if drift > RESOLVE_DRIFT_L1:
            row_table = solve_policy_table(cfg, world.cache.popularity)
            for h in cov:
                world.policies[(k, h)] = row_table[(k, h)]
            world.policy_popularity[k] = world.cache.popularity[k]


def run_world(cfg: SystemConfig, *, rsu_aoi: np.ndarray | None = None,
              mbs_aoi: np.ndarray | None = None) -> tuple[WorldState, list[SlotTrace]]:
    """Run horizon_slots steps; returns the final world and all traces."""
    world = make_world(cfg, rsu_aoi=rsu_aoi, mbs_aoi=mbs_aoi)
    traces: list[SlotTrace] = []
    for _ in range(cfg.horizon_slots):
        world, trace = step(world, cfg)
        traces.append(trace)
    return world, traces


def run(cfg: SystemConfig) -> list[SlotTrace]:
    """Library entry point: simulate one validated config, return its traces."""
    return run_world(cfg)[1]
