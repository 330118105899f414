"""Experiment presets at the evaluation scale reported for the system.

``fig1`` is the 4-RSU x 5-content cache-refresh experiment (20 contents,
per-slot generation, index policy); ``fig2`` is the 5-RSU road variant used
for the service/latency comparison.  Both run 1000 slots.
"""

from __future__ import annotations

from .config import PopularityMode, ServicePolicyChoice, SystemConfig, validate_config


def _uniform_cost(num_rsus: int, num_regions: int, value: float) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(value for _ in range(num_regions)) for _ in range(num_rsus))


def fig1_preset(seed: int = 0) -> SystemConfig:
    """4 RSUs, 5 contents each, per-slot MBS generation, mdp_index refresh.

    Per-RSU limits are equal within a window (which aligns the index rule's
    advantage ordering with earliest-deadline-first) and generous enough that
    the random initial AoIs never force two same-window refreshes in one slot.
    """
    num_rsus, per = 4, 5
    max_aoi = tuple(limit for limit in (40, 50, 60, 70) for _ in range(per))
    cfg = SystemConfig(
        num_uvs=3,
        num_rsus=num_rsus,
        num_regions=num_rsus * per,
        regions_per_rsu=per,
        max_aoi=max_aoi,
        aoi_weight=1.0,
        update_cost=_uniform_cost(num_rsus, num_rsus * per, 0.1),
        service_cost=1.0,
        service_rate=2.0,
        lyapunov_v=10.0,
        mbs_generation_prob=1.0,
        uv_arrival_rate=0.3,
        uv_speed=2.0,
        popularity_mode=PopularityMode(kind="static_zipf", exponent=0.0),
        horizon_slots=1000,
        seed=seed,
        policy="mdp_index",
        service_policy=ServicePolicyChoice(kind="lyapunov"),
    )
    return validate_config(cfg)


def fig2_preset(seed: int = 0) -> SystemConfig:
    """5-RSU road (4 regions each, still 20 contents), service-side focus."""
    num_rsus, per = 5, 4
    cfg = SystemConfig(
        num_uvs=3,
        num_rsus=num_rsus,
        num_regions=num_rsus * per,
        regions_per_rsu=per,
        max_aoi=tuple(30 for _ in range(num_rsus * per)),
        aoi_weight=1.0,
        update_cost=_uniform_cost(num_rsus, num_rsus * per, 0.1),
        service_cost=1.0,
        service_rate=2.0,
        lyapunov_v=20.0,
        mbs_generation_prob=1.0,
        uv_arrival_rate=0.3,
        uv_speed=2.0,
        popularity_mode=PopularityMode(kind="static_zipf", exponent=0.0),
        horizon_slots=1000,
        seed=seed,
        policy="threshold",
        service_policy=ServicePolicyChoice(kind="lyapunov"),
    )
    return validate_config(cfg)


PRESETS = {"fig1": fig1_preset, "fig2": fig2_preset}
