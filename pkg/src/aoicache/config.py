"""Experiment configuration: topology, limits, costs, policy choices, RNG streams.

A SystemConfig is an immutable value object.  Every other module takes a
validated config and treats it as read-only, so configs can be shared freely
across concurrent runs.  All randomness in a run flows from ``seed`` through
named counter-based streams (see :func:`rng_streams`) so that enabling or
disabling one stochastic process never perturbs the others.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    BadPeriod,
    BadPopularityMode,
    BadProbability,
    IndexOutOfRange,
    InvalidTopology,
    IoFailure,
    NegativeParameter,
    NonPositiveLimit,
    UnknownConfigKey,
    UnknownKind,
)

REFRESH_POLICIES = ("mdp_index", "myopic_greedy", "threshold", "always_update", "never_update")
SERVICE_POLICY_KINDS = ("lyapunov", "always_serve", "periodic")
POPULARITY_KINDS = ("static_zipf", "empirical")

#: Stream names -> fixed tags mixed into the seed so each stream is independent
#: of the others and of the order streams are created in.
STREAM_TAGS = {
    "initial_aoi": 0xA01,
    "generation": 0xB02,
    "uv_arrivals": 0xC03,
    "requests": 0xD04,
}


@dataclass(frozen=True)
class PopularityMode:
    """How per-RSU content popularity evolves.

    ``static_zipf`` keeps a fixed Zipf(exponent) profile over each RSU's
    covered contents; ``empirical`` tracks request frequencies over a sliding
    window of ``window_slots`` slots.
    """

    kind: str
    exponent: float | None = None
    window_slots: int | None = None


@dataclass(frozen=True)
class ServicePolicyChoice:
    """Which per-slot service rule an RSU runs (``periodic`` carries its period)."""

    kind: str
    period: int | None = None


@dataclass(frozen=True)
class SystemConfig:
    """Full description of one experiment.

    Topology counts, per-content AoI limits, the reward/cost parameters, the
    Lyapunov tradeoff coefficient, the UV traffic model, the policy choices,
    the horizon, and the master seed.  ``update_cost`` is a
    num_rsus x num_regions matrix (stored as nested tuples to stay hashable).
    """

    num_uvs: int
    num_rsus: int
    num_regions: int
    regions_per_rsu: int
    max_aoi: tuple[int, ...]
    aoi_weight: float
    update_cost: tuple[tuple[float, ...], ...]
    service_cost: float
    service_rate: float
    lyapunov_v: float
    mbs_generation_prob: float
    uv_arrival_rate: float
    uv_speed: float
    popularity_mode: PopularityMode
    horizon_slots: int
    seed: int
    policy: str
    service_policy: ServicePolicyChoice


def validate_config(cfg: SystemConfig) -> SystemConfig:
    """Return ``cfg`` unchanged if every SystemConfig invariant holds.

    Raises InvalidTopology, NonPositiveLimit, NegativeParameter,
    BadProbability, BadPopularityMode, BadPeriod, or UnknownKind.
    """
    if cfg.num_rsus < 1 or cfg.regions_per_rsu < 1:
        raise InvalidTopology("need at least one RSU covering at least one region")
    if cfg.num_regions != cfg.num_rsus * cfg.regions_per_rsu:
        raise InvalidTopology(
            f"num_regions={cfg.num_regions} != num_rsus*regions_per_rsu="
            f"{cfg.num_rsus * cfg.regions_per_rsu}"
        )
    if len(cfg.max_aoi) != cfg.num_regions:
        raise InvalidTopology(f"max_aoi has length {len(cfg.max_aoi)}, expected {cfg.num_regions}")
    if any(a < 1 for a in cfg.max_aoi):
        raise NonPositiveLimit("every max_aoi entry must be >= 1")
    if cfg.service_rate <= 0:
        raise NonPositiveLimit("service_rate must be > 0")
    if cfg.uv_speed <= 0:
        raise NonPositiveLimit("uv_speed must be > 0")
    if cfg.num_uvs < 0:
        raise NegativeParameter("num_uvs must be >= 0")
    if cfg.aoi_weight < 0 or cfg.lyapunov_v < 0 or cfg.service_cost < 0:
        raise NegativeParameter("aoi_weight, lyapunov_v, service_cost must be >= 0")
    if cfg.uv_arrival_rate < 0:
        raise NegativeParameter("uv_arrival_rate must be >= 0")
    if cfg.horizon_slots < 0:
        raise NegativeParameter("horizon_slots must be >= 0")
    if len(cfg.update_cost) != cfg.num_rsus or any(
        len(row) != cfg.num_regions for row in cfg.update_cost
    ):
        raise InvalidTopology("update_cost must be a num_rsus x num_regions matrix")
    if any(c < 0 for row in cfg.update_cost for c in row):
        raise NegativeParameter("update_cost entries must be >= 0")
    if not 0.0 <= cfg.mbs_generation_prob <= 1.0:
        raise BadProbability("mbs_generation_prob must lie in [0, 1]")
    _validate_popularity(cfg.popularity_mode)
    if cfg.policy not in REFRESH_POLICIES:
        raise UnknownKind(f"policy must be one of {REFRESH_POLICIES}, got {cfg.policy!r}")
    _validate_service_policy(cfg.service_policy)
    return cfg


def _validate_popularity(mode: PopularityMode) -> None:
    if mode.kind not in POPULARITY_KINDS:
        raise BadPopularityMode(f"unknown popularity mode {mode.kind!r}")
    if mode.kind == "static_zipf":
        if mode.exponent is None or mode.exponent < 0:
            raise BadPopularityMode("static_zipf requires exponent >= 0")
    else:
        if mode.window_slots is None or mode.window_slots < 1:
            raise BadPopularityMode("empirical requires window_slots >= 1")


def _validate_service_policy(choice: ServicePolicyChoice) -> None:
    if choice.kind not in SERVICE_POLICY_KINDS:
        raise UnknownKind(f"service_policy must be one of {SERVICE_POLICY_KINDS}")
    if choice.kind == "periodic" and (choice.period is None or choice.period < 1):
        raise BadPeriod("periodic service requires period >= 1")


def coverage_of(rsu_id: int, cfg: SystemConfig) -> range:
    """Contiguous region indices cached/served by ``rsu_id``.

    RSUs tile the road exactly: RSU k covers [k*L', (k+1)*L').
    """
    if not 0 <= rsu_id < cfg.num_rsus:
        raise IndexOutOfRange(f"rsu_id {rsu_id} not in [0, {cfg.num_rsus})")
    lo = rsu_id * cfg.regions_per_rsu
    return range(lo, lo + cfg.regions_per_rsu)


def rsu_covering(position: float, cfg: SystemConfig) -> int:
    """RSU whose coverage window contains road coordinate ``position``."""
    if not 0 <= position < cfg.num_regions:
        raise IndexOutOfRange(f"position {position} outside [0, {cfg.num_regions})")
    return int(position // cfg.regions_per_rsu)


def rng_streams(seed: int) -> dict[str, np.random.Generator]:
    """Independent named generators derived from one 64-bit seed.

    Counter-based (Philox) so stream identity depends only on (seed, tag),
    never on construction order or on how much another stream consumed.
    """
    masked = seed & 0xFFFF_FFFF_FFFF_FFFF
    return {
        name: np.random.Generator(np.random.Philox(np.random.SeedSequence((masked, tag))))
        for name, tag in STREAM_TAGS.items()
    }


# ---------------------------------------------------------------------------
# JSON round trip.  The config file is a single JSON object whose keys mirror
# SystemConfig field names exactly; unknown keys are a hard error so typos in
# experiment sweeps fail loudly.
# ---------------------------------------------------------------------------

_TOP_KEYS = frozenset(SystemConfig.__dataclass_fields__)
_POP_KEYS = frozenset(("kind", "exponent", "window_slots"))
_SVC_KEYS = frozenset(("kind", "period"))


def config_to_dict(cfg: SystemConfig) -> dict:
    """Plain-JSON form of a config (tuples become lists, nested modes become objects)."""
    d = {
        "num_uvs": cfg.num_uvs,
        "num_rsus": cfg.num_rsus,
        "num_regions": cfg.num_regions,
        "regions_per_rsu": cfg.regions_per_rsu,
        "max_aoi": list(cfg.max_aoi),
        "aoi_weight": cfg.aoi_weight,
        "update_cost": [list(row) for row in cfg.update_cost],
        "service_cost": cfg.service_cost,
        "service_rate": cfg.service_rate,
        "lyapunov_v": cfg.lyapunov_v,
        "mbs_generation_prob": cfg.mbs_generation_prob,
        "uv_arrival_rate": cfg.uv_arrival_rate,
        "uv_speed": cfg.uv_speed,
        "popularity_mode": _pop_to_dict(cfg.popularity_mode),
        "horizon_slots": cfg.horizon_slots,
        "seed": cfg.seed,
        "policy": cfg.policy,
        "service_policy": _svc_to_dict(cfg.service_policy),
    }
    return d


def _pop_to_dict(mode: PopularityMode) -> dict:
    if mode.kind == "static_zipf":
        return {"kind": mode.kind, "exponent": mode.exponent}
    return {"kind": mode.kind, "window_slots": mode.window_slots}


def _svc_to_dict(choice: ServicePolicyChoice) -> dict:
    if choice.kind == "periodic":
        return {"kind": choice.kind, "period": choice.period}
    return {"kind": choice.kind}


def config_from_dict(data: dict) -> SystemConfig:
    """Parse a config object; unknown keys anywhere are a hard error."""
    if not isinstance(data, dict):
        raise UnknownConfigKey("config document must be a JSON object")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise UnknownConfigKey(f"unknown config keys: {sorted(unknown)}")
    missing = _TOP_KEYS - set(data)
    if missing:
        raise UnknownConfigKey(f"missing config keys: {sorted(missing)}")
    pop = _pop_from(data["popularity_mode"])
    svc = _svc_from(data["service_policy"])
    return SystemConfig(
        num_uvs=int(data["num_uvs"]),
        num_rsus=int(data["num_rsus"]),
        num_regions=int(data["num_regions"]),
        regions_per_rsu=int(data["regions_per_rsu"]),
        max_aoi=tuple(int(a) for a in data["max_aoi"]),
        aoi_weight=float(data["aoi_weight"]),
        update_cost=tuple(tuple(float(c) for c in row) for row in data["update_cost"]),
        service_cost=float(data["service_cost"]),
        service_rate=float(data["service_rate"]),
        lyapunov_v=float(data["lyapunov_v"]),
        mbs_generation_prob=float(data["mbs_generation_prob"]),
        uv_arrival_rate=float(data["uv_arrival_rate"]),
        uv_speed=float(data["uv_speed"]),
        popularity_mode=pop,
        horizon_slots=int(data["horizon_slots"]),
        seed=int(data["seed"]),
        policy=str(data["policy"]),
        service_policy=svc,
    )


def _pop_from(obj) -> PopularityMode:
    if isinstance(obj, str):
        return PopularityMode(kind=obj)
    if not isinstance(obj, dict):
        raise BadPopularityMode("popularity_mode must be a string or object")
    unknown = set(obj) - _POP_KEYS
    if unknown:
        raise UnknownConfigKey(f"unknown popularity_mode keys: {sorted(unknown)}")
    return PopularityMode(
        kind=str(obj.get("kind", "")),
        exponent=None if obj.get("exponent") is None else float(obj["exponent"]),
        window_slots=None if obj.get("window_slots") is None else int(obj["window_slots"]),
    )


def _svc_from(obj) -> ServicePolicyChoice:
    if isinstance(obj, str):
        return ServicePolicyChoice(kind=obj)
    if not isinstance(obj, dict):
        raise UnknownKind("service_policy must be a string or object")
    unknown = set(obj) - _SVC_KEYS
    if unknown:
        raise UnknownConfigKey(f"unknown service_policy keys: {sorted(unknown)}")
    return ServicePolicyChoice(
        kind=str(obj.get("kind", "")),
        period=None if obj.get("period") is None else int(obj["period"]),
    )


def load_config(path: str | Path) -> SystemConfig:
    """Read, parse, and validate a JSON config file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoFailure(f"cannot read config {path}: {exc}") from exc
    return validate_config(config_from_dict(json.loads(text)))


def save_config(cfg: SystemConfig, path: str | Path) -> None:
    """Write the canonical JSON form of ``cfg``."""
    try:
        Path(path).write_text(config_to_json(cfg) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write config {path}: {exc}") from exc


def config_to_json(cfg: SystemConfig) -> str:
    return json.dumps(config_to_dict(cfg), indent=2)


def config_digest(cfg: SystemConfig) -> str:
    """Stable sha256 over the canonical compact JSON form."""
    canonical = json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()
