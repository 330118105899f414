"""Domain state types: cache AoI matrices, update actions, queues, vehicles, traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import SystemConfig, coverage_of
from .errors import ConstraintViolation


@dataclass
class CacheState:
    """AoI bookkeeping for the whole system at one instant.

    rsu_aoi: num_rsus x num_regions ints; entry (k, h) is meaningful only for
    h inside RSU k's coverage window.  mbs_aoi: per-region age of the master
    copy.  popularity: per-(RSU, content) request weight; each RSU's covered
    row sums to 1, entries outside coverage are 0.
    """

    rsu_aoi: np.ndarray
    mbs_aoi: np.ndarray
    popularity: np.ndarray

    def copy(self) -> "CacheState":
        return CacheState(self.rsu_aoi.copy(), self.mbs_aoi.copy(), self.popularity.copy())


@dataclass
class UpdateAction:
    """Binary refresh matrix; at most one 1 per RSU row, inside coverage only."""

    x: np.ndarray

    @staticmethod
    def none(cfg: SystemConfig) -> "UpdateAction":
        return UpdateAction(np.zeros((cfg.num_rsus, cfg.num_regions), dtype=np.int8))

    @staticmethod
    def single(cfg: SystemConfig, rsu_id: int, content: int) -> "UpdateAction":
        a = UpdateAction.none(cfg)
        a.x[rsu_id, content] = 1
        return a


@dataclass
class ServiceQueue:
    """Accumulated unserved waiting (request-slots) at one RSU."""

    backlog: float
    rsu_id: int


@dataclass
class Uv:
    """A user vehicle moving one-directionally along the road."""

    id: int
    position: float
    requested_content: int
    wait_slots: int = 0
    served: bool = False


@dataclass
class SlotTrace:
    """One slot's metrics row.

    aoi_keys lists the tracked (rsu, content) pairs in canonical coverage
    order; aoi_samples are the post-action AoIs for those pairs.  Fields past
    ``served`` are in-memory extras (not CSV columns): serve decisions, the
    per-RSU coverage AoI sums, and the slot's UV accounting.
    """

    slot: int
    reward: float
    aoi_utility: float
    mbs_cost: float
    cumulative_reward: float
    updates_issued: int
    aoi_keys: tuple[tuple[int, int], ...]
    aoi_samples: tuple[int, ...]
    backlogs: tuple[float, ...]
    served: tuple[int, ...]
    serve_decisions: tuple[bool, ...] = ()
    aoi_row_sums: tuple[int, ...] = ()
    new_uvs: int = 0
    drops: int = 0
    misses: int = 0
    handovers: int = 0

    @property
    def served_count(self) -> int:
        return sum(self.served)


@lru_cache(maxsize=64)
def coverage_mask(cfg: SystemConfig) -> np.ndarray:
    """Boolean num_rsus x num_regions mask of covered (k, h) pairs (read-only)."""
    mask = np.zeros((cfg.num_rsus, cfg.num_regions), dtype=bool)
    for k in range(cfg.num_rsus):
        mask[k, coverage_of(k, cfg)] = True
    mask.flags.writeable = False
    return mask


@lru_cache(maxsize=64)
def max_aoi_array(cfg: SystemConfig) -> np.ndarray:
    arr = np.array(cfg.max_aoi, dtype=np.int64)
    arr.flags.writeable = False
    return arr


@lru_cache(maxsize=64)
def update_cost_array(cfg: SystemConfig) -> np.ndarray:
    arr = np.array(cfg.update_cost, dtype=float)
    arr.flags.writeable = False
    return arr


def validate_action(action: UpdateAction, cfg: SystemConfig) -> UpdateAction:
    """Check the one-update-per-RSU and coverage constraints."""
    x = action.x
    if x.shape != (cfg.num_rsus, cfg.num_regions):
        raise ConstraintViolation(f"action shape {x.shape} does not match topology")
    if np.any((x != 0) & (x != 1)):
        raise ConstraintViolation("action entries must be 0 or 1")
    if np.any(x.sum(axis=1) > 1):
        raise ConstraintViolation("at most one content may be refreshed per RSU per slot")
    if np.any(x[~coverage_mask(cfg)] != 0):
        raise ConstraintViolation("refresh outside the RSU's coverage window")
    return action


def validate_state(state: CacheState, cfg: SystemConfig) -> CacheState:
    """Check CacheState invariants (AoI floor, freshness dominance, popularity sums)."""
    mask = coverage_mask(cfg)
    if np.any(state.rsu_aoi < 1) or np.any(state.mbs_aoi < 1):
        raise ConstraintViolation("AoI entries must be >= 1")
    if np.any(state.rsu_aoi[mask] < np.broadcast_to(state.mbs_aoi, state.rsu_aoi.shape)[mask]):
        raise ConstraintViolation("an RSU copy cannot be fresher than the MBS master")
    sums = np.where(mask, state.popularity, 0.0).sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise ConstraintViolation("per-RSU popularity over covered contents must sum to 1")
    if np.any(state.popularity[~mask] != 0.0):
        raise ConstraintViolation("popularity outside coverage must be 0")
    return state
