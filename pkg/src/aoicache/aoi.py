"""AoI evolution at the MBS and the RSUs.

Within-slot ordering is fixed: the MBS generates/ages first, then refresh
copies take the post-generation master age, then non-refreshed RSU entries
age by one.  A refresh therefore always delivers the freshest copy that
exists this slot.
"""

from __future__ import annotations

import numpy as np

from .config import SystemConfig
from .errors import LengthMismatch
from .state import CacheState, UpdateAction, validate_action


def advance_mbs_aoi(mbs_aoi: np.ndarray, generation_events: np.ndarray) -> np.ndarray:
    """Next-slot MBS ages: 1 where a fresh version was generated, +1 elsewhere.

    The caller draws generation_events Bernoulli(mbs_generation_prob) per
    region; prob = 1 reproduces the always-fresh master regime.
    """
    mbs_aoi = np.asarray(mbs_aoi)
    generation_events = np.asarray(generation_events, dtype=bool)
    if mbs_aoi.shape != generation_events.shape:
        raise LengthMismatch(
            f"mbs_aoi has shape {mbs_aoi.shape}, events {generation_events.shape}"
        )
    return np.where(generation_events, 1, mbs_aoi + 1)


def _post_action_unchecked(state: CacheState, action: UpdateAction) -> np.ndarray:
    refresh = action.x.astype(bool)
    return np.where(refresh, np.broadcast_to(state.mbs_aoi, state.rsu_aoi.shape), state.rsu_aoi + 1)


def post_action_rsu_aoi(state: CacheState, action: UpdateAction, cfg: SystemConfig) -> np.ndarray:
    """Post-action RSU ages: refreshed entries copy the master's current age,
    everything else ages by one."""
    validate_action(action, cfg)
    return _post_action_unchecked(state, action)


def advance_rsu_aoi(state: CacheState, action: UpdateAction, cfg: SystemConfig) -> CacheState:
    """Apply one slot of RSU cache dynamics; pure, returns a new CacheState."""
    return CacheState(
        rsu_aoi=post_action_rsu_aoi(state, action, cfg),
        mbs_aoi=state.mbs_aoi.copy(),
        popularity=state.popularity.copy(),
    )
