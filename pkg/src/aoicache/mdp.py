"""Cache-refresh reward model and policies.

The per-slot reward decomposes additively over (RSU, content) pairs, so the
refresh problem is solved exactly per content (discounted value iteration on
the capped AoI chain) and the per-RSU one-update constraint is applied by a
max-advantage index rule.  Baseline comparators live here too.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .aoi import _post_action_unchecked, post_action_rsu_aoi
from .config import SystemConfig, coverage_of
from .errors import BadDiscount, BadEpsilon, IoFailure, MissingPolicy, UnknownKind
from .state import (
    CacheState,
    UpdateAction,
    coverage_mask,
    max_aoi_array,
    update_cost_array,
    validate_action,
)

DEFAULT_DISCOUNT = 0.9
DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class RewardBreakdown:
    """One slot's reward: weighted AoI utility minus refresh cost."""

    aoi_utility: float
    mbs_cost: float
    total: float


@dataclass(frozen=True)
class ContentMdp:
    """Single-content refresh-vs-hold problem.

    States are AoI values {1..a_cap}; a_cap aggregates everything beyond it
    (default 2*max_aoi keeps the chain finite while the hyperbolic reward tail
    is near-constant).  Popularity is frozen for the solve.
    """

    max_aoi: int
    popularity: float
    cost: float
    weight: float
    discount: float = DEFAULT_DISCOUNT
    a_cap: int = 0

    def __post_init__(self):
        if self.a_cap == 0:
            object.__setattr__(self, "a_cap", 2 * self.max_aoi)
        if self.a_cap < self.max_aoi:
            raise ValueError("a_cap must cover at least max_aoi states")


@dataclass(frozen=True)
class MdpPolicy:
    """Solved per-content policy: values and both action values per state a=1..a_cap.

    Arrays are indexed by a-1.  ``refresh`` is the greedy choice (hold on
    exact ties); advantage(a) is the refresh-minus-hold action-value gap, the
    quantity the index rule ranks.
    """

    mdp: ContentMdp
    values: np.ndarray
    q_refresh: np.ndarray
    q_hold: np.ndarray
    refresh: np.ndarray
    iterations: int

    def advantage(self, aoi: int) -> float:
        idx = min(int(aoi), self.mdp.a_cap) - 1
        return float(self.q_refresh[idx] - self.q_hold[idx])

    def refresh_threshold(self) -> int | None:
        """Smallest AoI at which refresh is chosen, or None if never."""
        hits = np.nonzero(self.refresh)[0]
        return int(hits[0]) + 1 if hits.size else None


def solve_content_mdp(mdp: ContentMdp, epsilon: float = DEFAULT_EPSILON) -> MdpPolicy:
    """Discounted value iteration for one content.

    Per-slot reward is weight*popularity*max_aoi/a' - cost*1[refresh] with a'
    the post-action AoI (refresh -> 1 under per-slot generation, hold ->
    min(a+1, a_cap)).  Iterates until the sup-norm value change drops below
    epsilon*(1-discount)/(2*discount), which puts the greedy policy's value
    (and the returned value estimates) within epsilon of optimal.

    Results are memoized: ContentMdp is frozen and the returned policy tables
    are immutable, so identical problems across runs share one solve.
    """
    return _solve_cached(mdp, epsilon)


@lru_cache(maxsize=4096)
def _solve_cached(mdp: ContentMdp, epsilon: float) -> MdpPolicy:
    if not 0.0 <= mdp.discount < 1.0:
        raise BadDiscount(f"discount must lie in [0, 1), got {mdp.discount}")
    if epsilon <= 0:
        raise BadEpsilon(f"epsilon must be > 0, got {epsilon}")
    n = mdp.a_cap
    gain = mdp.weight * mdp.popularity * mdp.max_aoi
    hold_next = np.minimum(np.arange(2, n + 2), n) - 1        # index of min(a+1, cap)
    r_hold = gain / (hold_next + 1.0)
    r_refresh = gain - mdp.cost
    stop = np.inf if mdp.discount == 0.0 else epsilon * (1 - mdp.discount) / (2 * mdp.discount)

    values = np.zeros(n)
    iterations = 0
    while True:
        iterations += 1
        q_hold = r_hold + mdp.discount * values[hold_next]
        q_refresh = r_refresh + mdp.discount * values[0]
        new_values = np.maximum(q_hold, q_refresh)
        delta = float(np.max(np.abs(new_values - values)))
        values = new_values
        if delta < stop or delta == 0.0:
            break

    q_hold = r_hold + mdp.discount * values[hold_next]
    q_refresh = np.full(n, r_refresh) + mdp.discount * values[0]
    for arr in (values, q_hold, q_refresh):
        arr.flags.writeable = False
    refresh = q_refresh > q_hold
    refresh.flags.writeable = False
    return MdpPolicy(mdp, values, q_refresh, q_hold, refresh, iterations)


# ---------------------------------------------------------------------------
# Stage reward (the MDP reward the MBS accrues each slot)
# ---------------------------------------------------------------------------


def _aoi_utility_unchecked(state: CacheState, action: UpdateAction, cfg: SystemConfig) -> float:
    post = _post_action_unchecked(state, action)
    mask = coverage_mask(cfg)
    terms = max_aoi_array(cfg) / post * state.popularity
    return float(terms[mask].sum())


def aoi_utility(state: CacheState, action: UpdateAction, cfg: SystemConfig) -> float:
    """Sum over covered (k, h) of popularity-weighted max_aoi / post-action AoI."""
    validate_action(action, cfg)
    return _aoi_utility_unchecked(state, action, cfg)


def mbs_cost(action: UpdateAction, cfg: SystemConfig) -> float:
    """Refresh communication cost: sum of update_cost over issued refreshes."""
    validate_action(action, cfg)
    return float((update_cost_array(cfg) * action.x).sum())


def stage_reward(state: CacheState, action: UpdateAction, cfg: SystemConfig) -> RewardBreakdown:
    """Weighted AoI utility minus refresh cost for one slot."""
    validate_action(action, cfg)
    utility = _aoi_utility_unchecked(state, action, cfg)
    cost = float((update_cost_array(cfg) * action.x).sum())
    return RewardBreakdown(aoi_utility=utility, mbs_cost=cost, total=utility * cfg.aoi_weight - cost)


# ---------------------------------------------------------------------------
# Refresh decision rules
# ---------------------------------------------------------------------------

PolicyTable = dict[tuple[int, int], MdpPolicy]


def solve_policy_table(cfg: SystemConfig, popularity: np.ndarray,
                       discount: float = DEFAULT_DISCOUNT,
                       epsilon: float = DEFAULT_EPSILON) -> PolicyTable:
    """Solve one ContentMdp per covered (rsu, content) at the given popularity."""
    costs = update_cost_array(cfg)
    table: PolicyTable = {}
    for k in range(cfg.num_rsus):
        for h in coverage_of(k, cfg):
            mdp = ContentMdp(
                max_aoi=cfg.max_aoi[h],
                popularity=float(popularity[k, h]),
                cost=float(costs[k, h]),
                weight=cfg.aoi_weight,
                discount=discount,
            )
            table[(k, h)] = solve_content_mdp(mdp, epsilon)
    return table


def select_updates(state: CacheState, policies: PolicyTable, cfg: SystemConfig) -> UpdateAction:
    """Index rule: per RSU, refresh the max-advantage content if its advantage
    is positive, else issue nothing.  Ties break to the lowest content index."""
    action = UpdateAction.none(cfg)
    for k in range(cfg.num_rsus):
        best_h = -1
        best_adv = 0.0
        for h in coverage_of(k, cfg):
            policy = policies.get((k, h))
            if policy is None:
                raise MissingPolicy(f"no solved policy for rsu={k}, content={h}")
            adv = policy.advantage(int(state.rsu_aoi[k, h]))
            if adv > best_adv:      # strict: equal advantages keep the lower h
                best_adv = adv
                best_h = h
        if best_h >= 0:
            action.x[k, best_h] = 1
    return action


def baseline_policy(kind: str, state: CacheState, cfg: SystemConfig) -> UpdateAction:
    """Reference comparators: threshold, always_update, never_update, myopic_greedy."""
    if kind == "never_update":
        return UpdateAction.none(cfg)
    if kind == "threshold":
        return _threshold_action(state, cfg)
    if kind == "always_update":
        return _always_update_action(state, cfg)
    if kind == "myopic_greedy":
        return _myopic_action(state, cfg)
    raise UnknownKind(f"unknown refresh baseline {kind!r}")


def _threshold_action(state: CacheState, cfg: SystemConfig) -> UpdateAction:
    """Refresh the most-overdue covered content whose next-slot AoI would
    exceed its limit (earliest deadline first, tie-break lowest h)."""
    action = UpdateAction.none(cfg)
    limits = max_aoi_array(cfg)
    for k in range(cfg.num_rsus):
        best_h = -1
        best_slack = 0
        for h in coverage_of(k, cfg):
            slack = int(limits[h]) - (int(state.rsu_aoi[k, h]) + 1)
            if slack < 0 and (best_h < 0 or slack < best_slack):
                best_h = h
                best_slack = slack
        if best_h >= 0:
            action.x[k, best_h] = 1
    return action


def _always_update_action(state: CacheState, cfg: SystemConfig) -> UpdateAction:
    """Refresh, per RSU, the content with the highest popularity*max_aoi/AoI."""
    action = UpdateAction.none(cfg)
    limits = max_aoi_array(cfg)
    for k in range(cfg.num_rsus):
        best_h = -1
        best_score = -np.inf
        for h in coverage_of(k, cfg):
            score = state.popularity[k, h] * limits[h] / state.rsu_aoi[k, h]
            if score > best_score:
                best_score = float(score)
                best_h = h
        action.x[k, best_h] = 1
    return action


def _myopic_action(state: CacheState, cfg: SystemConfig) -> UpdateAction:
    """Per RSU, the single refresh (or none) maximizing this slot's stage reward.

    Uses the additive per-content decomposition: refreshing (k, h) changes the
    slot reward by weight*p*(max/mbs_aoi - max/(aoi+1)) - cost.  Refresh only
    on strict improvement, so with aoi_weight = 0 this degenerates to
    never_update.  Ties between improving contents break to the lowest h.
    """
    action = UpdateAction.none(cfg)
    limits = max_aoi_array(cfg)
    costs = update_cost_array(cfg)
    for k in range(cfg.num_rsus):
        best_h = -1
        best_gain = 0.0
        for h in coverage_of(k, cfg):
            ratio_gain = limits[h] / state.mbs_aoi[h] - limits[h] / (state.rsu_aoi[k, h] + 1)
            gain = cfg.aoi_weight * state.popularity[k, h] * ratio_gain - costs[k, h]
            if gain > best_gain:
                best_gain = float(gain)
                best_h = h
        if best_h >= 0:
            action.x[k, best_h] = 1
    return action


def policy_thresholds(policies: PolicyTable) -> dict[str, int | None]:
    """Per-(k, h) smallest AoI at which refresh is chosen (inspection dump)."""
    return {f"{k}:{h}": pol.refresh_threshold() for (k, h), pol in sorted(policies.items())}


def export_policy_json(policies: PolicyTable, path: str | Path) -> None:
    """Write the threshold structure of a solved policy table as JSON."""
    try:
        Path(path).write_text(json.dumps(policy_thresholds(policies), indent=2) + "\n")
    except OSError as exc:
        raise IoFailure(f"cannot write policy dump {path}: {exc}") from exc
