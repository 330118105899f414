"""AoI-aware cache refresh and queue-aware content service simulator."""

from .config import (
    PopularityMode,
    ServicePolicyChoice,
    SystemConfig,
    config_digest,
    config_from_dict,
    config_to_dict,
    coverage_of,
    load_config,
    rng_streams,
    save_config,
    validate_config,
)
from .state import CacheState, ServiceQueue, SlotTrace, UpdateAction, Uv
from .aoi import advance_mbs_aoi, advance_rsu_aoi, post_action_rsu_aoi
from .mdp import (
    ContentMdp,
    MdpPolicy,
    RewardBreakdown,
    aoi_utility,
    baseline_policy,
    export_policy_json,
    mbs_cost,
    select_updates,
    solve_content_mdp,
    solve_policy_table,
    stage_reward,
)
from .service import (
    ServiceDecision,
    aoi_admissible,
    decide_service,
    queue_step,
    serve_threshold,
    service_baseline,
)
from .engine import WorldState, make_world, run, run_world, step
from .metrics import RunSummary, read_traces, summarize, write_summary, write_traces
from .presets import PRESETS, fig1_preset, fig2_preset

__version__ = "0.1.0"
