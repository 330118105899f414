import numpy as np
import pytest

from aoicache import (
    ServiceQueue,
    aoi_admissible,
    decide_service,
    queue_step,
    serve_threshold,
    service_baseline,
)
from aoicache.errors import BadPeriod, NegativeArrivals, OutOfCoverage, UnknownKind

from .test_aoi import make_state, two_rsu_config
from .test_config import base_config


def test_empty_queue_idles():
    cfg = base_config(lyapunov_v=10.0, service_cost=2.0, service_rate=1.0)
    decision = decide_service(ServiceQueue(backlog=0.0, rsu_id=0), cfg)
    assert decision.alpha == "idle"


def test_huge_queue_serves():
    cfg = base_config(lyapunov_v=10.0, service_cost=2.0, service_rate=1.0)
    decision = decide_service(ServiceQueue(backlog=1e9, rsu_id=0), cfg)
    assert decision.alpha == "serve"


def test_threshold_boundary_and_tie():
    cfg = base_config(lyapunov_v=10.0, service_cost=2.0, service_rate=1.0)
    assert serve_threshold(cfg) == pytest.approx(20.0)
    assert decide_service(ServiceQueue(21.0, 0), cfg).alpha == "serve"
    assert decide_service(ServiceQueue(20.0, 0), cfg).alpha == "idle"   # exact tie


def test_decision_invariant_holds():
    cfg = base_config()
    for backlog in (0.0, 3.0, 5.0, 500.0):
        d = decide_service(ServiceQueue(backlog, 0), cfg)
        assert (d.alpha == "serve") == (d.objective_serve < d.objective_idle)


def test_queue_step_lindley_examples():
    cfg = base_config(service_rate=3.0)
    serve = decide_service(ServiceQueue(1e9, 0), cfg)
    idle = decide_service(ServiceQueue(0.0, 0), cfg)
    assert serve.serving and not idle.serving
    assert queue_step(ServiceQueue(5.0, 0), 2.0, serve, cfg).backlog == pytest.approx(4.0)
    assert queue_step(ServiceQueue(1.0, 0), 0.0, serve, cfg).backlog == 0.0
    assert queue_step(ServiceQueue(0.0, 0), 0.0, idle, cfg).backlog == 0.0
    with pytest.raises(NegativeArrivals):
        queue_step(ServiceQueue(5.0, 0), -1.0, idle, cfg)


def test_aoi_admissible_boundary():
    cfg = two_rsu_config()
    state = make_state(cfg, [[10, 11, 1, 1], [1, 1, 1, 1]], [1, 1, 1, 1])
    assert aoi_admissible(0, 0, state, cfg) is True        # inclusive boundary
    assert aoi_admissible(0, 1, state, cfg) is False
    assert aoi_admissible(1, 2, state, cfg) is True        # fresh floor
    with pytest.raises(OutOfCoverage):
        aoi_admissible(0, 3, state, cfg)


def test_service_baselines():
    cfg = base_config()
    assert service_baseline("always_serve", ServiceQueue(0.0, 0), 1, cfg).alpha == "idle"
    assert service_baseline("always_serve", ServiceQueue(0.5, 0), 1, cfg).alpha == "serve"
    assert service_baseline("periodic", ServiceQueue(7.0, 0), 4, cfg, period=3).alpha == "idle"
    assert service_baseline("periodic", ServiceQueue(7.0, 0), 6, cfg, period=3).alpha == "serve"
    assert service_baseline("periodic", ServiceQueue(0.0, 0), 6, cfg, period=3).alpha == "idle"
    with pytest.raises(BadPeriod):
        service_baseline("periodic", ServiceQueue(1.0, 0), 1, cfg, period=0)
    with pytest.raises(UnknownKind):
        service_baseline("sometimes", ServiceQueue(1.0, 0), 1, cfg)
    for backlog, slot in ((0.0, 1), (2.0, 3), (5.0, 4)):
        d = service_baseline("periodic", ServiceQueue(backlog, 0), slot, cfg, period=3)
        assert (d.alpha == "serve") == (d.objective_serve < d.objective_idle)


def test_threshold_equivalence_randomized():
    """decide_service agrees with the closed-form threshold away from exact ties."""
    rng = np.random.default_rng(17)
    checked = 0
    while checked < 10_000:
        cfg = base_config(
            lyapunov_v=float(rng.uniform(0.0, 100.0)),
            service_cost=float(rng.uniform(0.0, 10.0)),
            service_rate=float(rng.uniform(0.1, 10.0)),
        )
        backlog = float(rng.uniform(0.0, 2000.0))
        threshold = serve_threshold(cfg)
        if backlog == threshold:
            continue
        decision = decide_service(ServiceQueue(backlog, 0), cfg)
        assert (decision.alpha == "serve") == (backlog > threshold)
        checked += 1


def test_backlog_never_negative_under_arbitrary_decisions():
    cfg = base_config(service_rate=2.5)
    rng = np.random.default_rng(23)
    q = ServiceQueue(0.0, 0)
    serve = decide_service(ServiceQueue(1e9, 0), cfg)
    idle = decide_service(ServiceQueue(0.0, 0), cfg)
    for _ in range(2000):
        decision = serve if rng.random() < 0.5 else idle
        q = queue_step(q, float(rng.uniform(0, 3)), decision, cfg)
        assert q.backlog >= 0.0


# ---------------------------------------------------------------------------
# Simulation-level drift-penalty behavior (arrivals at half the service rate;
# the 1-RSU road makes queue arrivals exogenous Poisson)
# ---------------------------------------------------------------------------


def _queue_run_stats(v, seed, kind="lyapunov", horizon=4000):
    from aoicache import run
    from aoicache.config import ServicePolicyChoice

    cfg = base_config(num_rsus=1, regions_per_rsu=2, num_regions=2,
                      max_aoi=(50, 50), update_cost=((0.0, 0.0),),
                      policy="never_update", uv_arrival_rate=1.0, uv_speed=1.0,
                      service_rate=2.0, service_cost=1.0, lyapunov_v=float(v),
                      horizon_slots=horizon, seed=seed,
                      service_policy=ServicePolicyChoice(kind=kind))
    traces = run(cfg)
    n = len(traces)
    mean_backlog = sum(t.backlogs[0] for t in traces) / n
    mean_cost = sum(cfg.service_cost * t.serve_decisions[0] for t in traces) / n
    return mean_backlog, mean_cost


def test_doubling_v_trades_backlog_for_cost():
    """Doubling V never lowers average backlog and never raises average cost
    (seed-averaged, stable-load regime)."""
    for v in (1.0, 8.0):
        lo_b, lo_c = 0.0, 0.0
        hi_b, hi_c = 0.0, 0.0
        for seed in range(20):
            b, c = _queue_run_stats(v, seed)
            lo_b += b
            lo_c += c
            b, c = _queue_run_stats(2 * v, seed)
            hi_b += b
            hi_c += c
        assert hi_b >= lo_b - 1e-9, f"backlog decreased when doubling V={v}"
        assert hi_c <= lo_c + 1e-9, f"cost increased when doubling V={v}"
        assert lo_b / 20 < v * 1.0 / 2.0 + 20.0          # finite time-average


def test_lyapunov_cost_never_exceeds_always_serve():
    for v in (1.0, 10.0, 40.0):
        for seed in range(8):
            _, lyap_cost = _queue_run_stats(v, seed)
            _, always_cost = _queue_run_stats(v, seed, kind="always_serve")
            assert lyap_cost <= always_cost + 1e-12
