import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trojanprop.graph import Graph, generate_synthetic
from trojanprop.model import IMM, INF, REC, AvSchedule, NodeParams, run_model
from trojanprop.simulator import RunConfig, draw_scenario, replay, run_simulation, simulate_run


def _cfg(**kw) -> RunConfig:
    base = dict(params=NodeParams(p=1.0), horizon=5, runs=3, tau_mean=None, stop_metric="off")
    base.update(kw)
    return RunConfig(**base)


def test_triangle_deterministic(triangle):
    res = run_simulation(triangle, _cfg())
    for ts in res.runs:
        assert list(ts.infected) == [1, 3, 3, 3, 3, 3]


def test_no_transmission(small_graph):
    res = run_simulation(small_graph, _cfg(params=NodeParams(p=0.0), horizon=20, runs=5))
    for ts in res.runs:
        assert np.all(ts.infected == 1)


def test_config_validation():
    with pytest.raises(ValueError):
        RunConfig(runs=0)
    with pytest.raises(ValueError):
        RunConfig(stop_window=0)
    with pytest.raises(ValueError):
        RunConfig(stop_metric="total")


@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**31), p=st.floats(0, 1), q=st.floats(0, 0.5), delta=st.floats(0, 0.5))
def test_conservation_and_absorption(small_graph, seed, p, q, delta):
    cfg = RunConfig(
        params=NodeParams(p=p, q=q, delta=delta),
        schedule=AvSchedule.linear(0.02, 20),
        horizon=30,
        runs=2,
        seed=seed,
        tau_mean=3.0,
    )
    states = replay(small_graph, cfg, 1)
    n = small_graph.node_count
    assert states.shape[1] == n
    for a, b in zip(states[:-1], states[1:]):
        done = (a == REC) | (a == IMM)
        assert np.array_equal(a[done], b[done])
    for ts in run_simulation(small_graph, cfg).runs:
        assert np.all(ts.counts().sum(axis=1) == n)


def test_infected_nondecreasing_without_exits(medium_graph):
    cfg = RunConfig(params=NodeParams(p=0.3), horizon=40, runs=5, tau_mean=5.0, seed=3)
    for ts in run_simulation(medium_graph, cfg).runs:
        assert np.all(np.diff(ts.infected) >= 0)


def test_coupled_runs_dominate_in_p(medium_graph):
    kw = dict(horizon=40, runs=8, tau_mean=4.0, seed=21, stop_metric="off", schedule=AvSchedule.linear(0.01, 40))
    lo = run_simulation(medium_graph, RunConfig(params=NodeParams(p=0.2), **kw))
    hi = run_simulation(medium_graph, RunConfig(params=NodeParams(p=0.6), **kw))
    for a, b in zip(lo.runs, hi.runs):
        assert np.all(b.infected >= a.infected)


def test_replay_deterministic(small_graph):
    cfg = RunConfig(params=NodeParams(p=0.5, q=0.1), horizon=30, runs=4, seed=9, tau_mean=4.0)
    a = replay(small_graph, cfg, 2)
    b = replay(small_graph, cfg, 2)
    assert np.array_equal(a, b)
    ts, _, _ = simulate_run(small_graph, cfg, 2)
    assert np.array_equal((a == INF).sum(axis=1), ts.infected)


def test_replay_run_index_checked(small_graph):
    with pytest.raises(IndexError):
        replay(small_graph, RunConfig(runs=3), 3)


def test_parallel_matches_serial(small_graph):
    cfg = RunConfig(params=NodeParams(p=0.5, delta=0.2), horizon=40, runs=6, seed=4, tau_mean=5.0)
    a = run_simulation(small_graph, cfg, workers=1)
    b = run_simulation(small_graph, cfg, workers=2)
    assert np.array_equal(a.average.counts(), b.average.counts())
    assert [r.to_dict() for r in a.records] == [r.to_dict() for r in b.records]


def test_master_seed_changes_infiltrators():
    g = Graph.from_edges(4039, [(i, i + 1) for i in range(4038)])
    firsts = [draw_scenario(g, RunConfig(seed=s), 0)[0] for s in range(100)]
    assert len(set(firsts)) >= 90


def test_stop_rule_and_padding(medium_graph):
    cfg = RunConfig(
        params=NodeParams(p=0.5, q=0.5), horizon=150, runs=6, seed=2, tau_mean=2.0, stop_window=4, stop_threshold=10
    )
    res = run_simulation(medium_graph, cfg)
    for ts, rec in zip(res.runs, res.records):
        assert len(ts) == rec.stop_step + 1
        if rec.stopped_early:
            assert np.all(ts.infected[-4:] < 10)
    assert len(res.average) == 151


def test_stop_rule_needs_to_arm(triangle):
    # the count never reaches the threshold, so the run goes to the horizon
    res = run_simulation(triangle, _cfg(horizon=30, stop_metric="infected"))
    assert all(not r.stopped_early for r in res.records)


def test_one_step_monte_carlo_matches_model():
    g = generate_synthetic(200, 3, 0.7, 11)
    k = int(np.argmax(g.degree))
    prm = NodeParams(p=0.5, tau=1)
    cfg = RunConfig(params=prm, horizon=1, runs=4000, tau_mean=None, infiltrator=k, stop_metric="off")
    res = run_simulation(g, cfg)
    x = np.array([ts.infected[1] for ts in res.runs])
    expect = run_model(g, prm, AvSchedule(), k, 1).infected[1]
    se = x.std(ddof=1) / np.sqrt(len(x))
    assert abs(x.mean() - expect) <= 3 * se
