"""Discrete-time Monte Carlo simulation with one label per node.

Each run draws its own infiltrator and visit periods, then advances all
nodes synchronously from the previous step's labels.  Random streams are
derived from ``(master_seed, run_index)`` so any run can be replayed on
its own and results do not depend on how runs are scheduled.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np

from .graph import Graph
from .model import IMM, INF, REC, SUS, AvSchedule, NodeParams, TimeSeries, beta, sample_tau

log = logging.getLogger(__name__)

StopMetric = Literal["new", "infected", "off"]


@dataclass(frozen=True)
class RunConfig:
    """Simulation settings.

    ``tau_mean`` set: each run draws visit periods from an exponential with
    that mean (rounded up); ``None`` uses ``params.tau`` as given.
    ``infiltrator`` fixes the seed node; ``None`` draws one per run.

    Stop rule: once the watched count (``stop_metric``) has reached
    ``stop_threshold``, a run ends after it stays below the threshold for
    ``stop_window`` consecutive steps.  ``"new"`` watches newly infected
    nodes per step, ``"infected"`` the current infected count.
    """

    params: NodeParams = field(default_factory=NodeParams)
    schedule: AvSchedule = field(default_factory=AvSchedule)
    horizon: int = 150
    stop_window: int = 4
    stop_threshold: int = 10
    stop_metric: StopMetric = "infected"
    runs: int = 100
    seed: int = 0
    tau_mean: float | None = 40.0
    infiltrator: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.stop_window < 1:
            raise ValueError("stop_window must be >= 1")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.stop_metric not in ("new", "infected", "off"):
            raise ValueError(f"unknown stop_metric {self.stop_metric!r}")
        if self.tau_mean is not None and self.tau_mean <= 0:
            raise ValueError("tau_mean must be positive")


def scenario_rng(seed: int, run: int) -> np.random.Generator:
    """Stream for a run's infiltrator and visit periods (shared with the model)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run, 0)))


def dynamics_rng(seed: int, run: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(run, 1)))


def draw_scenario(g: Graph, cfg: RunConfig, run: int) -> tuple[int, np.ndarray]:
    """Infiltrator and per-node visit periods for run ``run``."""
    rng = scenario_rng(cfg.seed, run)
    n = g.node_count
    k = int(rng.integers(n)) if cfg.infiltrator is None else int(cfg.infiltrator)
    if not 0 <= k < n:
        raise IndexError(f"infiltrator {k} outside 0..{n - 1}")
    if cfg.tau_mean is None:
        tau = np.broadcast_to(np.asarray(cfg.params.tau, dtype=np.int64), (n,)).copy()
    else:
        tau = sample_tau(rng, cfg.tau_mean, n)
    return k, tau


@dataclass
class RunRecord:
    run: int
    seed: int
    infiltrator: int
    stop_step: int
    stopped_early: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SimResult:
    runs: list[TimeSeries]
    records: list[RunRecord]
    average: TimeSeries


def _labels_to_counts(labels: np.ndarray) -> np.ndarray:
    return np.bincount(labels, minlength=4)


def simulate_run(g: Graph, cfg: RunConfig, run: int, trajectory: bool = False):
    """Simulate one run.  Returns ``(TimeSeries, RunRecord, states)``.

    ``states`` is the (steps+1, V) label matrix when ``trajectory`` is set,
    otherwise ``None``.
    """
    n = g.node_count
    infiltrator, tau = draw_scenario(g, cfg, run)
    prm = cfg.params.expand(n)
    p, delta, q = prm.p, prm.delta, prm.q
    deg = g.degree
    inv_deg = np.divide(1.0, deg, out=np.zeros(n), where=deg > 0)
    adj = g.adjacency
    rng = dynamics_rng(cfg.seed, run)
    recovers = bool(np.any(q) or np.any(delta))

    labels = np.full(n, SUS, dtype=np.int8)
    labels[infiltrator] = INF
    counts = [_labels_to_counts(labels)]
    states = [labels.copy()] if trajectory else None
    below = 0
    armed = False
    stop_step = cfg.horizon
    for t in range(1, cfg.horizon + 1):
        # draw the same number of uniforms every step so streams stay aligned
        u_imm = rng.random(n)
        u_inf = rng.random(n)
        u_rec = rng.random(n)
        infected = labels == INF
        sus = labels == SUS
        visit = (t % tau) == 0
        k_inf = adj @ infected.astype(np.float64)
        b = beta(cfg.schedule, t)
        new = labels.copy()
        to_imm = sus & (u_imm < b)
        new[to_imm] = IMM
        p_inf = 1.0 - np.power(1.0 - p, k_inf)
        to_inf = sus & ~to_imm & visit & (u_inf < p_inf)
        new[to_inf] = INF
        if recovers:
            a = np.clip(q + delta * (deg - k_inf) * inv_deg, 0.0, 1.0)
            new[infected & visit & (u_rec < a)] = REC
        labels = new
        counts.append(_labels_to_counts(labels))
        if trajectory:
            states.append(labels.copy())
        if cfg.stop_metric != "off":
            watched = int(np.count_nonzero(to_inf)) if cfg.stop_metric == "new" else int(counts[-1][INF])
            if watched >= cfg.stop_threshold:
                armed = True
                below = 0
            elif armed:
                below += 1
                if below >= cfg.stop_window:
                    stop_step = t
                    break
    ts = TimeSeries.from_counts(np.asarray(counts), meta={"run": run, "infiltrator": infiltrator})
    rec = RunRecord(run, cfg.seed, infiltrator, stop_step, stop_step < cfg.horizon)
    return ts, rec, (np.asarray(states) if trajectory else None)


def _one(args):
    g, cfg, run = args
    ts, rec, _ = simulate_run(g, cfg, run)
    return ts, rec


def parallel_map(fn, items: list, workers: int | None = 1) -> list:
    """Ordered map, optionally over a process pool."""
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))


def run_simulation(g: Graph, cfg: RunConfig, workers: int | None = 1) -> SimResult:
    """Run ``cfg.runs`` independent simulations and average them per step.

    Runs that stopped early are padded with their last counts up to
    ``horizon`` before averaging.
    """
    out = parallel_map(_one, [(g, cfg, k) for k in range(cfg.runs)], workers)
    runs = [ts for ts, _ in out]
    records = [rec for _, rec in out]
    avg = TimeSeries.mean(runs, cfg.horizon + 1)
    avg.meta = {"runs": cfg.runs, "seed": cfg.seed}
    return SimResult(runs, records, avg)


def replay(g: Graph, cfg: RunConfig, run_index: int) -> np.ndarray:
    """Label trajectory of run ``run_index``: array of shape (steps+1, V)."""
    if not 0 <= run_index < cfg.runs:
        raise IndexError(f"run index {run_index} outside 0..{cfg.runs - 1}")
    return simulate_run(g, cfg, run_index, trajectory=True)[2]
