"""Named experiment presets wiring graph, model, simulator and metrics together."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .graph import Graph, load_edge_list
from .metrics import compare
from .model import (
    EXPONENTIAL_PRESETS,
    LINEAR_PRESETS,
    AvSchedule,
    Mode,
    NodeParams,
    TimeSeries,
    run_model,
)
from .simulator import RunConfig, SimResult, draw_scenario, parallel_map, run_simulation

CURVES = ("susceptible", "infected", "protected", "recovered", "immune")


@dataclass(frozen=True)
class ExperimentSpec:
    id: str
    p: float = 0.5
    delta: float = 0.0
    q: float = 0.0
    schedule: AvSchedule = field(default_factory=AvSchedule)
    tau_mean: float = 40.0
    runs: int = 100
    horizon: int = 150
    seed: int = 0
    mode: Mode = "sequential"
    stop_window: int = 4
    stop_threshold: int = 10
    stop_metric: str = "infected"
    graph_path: str | None = None

    def params(self) -> NodeParams:
        return NodeParams(p=self.p, delta=self.delta, q=self.q)

    def run_config(self) -> RunConfig:
        return RunConfig(
            params=self.params(),
            schedule=self.schedule,
            horizon=self.horizon,
            stop_window=self.stop_window,
            stop_threshold=self.stop_threshold,
            stop_metric=self.stop_metric,  # type: ignore[arg-type]
            runs=self.runs,
            seed=self.seed,
            tau_mean=self.tau_mean,
        )

    def to_dict(self) -> dict:
        d = asdict(self)
        d["schedule"] = self.schedule.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        d = dict(d)
        sch = dict(d.pop("schedule", {}) or {})
        sch["table"] = tuple(tuple(x) for x in sch.get("table", ()))
        return cls(schedule=AvSchedule(**sch), **d)


def _linear(t_max: int) -> AvSchedule:
    return AvSchedule.linear(LINEAR_PRESETS[t_max], t_max)


def _exponential(t_max: int) -> AvSchedule:
    c1, c2 = EXPONENTIAL_PRESETS[t_max]
    return AvSchedule.exponential(c1, c2, t_max)


def _build_presets() -> dict[str, ExperimentSpec]:
    ps: dict[str, ExperimentSpec] = {}
    ps["exp1a"] = ExperimentSpec("exp1a", p=0.5)
    ps["exp1b"] = ExperimentSpec("exp1b", p=0.75)
    for tm in (150, 100, 25):
        ps[f"exp2-linear-{tm}"] = ExperimentSpec(f"exp2-linear-{tm}", schedule=_linear(tm))
        ps[f"exp2-exp-{tm}"] = ExperimentSpec(f"exp2-exp-{tm}", schedule=_exponential(tm))
    for d in ("0", "0.2", "0.4"):
        ps[f"exp3-{d}"] = ExperimentSpec(f"exp3-{d}", delta=float(d), schedule=_linear(150))
        ps[f"exp4-{d}"] = ExperimentSpec(f"exp4-{d}", q=float(d), schedule=_linear(150))
    ps["exp5-nodisinf"] = ExperimentSpec("exp5-nodisinf", tau_mean=20.0, horizon=80)
    # the collaborative run uses a 0.05*t ramp that saturates at t = 15
    ps["exp5-collab"] = ExperimentSpec(
        "exp5-collab", delta=0.2, tau_mean=20.0, horizon=80, schedule=AvSchedule.linear(0.05, 16)
    )
    return ps


PRESETS: dict[str, ExperimentSpec] = _build_presets()


def preset(name: str, **overrides) -> ExperimentSpec:
    try:
        base = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return replace(base, **overrides) if overrides else base


def _model_one(args):
    g, spec, k = args
    cfg = spec.run_config()
    infiltrator, tau = draw_scenario(g, cfg, k)
    params = replace(spec.params(), tau=tau)
    return run_model(g, params, spec.schedule, infiltrator, spec.horizon, spec.mode)


def run_model_replicates(g: Graph, spec: ExperimentSpec, workers: int | None = 1) -> TimeSeries:
    """Average the model over ``spec.runs`` scenarios.

    Replicate ``k`` uses the same infiltrator and visit periods as
    simulation run ``k``.
    """
    series = parallel_map(_model_one, [(g, spec, k) for k in range(spec.runs)], workers)
    avg = TimeSeries.mean(series)
    avg.meta = {
        "replicates": spec.runs,
        "clamp_events": int(sum(s.meta.get("clamp_events", 0) for s in series)),
    }
    return avg


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    model: TimeSeries
    sim: SimResult
    comparison: dict

    def write(self, out_dir: str | os.PathLike) -> Path:
        """Write CSV/JSON artifacts under ``out_dir/<id>/`` and return that path."""
        d = Path(out_dir) / self.spec.id
        d.mkdir(parents=True, exist_ok=True)
        self.model.to_csv(d / "model.csv")
        self.sim.average.to_csv(d / "sim_avg.csv")
        for k, ts in enumerate(self.sim.runs):
            ts.to_csv(d / f"sim_run_{k}.csv")
        _dump_json(d / "sim_runs.json", [r.to_dict() for r in self.sim.records])
        _dump_json(d / "comparison.json", self.comparison)
        _dump_json(d / "spec.json", self.spec.to_dict())
        return d


def _dump_json(path: Path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=False)
        fh.write("\n")


def compare_series(model: TimeSeries, sim: TimeSeries, curves=CURVES) -> dict:
    n = min(len(model), len(sim))
    return {c: compare(model.column(c)[:n], sim.column(c)[:n]) for c in curves}


def resolve_graph(spec: ExperimentSpec, graph: Graph | None) -> Graph:
    if graph is not None:
        return graph
    if not spec.graph_path:
        raise ValueError(f"experiment {spec.id!r} has no graph")
    if not os.path.exists(spec.graph_path):
        raise FileNotFoundError(f"graph file not found: {spec.graph_path}")
    return load_edge_list(spec.graph_path)


def run_experiment(
    spec: ExperimentSpec,
    graph: Graph | None = None,
    out_dir: str | os.PathLike | None = None,
    workers: int | None = 1,
) -> ExperimentResult:
    """Run model replicates and simulations for ``spec`` and compare them."""
    g = resolve_graph(spec, graph)
    model = run_model_replicates(g, spec, workers)
    sim = run_simulation(g, spec.run_config(), workers)
    res = ExperimentResult(spec, model, sim, compare_series(model, sim.average))
    if out_dir is not None:
        res.write(out_dir)
    return res


SWEEP_PARAMS = ("p", "delta", "q", "t_max", "tau_mean")


def _with_t_max(schedule: AvSchedule, t_max: int) -> AvSchedule:
    # keep the ramp ending at beta_max when t_max moves
    if schedule.kind == "linear":
        return replace(schedule, t_max=t_max, c0=schedule.beta_max / t_max)
    if schedule.kind == "exponential":
        c1 = schedule.c1 or 0.01
        return replace(schedule, t_max=t_max, c1=c1, c2=math.log(schedule.beta_max / c1) / t_max)
    return replace(schedule, t_max=t_max)


def sweep(
    param: str,
    values,
    base: ExperimentSpec,
    graph: Graph | None = None,
    workers: int | None = 1,
) -> list[dict]:
    """Model-averaged peak infection and final protection for each value of ``param``."""
    if param not in SWEEP_PARAMS:
        raise ValueError(f"cannot sweep {param!r}; choose from {', '.join(SWEEP_PARAMS)}")
    values = list(values)
    if not values:
        raise ValueError("no sweep values")
    g = resolve_graph(base, graph)
    rows = []
    for v in values:
        if param == "t_max":
            spec = replace(base, schedule=_with_t_max(base.schedule, int(v)))
        else:
            spec = replace(base, **{param: float(v)})
            spec.params()  # validates ranges
        ts = run_model_replicates(g, spec, workers)
        k = int(np.argmax(ts.infected))
        rows.append(
            {
                "param": param,
                "value": v,
                "peak_infected": float(ts.infected[k]),
                "peak_t": int(ts.t[k]),
                "final_protected": float(ts.protected[-1]),
            }
        )
    return rows
