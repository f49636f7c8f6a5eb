"""Command-line entry point.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

Configuration files are INI; every ``section.key`` can also be given as
``--set section.key=value`` (flags win over the file)::

    [experiment]
    preset = exp3-0.2
    [graph]
    path = facebook_combined.txt      ; or nodes/m/triad_prob/seed
    [model]
    p = 0.5
    delta = 0.2
    [schedule]
    kind = linear
    c0 = 0.005
    t_max = 150
    [run]
    runs = 100
    seed = 7
"""

from __future__ import annotations

import argparse
import configparser
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .experiments import PRESETS, SWEEP_PARAMS, ExperimentSpec, ExperimentResult, compare_series, run_model_replicates, sweep
from .graph import EdgeListError, Graph, generate_synthetic, graph_stats, load_edge_list, save_edge_list
from .model import CSV_HEADER, TimeSeries, run_model
from .simulator import draw_scenario, run_simulation

log = logging.getLogger("trojanprop")

OUT_ENV = "TROJANPROP_OUT"

# section.key -> type
KEYS: dict[str, type] = {
    "experiment.id": str,
    "experiment.preset": str,
    "graph.path": str,
    "graph.nodes": int,
    "graph.m": int,
    "graph.triad_prob": float,
    "graph.seed": int,
    "model.p": float,
    "model.delta": float,
    "model.q": float,
    "model.tau_mean": float,
    "model.mode": str,
    "schedule.kind": str,
    "schedule.beta_max": float,
    "schedule.t_max": int,
    "schedule.c0": float,
    "schedule.c1": float,
    "schedule.c2": float,
    "run.runs": int,
    "run.horizon": int,
    "run.seed": int,
    "run.stop_window": int,
    "run.stop_threshold": int,
    "run.stop_metric": str,
    "run.workers": int,
    "output.dir": str,
}


class ConfigError(Exception):
    pass


def _parse_value(key: str, raw: str):
    try:
        return KEYS[key](raw)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def read_config(path: str | None) -> dict[str, str]:
    if not path:
        return {}
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read(path, encoding="utf-8")
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return {f"{sec}.{k}": v for sec in cp.sections() for k, v in cp[sec].items()}


def parse_overrides(pairs: list[str]) -> dict[str, str]:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def resolve(args) -> tuple[dict, ExperimentSpec]:
    """Merge preset, config file, dedicated flags and ``--set`` overrides."""
    raw = read_config(getattr(args, "config", None))
    raw.update(parse_overrides(getattr(args, "set", None) or []))
    flag_map = {
        "preset": "experiment.preset",
        "graph": "graph.path",
        "out": "output.dir",
        "seed": "run.seed",
        "runs": "run.runs",
        "horizon": "run.horizon",
        "workers": "run.workers",
    }
    for attr, key in flag_map.items():
        val = getattr(args, attr, None)
        if val is not None:
            raw[key] = str(val)
    unknown = sorted(k for k in raw if k not in KEYS)
    if unknown:
        raise ConfigError("unknown config keys: " + ", ".join(unknown))
    cfg = {k: _parse_value(k, v) for k, v in raw.items()}

    name = cfg.get("experiment.preset")
    if name:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
        spec = PRESETS[name]
    else:
        spec = ExperimentSpec("custom")
    upd: dict = {}
    for key, field_name in (
        ("experiment.id", "id"),
        ("model.p", "p"),
        ("model.delta", "delta"),
        ("model.q", "q"),
        ("model.tau_mean", "tau_mean"),
        ("model.mode", "mode"),
        ("run.runs", "runs"),
        ("run.horizon", "horizon"),
        ("run.seed", "seed"),
        ("run.stop_window", "stop_window"),
        ("run.stop_threshold", "stop_threshold"),
        ("run.stop_metric", "stop_metric"),
        ("graph.path", "graph_path"),
    ):
        if key in cfg:
            upd[field_name] = cfg[key]
    sched = {k.split(".", 1)[1]: v for k, v in cfg.items() if k.startswith("schedule.")}
    try:
        if sched:
            upd["schedule"] = replace(spec.schedule, **sched)
        spec = replace(spec, **upd)
        spec.params()
        spec.run_config()
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from None
    if spec.mode not in ("sequential", "literal-additive"):
        raise ConfigError(f"unknown model.mode {spec.mode!r}")
    return cfg, spec


def load_graph(cfg: dict, spec: ExperimentSpec) -> Graph:
    if spec.graph_path:
        if not os.path.exists(spec.graph_path):
            raise ConfigError(f"graph file not found: {spec.graph_path}")
        return load_edge_list(spec.graph_path)
    if "graph.nodes" in cfg:
        try:
            return generate_synthetic(
                cfg["graph.nodes"], cfg.get("graph.m", 3), cfg.get("graph.triad_prob", 0.0), cfg.get("graph.seed", 0)
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError("no graph given (use --graph, graph.path or graph.nodes)")


def _out_root(cfg: dict) -> Path:
    return Path(cfg.get("output.dir") or os.environ.get(OUT_ENV) or "out")


def _workers(cfg: dict) -> int:
    return cfg.get("run.workers") or os.cpu_count() or 1


def _manifest(d: Path, cfg: dict, spec: ExperimentSpec, command: str) -> None:
    man = {
        "command": command,
        "version": __version__,
        "spec": spec.to_dict(),
        "config": {k: cfg[k] for k in sorted(cfg) if k != "run.workers"},
        "seed": spec.seed,
    }
    d.mkdir(parents=True, exist_ok=True)
    with open(d / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(man, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_graph_stats(args) -> int:
    if not os.path.exists(args.path):
        raise ConfigError(f"graph file not found: {args.path}")
    g = load_edge_list(args.path)
    st = graph_stats(g, exact_cap=args.exact_cap, sample_sources=args.sample_sources, seed=args.seed)
    print(st.to_json(indent=2))
    return 0


def cmd_generate_graph(args) -> int:
    try:
        g = generate_synthetic(args.nodes, args.m, args.triad_prob, args.seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.out == "-":
        save_edge_list(g, sys.stdout)
    else:
        save_edge_list(g, args.out)
    return 0


def cmd_run(args) -> int:
    cfg, spec = resolve(args)
    g = load_graph(cfg, spec)
    res_model = run_model_replicates(g, spec, _workers(cfg))
    sim = run_simulation(g, spec.run_config(), _workers(cfg))
    res = ExperimentResult(spec, res_model, sim, compare_series(res_model, sim.average))
    d = res.write(_out_root(cfg))
    _manifest(d, cfg, spec, "run")
    print(str(d / "comparison.json"))
    return 0


def cmd_model(args) -> int:
    cfg, spec = resolve(args)
    g = load_graph(cfg, spec)
    d = _out_root(cfg) / spec.id
    d.mkdir(parents=True, exist_ok=True)
    if args.dump:
        # a dump describes one trajectory: replicate 0's scenario
        infiltrator, tau = draw_scenario(g, spec.run_config(), 0)
        with open(d / "distribution.jsonl", "w", encoding="utf-8") as fh:
            ts = run_model(g, replace(spec.params(), tau=tau), spec.schedule, infiltrator, spec.horizon, spec.mode, dump=fh)
    else:
        ts = run_model_replicates(g, spec, _workers(cfg))
    ts.to_csv(d / "model.csv")
    _manifest(d, cfg, spec, "model")
    print(str(d / "model.csv"))
    return 0


def cmd_simulate(args) -> int:
    cfg, spec = resolve(args)
    g = load_graph(cfg, spec)
    sim = run_simulation(g, spec.run_config(), _workers(cfg))
    d = _out_root(cfg) / spec.id
    d.mkdir(parents=True, exist_ok=True)
    sim.average.to_csv(d / "sim_avg.csv")
    for k, ts in enumerate(sim.runs):
        ts.to_csv(d / f"sim_run_{k}.csv")
    with open(d / "sim_runs.json", "w", encoding="utf-8") as fh:
        json.dump([r.to_dict() for r in sim.records], fh, indent=2, sort_keys=True)
        fh.write("\n")
    _manifest(d, cfg, spec, "simulate")
    print(str(d / "sim_avg.csv"))
    return 0


def _read_series(path: str) -> TimeSeries:
    if not os.path.exists(path):
        raise ConfigError(f"file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
    if tuple(h.strip() for h in header.split(",")) != CSV_HEADER:
        raise ConfigError(f"{path}: header {header!r} does not match {','.join(CSV_HEADER)}")
    return TimeSeries.from_csv(path)


def cmd_compare(args) -> int:
    a = _read_series(args.model_csv)
    b = _read_series(args.sim_csv)
    if len(a) != len(b):
        print(f"warning: lengths differ ({len(a)} vs {len(b)}); truncating to the shorter", file=sys.stderr)
    cols = ("susceptible", "infected", "recovered", "immune", "protected")
    print(json.dumps(compare_series(a, b, cols), indent=2, sort_keys=True))
    return 0


def cmd_sweep(args) -> int:
    cfg, spec = resolve(args)
    g = load_graph(cfg, spec)
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
        rows = sweep(args.param, values, spec, g, _workers(cfg))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    print(json.dumps(rows, indent=2))
    return 0


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--preset", help=f"experiment preset ({', '.join(PRESETS)})")
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--out", help=f"output root (default ${OUT_ENV} or ./out)")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--runs", type=int, help="replicates / simulation runs")
    p.add_argument("--horizon", type=int, help="number of time steps")
    p.add_argument("--workers", type=int, help="worker processes (default: all cores)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key, e.g. model.p=0.75")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="trojanprop",
        description="Trojan propagation on social graphs: probability model, simulator and experiment presets.",
        epilog=__doc__.split("\n", 2)[2],
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("graph-stats", help="print graph statistics as JSON")
    p.add_argument("path")
    p.add_argument("--exact-cap", type=int, default=10_000, help="largest component size for exact all-pairs paths")
    p.add_argument("--sample-sources", type=int, default=1_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_graph_stats)

    p = sub.add_parser("generate-graph", help="write a synthetic clustered power-law graph")
    p.add_argument("--nodes", type=int, required=True)
    p.add_argument("--m", type=int, required=True, help="edges added per new node")
    p.add_argument("--triad-prob", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.set_defaults(func=cmd_generate_graph)

    p = sub.add_parser("run", help="model + simulation + comparison for one experiment")
    _add_run_options(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("model", help="model replicates only")
    _add_run_options(p)
    p.add_argument("--dump", action="store_true", help="write per-node distributions of replicate 0 as JSON lines")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("simulate", help="Monte Carlo runs only")
    _add_run_options(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="compare two time-series CSV files")
    p.add_argument("model_csv")
    p.add_argument("sim_csv")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="peak infection across values of one parameter")
    _add_run_options(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True, help="comma-separated values")
    p.set_defaults(func=cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (EdgeListError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
