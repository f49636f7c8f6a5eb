"""Per-node state-probability model of Trojan spread on an undirected graph.

Every node carries a probability vector over the four states
(susceptible, infected, recovered, immune).  One call to :func:`step`
advances all nodes from a shared snapshot of the previous time step, so the
update order of nodes does not matter.  Expected state counts are the
column sums of the probability matrix.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import IO, Callable, Literal, Sequence

import numpy as np

from .graph import Graph

SUS, INF, REC, IMM = 0, 1, 2, 3
STATE_NAMES = ("susceptible", "infected", "recovered", "immune")
CSV_HEADER = ("t", "susceptible", "infected", "recovered", "immune", "protected")

Mode = Literal["sequential", "literal-additive"]
MODES = ("sequential", "literal-additive")


@dataclass(frozen=True)
class NodeParams:
    """Behavioural parameters; each field is a scalar or a length-V array.

    p: probability of executing the malware after seeing the link
    delta: probability of accepting a clean-up solution from uninfected friends
    q: probability of recovering without friends' help
    tau: visit period in time units (integer >= 1)
    """

    p: float | np.ndarray = 0.5
    delta: float | np.ndarray = 0.0
    q: float | np.ndarray = 0.0
    tau: int | np.ndarray = 1

    def __post_init__(self):
        for name in ("p", "delta", "q"):
            a = np.asarray(getattr(self, name), dtype=float)
            if np.any((a < 0) | (a > 1)) or np.any(np.isnan(a)):
                raise ValueError(f"{name} must lie in [0, 1]")
        slack = 1.0 - np.asarray(self.q, dtype=float) - np.asarray(self.delta, dtype=float)
        if np.any(slack < -1e-12):
            raise ValueError("q + delta must not exceed 1")
        tau = np.asarray(self.tau)
        if np.any(tau < 1) or not np.all(np.equal(np.mod(tau, 1), 0)):
            raise ValueError("tau must be an integer >= 1")

    @property
    def pi(self) -> float | np.ndarray:
        """Probability an infected user takes no action: ``1 - q - delta``."""
        return 1.0 - np.asarray(self.q) - np.asarray(self.delta)

    def expand(self, n: int) -> "NodeParams":
        """Return a copy with every field broadcast to a length-``n`` array."""
        return NodeParams(
            p=np.broadcast_to(np.asarray(self.p, dtype=float), (n,)).copy(),
            delta=np.broadcast_to(np.asarray(self.delta, dtype=float), (n,)).copy(),
            q=np.broadcast_to(np.asarray(self.q, dtype=float), (n,)).copy(),
            tau=np.broadcast_to(np.asarray(self.tau, dtype=np.int64), (n,)).copy(),
        )

    def at(self, i: int) -> "NodeParams":
        """Scalar parameters of node ``i``."""
        def pick(x, cast):
            a = np.asarray(x)
            return cast(a if a.ndim == 0 else a[i])
        return NodeParams(pick(self.p, float), pick(self.delta, float), pick(self.q, float), pick(self.tau, int))


def sample_tau(rng: np.random.Generator, mean: float, n: int) -> np.ndarray:
    """Visit periods drawn from an exponential with the given mean, rounded up to >= 1."""
    return np.maximum(1, np.ceil(rng.exponential(mean, size=n))).astype(np.int64)


@dataclass(frozen=True)
class AvSchedule:
    """Rate at which AV updates make susceptible users immune.

    ``kind`` selects the ramp used for ``0 < t < t_max``:
    ``linear`` gives ``c0*t``, ``exponential`` gives ``c1*exp(c2*t)``,
    ``custom`` holds the value of the last ``(t, value)`` table entry at or
    before ``t``.  From ``t_max`` on, the value is ``beta_max``; ``none``
    is zero everywhere.
    """

    kind: Literal["none", "linear", "exponential", "custom"] = "none"
    beta_max: float = 0.75
    t_max: int = 150
    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    table: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.kind not in ("none", "linear", "exponential", "custom"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if not 0.0 <= self.beta_max <= 1.0:
            raise ValueError("beta_max must lie in [0, 1]")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.kind == "linear" and self.c0 < 0:
            raise ValueError("linear slope must be non-negative")
        if self.kind == "exponential" and (self.c1 < 0 or self.c2 < 0):
            raise ValueError("exponential coefficients must be non-negative")
        if self.kind == "custom":
            if not self.table:
                raise ValueError("custom schedule needs a table")
            ts = [t for t, _ in self.table]
            vs = [v for _, v in self.table]
            if ts != sorted(ts) or vs != sorted(vs):
                raise ValueError("custom table must be sorted and non-decreasing")

    @classmethod
    def linear(cls, c0: float, t_max: int, beta_max: float = 0.75) -> "AvSchedule":
        return cls("linear", beta_max=beta_max, t_max=t_max, c0=c0)

    @classmethod
    def exponential(cls, c1: float, c2: float, t_max: int, beta_max: float = 0.75) -> "AvSchedule":
        return cls("exponential", beta_max=beta_max, t_max=t_max, c1=c1, c2=c2)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("kind", "beta_max", "t_max", "c0", "c1", "c2")}
        d["table"] = [list(x) for x in self.table]
        return d


def beta(schedule: AvSchedule, t: int) -> float:
    """Per-step susceptible-to-immune probability at time ``t``."""
    if schedule.kind == "none" or t <= 0:
        return 0.0
    if t >= schedule.t_max:
        return schedule.beta_max
    if schedule.kind == "linear":
        val = schedule.c0 * t
    elif schedule.kind == "exponential":
        val = schedule.c1 * math.exp(schedule.c2 * t)
    else:
        val = 0.0
        for tk, vk in schedule.table:
            if tk > t:
                break
            val = vk
    return min(max(val, 0.0), schedule.beta_max)


# Ramps used in the experiments: beta_max = 0.75 reached at t_max.
LINEAR_PRESETS = {150: 0.005, 100: 0.0076, 25: 0.031}
EXPONENTIAL_PRESETS = {150: (0.01, 0.029), 100: (0.01, 0.044), 25: (0.01, 0.18)}


def visit_indicator(tau, t: int):
    """1 when a user with period ``tau`` checks messages at time ``t``."""
    v = np.equal(np.mod(t, tau), 0).astype(np.int8)
    return int(v) if v.ndim == 0 else v


@dataclass
class StateDistribution:
    """State probabilities of every node at time ``t``; ``probs`` has shape (V, 4)."""

    probs: np.ndarray
    t: int = 0
    clamp_events: int = 0

    @classmethod
    def initial(cls, n: int, infiltrator: int) -> "StateDistribution":
        if not 0 <= infiltrator < n:
            raise IndexError(f"infiltrator {infiltrator} outside 0..{n - 1}")
        probs = np.zeros((n, 4))
        probs[:, SUS] = 1.0
        probs[infiltrator] = (0.0, 1.0, 0.0, 0.0)
        return cls(probs, 0)

    @property
    def sus(self) -> np.ndarray:
        return self.probs[:, SUS]

    @property
    def inf(self) -> np.ndarray:
        return self.probs[:, INF]

    @property
    def rec(self) -> np.ndarray:
        return self.probs[:, REC]

    @property
    def imm(self) -> np.ndarray:
        return self.probs[:, IMM]

    def expected_counts(self) -> np.ndarray:
        return self.probs.sum(axis=0)


def gamma(i: int, dist_prev: StateDistribution, params: NodeParams, g: Graph) -> float:
    """Probability that node ``i`` gets infected on a visit, given the previous snapshot."""
    nbrs = g.neighbors(i)
    if len(nbrs) == 0:
        return 0.0
    p = params.at(i).p
    return float(1.0 - np.prod(1.0 - p * dist_prev.inf[nbrs]))


def alpha(i: int, dist_prev: StateDistribution, params: NodeParams, g: Graph) -> float:
    """Probability that infected node ``i`` recovers on a visit."""
    pi = params.at(i)
    nbrs = g.neighbors(i)
    if len(nbrs) == 0:
        return min(max(pi.q, 0.0), 1.0)
    val = pi.q + pi.delta / len(nbrs) * float(np.sum(1.0 - dist_prev.inf[nbrs]))
    return min(max(val, 0.0), 1.0)


class _Kernel:
    """Vectorised per-step quantities for a fixed graph and parameter set."""

    def __init__(self, g: Graph, params: NodeParams):
        n = g.node_count
        self.g = g
        self.params = params.expand(n)
        self.deg = g.degree
        self.indptr = g.indptr
        self.cols = g.indices
        self.p_edge = np.repeat(self.params.p, self.deg)
        self.adj = g.adjacency
        self.inv_deg = np.divide(1.0, self.deg, out=np.zeros(n), where=self.deg > 0)
        self.n_connected = int(np.count_nonzero(self.deg))
        self.recovers = bool(np.any(self.params.q) or np.any(self.params.delta))

    def gamma(self, p_inf: np.ndarray, rows: np.ndarray | None = None) -> np.ndarray:
        """Infection probability per node; with ``rows`` only those entries are computed."""
        n = len(self.deg)
        out = np.zeros(n)
        rows = np.arange(n) if rows is None else rows
        rows = rows[self.deg[rows] > 0]
        if len(rows) == 0:
            return out
        if len(rows) == self.n_connected:
            # every node with neighbours: the CSR arrays are already in row order
            factors = 1.0 - self.p_edge * p_inf[self.cols]
            out[rows] = 1.0 - np.multiply.reduceat(factors, self.indptr[rows])
            return out
        lens = self.deg[rows]
        offs = np.zeros(len(rows), dtype=np.int64)
        np.cumsum(lens[:-1], out=offs[1:])
        # positions of each selected row's neighbours inside the CSR arrays
        pos = np.arange(offs[-1] + lens[-1]) + np.repeat(self.indptr[rows] - offs, lens)
        factors = 1.0 - self.p_edge[pos] * p_inf[self.cols[pos]]
        out[rows] = 1.0 - np.multiply.reduceat(factors, offs)
        return out

    def alpha(self, p_inf: np.ndarray) -> np.ndarray:
        uninf = self.deg - self.adj @ p_inf
        a = self.params.q + self.params.delta * self.inv_deg * uninf
        return np.clip(a, 0.0, 1.0)

    def step(self, dist: StateDistribution, schedule: AvSchedule, t: int, mode: Mode) -> StateDistribution:
        P = dist.probs
        S, I, R, M = P[:, SUS], P[:, INF], P[:, REC], P[:, IMM]
        v = visit_indicator(self.params.tau, t)
        b = beta(schedule, t)
        vg = self.gamma(I, np.flatnonzero(v & (S > 0)))
        if self.recovers:
            va = v * self.alpha(I)
        else:
            va = np.zeros_like(I)
        out = np.empty_like(P)
        clamps = 0
        if mode == "sequential":
            out[:, SUS] = S * (1.0 - b) * (1.0 - vg)
            out[:, INF] = S * (1.0 - b) * vg + I * (1.0 - va)
            out[:, IMM] = M + S * b
        elif mode == "literal-additive":
            keep = 1.0 - b - vg
            neg = keep < 0
            clamps = int(np.count_nonzero(neg & (S > 0)))
            out[:, SUS] = np.where(neg, 0.0, keep) * S
            out[:, INF] = vg * S + (1.0 - va) * I
            out[:, IMM] = M + b * S
        else:
            raise ValueError(f"unknown mode {mode!r}")
        out[:, REC] = R + va * I
        return StateDistribution(out, t, dist.clamp_events + clamps)


def step(
    dist_prev: StateDistribution,
    params: NodeParams,
    schedule: AvSchedule,
    g: Graph,
    t: int,
    mode: Mode = "sequential",
) -> StateDistribution:
    """Advance the distribution from ``t-1`` to ``t``.

    In ``sequential`` mode immunisation is applied first and infection acts
    on what remains, so every node's vector stays a probability
    distribution.  ``literal-additive`` subtracts both transitions from the
    susceptible mass directly; when ``beta + visit*gamma`` exceeds one the
    multiplier is clamped at zero and ``clamp_events`` is incremented.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    return _Kernel(g, params).step(dist_prev, schedule, t, mode)


@dataclass
class TimeSeries:
    """Expected (model) or observed (simulation) state counts for t = 0..T."""

    t: np.ndarray
    susceptible: np.ndarray
    infected: np.ndarray
    recovered: np.ndarray
    immune: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, counts: np.ndarray, t0: int = 0, meta: dict | None = None) -> "TimeSeries":
        counts = np.asarray(counts, dtype=float)
        t = np.arange(t0, t0 + len(counts))
        return cls(t, counts[:, SUS], counts[:, INF], counts[:, REC], counts[:, IMM], dict(meta or {}))

    @property
    def protected(self) -> np.ndarray:
        return self.recovered + self.immune

    def __len__(self) -> int:
        return len(self.t)

    def column(self, name: str) -> np.ndarray:
        if name == "t":
            return self.t
        if name not in CSV_HEADER:
            raise KeyError(name)
        return getattr(self, name)

    def counts(self) -> np.ndarray:
        return np.column_stack([self.susceptible, self.infected, self.recovered, self.immune])

    def padded(self, length: int) -> "TimeSeries":
        """Extend to ``length`` rows by repeating the final row."""
        c = self.counts()
        if len(c) < length:
            c = np.vstack([c, np.repeat(c[-1:], length - len(c), axis=0)])
        return TimeSeries.from_counts(c[:length], int(self.t[0]), self.meta)

    @classmethod
    def mean(cls, series: Sequence["TimeSeries"], length: int | None = None) -> "TimeSeries":
        """Per-step mean; shorter series are padded with their last value."""
        if not series:
            raise ValueError("no series to average")
        length = length or max(len(s) for s in series)
        stack = np.stack([s.padded(length).counts() for s in series])
        return cls.from_counts(stack.mean(axis=0), int(series[0].t[0]))

    def to_csv(self, dest: str | os.PathLike | IO[str] | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        prot = self.protected
        for k in range(len(self.t)):
            w.writerow(
                [int(self.t[k])]
                + [_fmt(x) for x in (self.susceptible[k], self.infected[k], self.recovered[k], self.immune[k], prot[k])]
            )
        text = buf.getvalue()
        if dest is not None:
            if isinstance(dest, (str, os.PathLike)):
                with open(dest, "w", encoding="utf-8", newline="") as fh:
                    fh.write(text)
            else:
                dest.write(text)
        return text

    @classmethod
    def from_csv(cls, source: str | os.PathLike | IO[str]) -> "TimeSeries":
        if isinstance(source, (str, os.PathLike)):
            with open(source, "r", encoding="utf-8", newline="") as fh:
                rows = list(csv.reader(fh))
        else:
            rows = list(csv.reader(source))
        if not rows or tuple(h.strip() for h in rows[0]) != CSV_HEADER:
            raise ValueError(f"expected CSV header {','.join(CSV_HEADER)}")
        body = np.asarray([[float(x) for x in r] for r in rows[1:] if r], dtype=float).reshape(-1, 6)
        return cls(body[:, 0].astype(np.int64), body[:, 1], body[:, 2], body[:, 3], body[:, 4])


def _fmt(x: float) -> str:
    x = float(x)
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.6f}"


def run_model(
    g: Graph,
    params: NodeParams,
    schedule: AvSchedule,
    infiltrator: int,
    horizon: int,
    mode: Mode = "sequential",
    dump: IO[str] | Callable[[StateDistribution], None] | None = None,
) -> TimeSeries:
    """Iterate the model from a single infected node for ``horizon`` steps.

    Returns expected counts for ``t = 0..horizon``.  ``dump`` receives the
    full distribution at every step: a callable is invoked with the
    :class:`StateDistribution`, a text stream gets one JSON object per
    (t, node).
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    dist = StateDistribution.initial(g.node_count, infiltrator)
    kern = _Kernel(g, params)
    counts = np.empty((horizon + 1, 4))
    counts[0] = dist.expected_counts()
    emit = _dumper(dump)
    if emit:
        emit(dist)
    for t in range(1, horizon + 1):
        dist = kern.step(dist, schedule, t, mode)
        counts[t] = dist.expected_counts()
        if emit:
            emit(dist)
    return TimeSeries.from_counts(
        counts, meta={"infiltrator": int(infiltrator), "mode": mode, "clamp_events": dist.clamp_events}
    )


def _dumper(dump):
    if dump is None:
        return None
    if callable(dump):
        return dump

    def write(dist: StateDistribution) -> None:
        for i, row in enumerate(dist.probs.tolist()):
            dump.write(
                json.dumps({"t": dist.t, "node": i, "sus": row[0], "inf": row[1], "rec": row[2], "imm": row[3]})
                + "\n"
            )

    return write
