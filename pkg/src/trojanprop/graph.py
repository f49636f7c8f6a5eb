"""Undirected social graphs: loading, synthetic generation and summary statistics."""

from __future__ import annotations

import io
import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import IO, Iterable, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

log = logging.getLogger(__name__)

PathOrStream = Union[str, os.PathLike, IO[bytes], IO[str]]


class EdgeListError(ValueError):
    """Raised for malformed or empty edge-list input."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph stored in CSR form.

    ``indptr``/``indices`` hold the symmetric adjacency, so node ``i``'s
    neighbours are ``indices[indptr[i]:indptr[i+1]]`` (sorted).  ``labels``
    maps dense ids back to the ids found in the source file.
    """

    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    self_loops_dropped: int = 0
    duplicates_merged: int = 0
    _adj: sparse.csr_matrix | None = field(default=None, repr=False, compare=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        labels: np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph on nodes ``0..n-1``; self-loops and repeats are discarded."""
        if n < 1:
            raise ValueError("graph needs at least one node")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        loops = int(np.count_nonzero(e[:, 0] == e[:, 1]))
        e = e[e[:, 0] != e[:, 1]]
        e = np.sort(e, axis=1)
        uniq = np.unique(e, axis=0) if len(e) else e
        dups = len(e) - len(uniq)
        rows = np.concatenate([uniq[:, 0], uniq[:, 1]])
        cols = np.concatenate([uniq[:, 1], uniq[:, 0]])
        adj = sparse.csr_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(n, n)
        )
        adj.sort_indices()
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        return cls(
            indptr=adj.indptr.astype(np.int64),
            indices=adj.indices.astype(np.int64),
            labels=np.asarray(labels, dtype=np.int64),
            self_loops_dropped=loops,
            duplicates_merged=dups,
            _adj=adj,
        )

    @property
    def node_count(self) -> int:
        return len(self.indptr) - 1

    @property
    def edge_count(self) -> int:
        return len(self.indices) // 2

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        self._check_node(v)
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric 0/1 float adjacency matrix (shared, do not mutate)."""
        if self._adj is None:
            n = self.node_count
            data = np.ones(len(self.indices))
            object.__setattr__(
                self, "_adj", sparse.csr_matrix((data, self.indices, self.indptr), shape=(n, n))
            )
        return self._adj

    def edges(self) -> np.ndarray:
        """Edge array of shape (E, 2) with ``u < v``, lexicographically sorted."""
        src = np.repeat(np.arange(self.node_count), self.degree)
        mask = src < self.indices
        return np.column_stack([src[mask], self.indices[mask]])

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.node_count:
            raise IndexError(f"node id {v} outside 0..{self.node_count - 1}")

    def __getstate__(self):
        # the cached scipy matrix is cheap to rebuild; keep pickles small
        return (self.indptr, self.indices, self.labels, self.self_loops_dropped, self.duplicates_merged)

    def __setstate__(self, state):
        for name, value in zip(
            ("indptr", "indices", "labels", "self_loops_dropped", "duplicates_merged"), state
        ):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_adj", None)


def _open_text(source: PathOrStream) -> tuple[IO[str], bool]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding="utf-8"), True
    if isinstance(source, (io.RawIOBase, io.BufferedIOBase)) or "b" in getattr(source, "mode", ""):
        return io.TextIOWrapper(source, encoding="utf-8"), False
    return source, False  # type: ignore[return-value]


def load_edge_list(source: PathOrStream) -> Graph:
    """Read a whitespace-separated edge list (SNAP style, ``#`` comments).

    Node ids are densified in increasing order of their original value.
    Self-loops are dropped and duplicate/reversed edges merged; both are
    counted on the returned graph.
    """
    fh, owned = _open_text(source)
    pairs: list[tuple[int, int]] = []
    try:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise EdgeListError(f"line {lineno}: expected two node ids, got {s!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"line {lineno}: non-integer node id in {s!r}") from None
            if u < 0 or v < 0:
                raise EdgeListError(f"line {lineno}: negative node id in {s!r}")
            pairs.append((u, v))
    finally:
        if owned:
            fh.close()
    if not pairs:
        raise EdgeListError("edge list contains no edges")
    raw = np.asarray(pairs, dtype=np.int64)
    labels, dense = np.unique(raw, return_inverse=True)
    g = Graph.from_edges(len(labels), dense.reshape(-1, 2), labels=labels)
    if g.self_loops_dropped or g.duplicates_merged:
        log.info(
            "edge list: dropped %d self-loops, merged %d duplicate edges",
            g.self_loops_dropped,
            g.duplicates_merged,
        )
    return g


def save_edge_list(g: Graph, dest: PathOrStream) -> None:
    """Write ``g`` as an edge list using its original node labels."""
    e = g.labels[g.edges()]
    text = "".join(f"{u} {v}\n" for u, v in e.tolist())
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8") as fh:
            fh.write(text)
    elif "b" in getattr(dest, "mode", "") or isinstance(dest, (io.RawIOBase, io.BufferedIOBase)):
        dest.write(text.encode("utf-8"))  # type: ignore[arg-type]
    else:
        dest.write(text)  # type: ignore[arg-type]


def clustering_coefficient(g: Graph, v: int) -> float:
    """Local clustering ``2f / (k(k-1))``; 0 for nodes of degree below 2."""
    nbrs = g.neighbors(v)
    k = len(nbrs)
    if k < 2:
        return 0.0
    nbr_set = set(nbrs.tolist())
    f = sum(
        1 for u in nbrs.tolist() for w in g.neighbors(u).tolist() if w in nbr_set and w > u
    )
    return 2.0 * f / (k * (k - 1))


def triangle_counts(g: Graph) -> np.ndarray:
    """Number of triangles through each node."""
    a = g.adjacency.astype(np.int64)
    return np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() // 2


def clustering_all(g: Graph) -> np.ndarray:
    k = g.degree.astype(np.float64)
    tri = triangle_counts(g).astype(np.float64)
    out = np.zeros(g.node_count)
    ok = k >= 2
    out[ok] = 2.0 * tri[ok] / (k[ok] * (k[ok] - 1.0))
    return out


@dataclass
class GraphStats:
    node_count: int
    edge_count: int
    avg_clustering: float
    avg_shortest_path: float
    diameter: int
    max_degree: int
    avg_degree: float
    log_ratio: float
    powerlaw_alpha: float
    connected: bool = True
    component_size: int = 0
    path_sources: int = 0
    path_exact: bool = True

    def to_dict(self) -> dict:
        # NaN (undefined fit or ratio) becomes null so the JSON stays valid
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in asdict(self).items()}

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), allow_nan=False, **kw)


def powerlaw_exponent(degree: np.ndarray, k_min: int = 5) -> float:
    """Least-squares slope of the log-log degree CCDF over degrees >= ``k_min``.

    Returns NaN when fewer than two distinct degrees qualify.
    """
    degree = np.asarray(degree)
    n = len(degree)
    ks = np.unique(degree[degree >= k_min])
    if len(ks) < 2:
        return float("nan")
    srt = np.sort(degree)
    ccdf = (n - np.searchsorted(srt, ks, side="left")) / n
    slope, _ = np.polyfit(np.log(ks), np.log(ccdf), 1)
    return float(-slope)


def _path_stats(g: Graph, nodes: np.ndarray, sources: np.ndarray, chunk: int = 256) -> tuple[float, int]:
    sub = g.adjacency[nodes][:, nodes]
    pos = np.full(g.node_count, -1)
    pos[nodes] = np.arange(len(nodes))
    src = pos[sources]
    total = 0.0
    count = 0
    diam = 0
    for lo in range(0, len(src), chunk):
        d = csgraph.shortest_path(sub, method="D", unweighted=True, directed=False, indices=src[lo : lo + chunk])
        # row r includes the zero distance to itself
        total += float(d.sum())
        count += d.shape[0] * (d.shape[1] - 1)
        diam = max(diam, int(d.max()))
    return (total / count if count else 0.0), diam


def graph_stats(
    g: Graph,
    exact_cap: int = 10_000,
    sample_sources: int = 1_000,
    seed: int = 0,
    powerlaw_kmin: int = 5,
) -> GraphStats:
    """Summary statistics of ``g``.

    Path statistics come from breadth-first search from every node when the
    (largest) component has at most ``exact_cap`` nodes, otherwise from
    ``sample_sources`` random sources.  Disconnected graphs are measured on
    their largest component and flagged with ``connected=False``.
    """
    n = g.node_count
    deg = g.degree
    ncomp, comp = csgraph.connected_components(g.adjacency, directed=False)
    if ncomp > 1:
        sizes = np.bincount(comp)
        nodes = np.flatnonzero(comp == sizes.argmax())
        log.warning("graph has %d components; path statistics use the largest (%d nodes)", ncomp, len(nodes))
    else:
        nodes = np.arange(n)
    if len(nodes) <= exact_cap:
        sources = nodes
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(nodes, size=sample_sources, replace=False))
    if len(nodes) > 1:
        aspl, diam = _path_stats(g, nodes, sources)
    else:
        aspl, diam = 0.0, 0
    avg_deg = 2.0 * g.edge_count / n
    log_ratio = math.log(n) / math.log(avg_deg) if avg_deg > 1 else float("nan")
    return GraphStats(
        node_count=n,
        edge_count=g.edge_count,
        avg_clustering=float(clustering_all(g).mean()),
        avg_shortest_path=aspl,
        diameter=diam,
        max_degree=int(deg.max()),
        avg_degree=avg_deg,
        log_ratio=log_ratio,
        powerlaw_alpha=powerlaw_exponent(deg, powerlaw_kmin),
        connected=ncomp == 1,
        component_size=len(nodes),
        path_sources=len(sources),
        path_exact=len(sources) == len(nodes),
    )


def generate_synthetic(v: int, m: int, triad_prob: float, rng_seed: int) -> Graph:
    """Preferential attachment with triad formation.

    Starts from a clique on ``m`` nodes; every later node adds exactly ``m``
    edges.  The first goes to a degree-proportional target.  Each further
    edge is, with probability ``triad_prob``, a triad step: a few
    friends-of-chosen-nodes are sampled and the one already linked to the
    most chosen nodes is taken, which closes triangles.  Otherwise (or when
    no candidate is found) it is another preferential pick.  The result is
    connected and has ``m*(v-m) + m*(m-1)/2`` edges.
    """
    if not (isinstance(v, (int, np.integer)) and isinstance(m, (int, np.integer))):
        raise TypeError("v and m must be integers")
    if not v > m >= 1:
        raise ValueError(f"need v > m >= 1, got v={v}, m={m}")
    if not 0.0 <= triad_prob <= 1.0:
        raise ValueError(f"triad_prob must lie in [0, 1], got {triad_prob}")
    rng = np.random.default_rng(rng_seed)
    adj: list[set[int]] = [set() for _ in range(v)]
    nbr: list[list[int]] = [[] for _ in range(v)]
    # each node appears once per incident edge end; plus once for seed nodes so m=1 works
    targets: list[int] = []
    for i in range(m):
        for j in range(i):
            adj[i].add(j)
            adj[j].add(i)
            nbr[i].append(j)
            nbr[j].append(i)
            targets += [i, j]
    if m == 1:
        targets.append(0)

    def pa_pick(exclude: set[int]) -> int:
        while True:
            w = targets[int(rng.integers(len(targets)))]
            if w not in exclude:
                return w

    for new in range(m, v):
        chosen = [pa_pick(set())]
        chosen_set = set(chosen)
        while len(chosen) < m:
            w = None
            if rng.random() < triad_prob:
                w = _triad_candidate(rng, chosen, chosen_set, adj, nbr)
            if w is None:
                w = pa_pick(chosen_set)
            chosen.append(w)
            chosen_set.add(w)
        for w in sorted(chosen_set):
            adj[new].add(w)
            adj[w].add(new)
            nbr[new].append(w)
            nbr[w].append(new)
            targets += [new, w]
    edges = [(i, j) for i in range(v) for j in adj[i] if i < j]
    return Graph.from_edges(v, edges)


_TRIAD_SAMPLES = 4


def _triad_candidate(rng, chosen, chosen_set, adj, nbr) -> int | None:
    best, best_links = None, -1
    for _ in range(_TRIAD_SAMPLES):
        src = chosen[int(rng.integers(len(chosen)))]
        if not nbr[src]:
            continue
        w = nbr[src][int(rng.integers(len(nbr[src])))]
        if w in chosen_set:
            continue
        links = len(adj[w] & chosen_set)
        if links > best_links:
            best, best_links = w, links
    return best
