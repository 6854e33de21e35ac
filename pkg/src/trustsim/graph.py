"""Synthetic community networks: mutual-consent formation and helpers."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class CommunityGraph:
    """Undirected citizen network with a scalar attribute per node.

    The adjacency matrix is symmetric with a zero diagonal and is frozen
    after construction; services and trust dynamics never rewire it.
    """

    n: int
    adj: np.ndarray  # (n, n) int8, symmetric, zero diagonal
    attrs: np.ndarray  # (n,) floats in [0, 1]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"node count must be positive, got {self.n}")
        if self.adj.shape != (self.n, self.n):
            raise ValueError("adjacency shape does not match node count")
        if np.any(self.adj != self.adj.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(self.adj) != 0):
            raise ValueError("self-loops are not allowed")

    @property
    def edges(self) -> list[tuple[int, int]]:
        ii, jj = np.nonzero(np.triu(self.adj))
        return [(int(i), int(j)) for i, j in zip(ii, jj)]

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def degree(self, v: int) -> int:
        self._check_index(v)
        return int(self.adj[v].sum())

    def isolated_nodes(self) -> list[int]:
        return [v for v in range(self.n) if self.adj[v].sum() == 0]

    def _check_index(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"node index {v} out of range for n={self.n}")


@dataclass(frozen=True)
class FormationConfig:
    """Coefficients of the bilateral edge-utility rule plus proposal budget."""

    rounds: int = 400
    theta_base: float = 0.6
    theta_homophily: float = 1.0
    theta_degree: float = 0.1
    theta_distance: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.rounds < 0:
            raise ValueError("rounds must be nonnegative")
        for name in ("theta_base", "theta_homophily", "theta_degree", "theta_distance"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


def neighbors(g: CommunityGraph, v: int) -> set[int]:
    """Adjacency set N(v); empty for isolated nodes."""
    g._check_index(v)
    return set(int(u) for u in np.nonzero(g.adj[v])[0])


def flatten_adjacency(g: CommunityGraph) -> np.ndarray:
    """Row-major 0/1 flattening of the adjacency matrix, length n^2."""
    return g.adj.astype(np.float64).reshape(-1)


def graph_distance(adj: np.ndarray, src: int, dst: int, cap: int) -> int:
    """BFS shortest-path length, or ``cap`` when dst is unreachable."""
    if src == dst:
        return 0
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[src] = True
    queue = deque([(src, 0)])
    while queue:
        node, d = queue.popleft()
        for u in np.nonzero(adj[node])[0]:
            if u == dst:
                return min(d + 1, cap)
            if not seen[u]:
                seen[u] = True
                queue.append((int(u), d + 1))
    return cap


def form_network(cfg: FormationConfig, n: int) -> CommunityGraph:
    """Grow a network by repeated bilateral edge proposals.

    Each round draws a uniformly random non-adjacent pair; each side scores
    the candidate edge as

        theta_base - theta_homophily * |attr_i - attr_j|
                   - theta_degree * deg(self)
                   - theta_distance * min(dist(i, j), n)

    with dist = n for disconnected pairs. The edge forms iff both scores
    are strictly positive. Deterministic given the config seed.
    """
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    rng = np.random.default_rng(cfg.seed)
    attrs = rng.uniform(size=n)
    adj = np.zeros((n, n), dtype=np.int8)

    for _ in range(cfg.rounds):
        ii, jj = np.nonzero(np.triu(adj == 0, k=1))
        if len(ii) == 0:
            break  # complete graph, nothing left to propose
        k = rng.integers(len(ii))
        i, j = int(ii[k]), int(jj[k])
        dist = graph_distance(adj, i, j, n)
        attr_gap = abs(float(attrs[i]) - float(attrs[j]))
        util_i = (cfg.theta_base - cfg.theta_homophily * attr_gap
                  - cfg.theta_degree * adj[i].sum() - cfg.theta_distance * dist)
        util_j = (cfg.theta_base - cfg.theta_homophily * attr_gap
                  - cfg.theta_degree * adj[j].sum() - cfg.theta_distance * dist)
        if util_i > 0 and util_j > 0:
            adj[i, j] = adj[j, i] = 1

    return CommunityGraph(n=n, adj=adj, attrs=attrs)


def erdos_renyi(n: int, p: float, seed: int) -> CommunityGraph:
    """Independent-edge random graph; testing fallback for form_network."""
    if n < 2:
        raise ValueError(f"need at least 2 nodes, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must be in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    attrs = rng.uniform(size=n)
    adj = np.zeros((n, n), dtype=np.int8)
    draws = rng.random((n, n))
    mask = np.triu(draws < p, k=1)
    adj[mask] = 1
    adj |= adj.T
    return CommunityGraph(n=n, adj=adj, attrs=attrs)


def to_json(g: CommunityGraph) -> str:
    return json.dumps({
        "n": g.n,
        "edges": [[i, j] for i, j in g.edges],
        "attrs": [float(a) for a in g.attrs],
    })


def from_json(text: str) -> CommunityGraph:
    data = json.loads(text)
    n = int(data["n"])
    adj = np.zeros((n, n), dtype=np.int8)
    for i, j in data["edges"]:
        adj[i, j] = adj[j, i] = 1
    return CommunityGraph(n=n, adj=adj, attrs=np.asarray(data["attrs"], dtype=np.float64))


def save(g: CommunityGraph, path: str | Path) -> None:
    Path(path).write_text(to_json(g))


def load(path: str | Path) -> CommunityGraph:
    return from_json(Path(path).read_text())
