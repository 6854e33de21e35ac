"""Ground-truth institutional-trust dynamics.

Citizens accept offered services with probability equal to their current
trust, accrue utility as a running average over iterations, observe the
inequality of utilities in their closed neighborhood, and blend personal
utility, perceived fairness, and prior trust into a new trust value.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import CommunityGraph


@dataclass(frozen=True)
class TrustParams:
    """Weights of the trust update: lam for personal utility inside the
    social-influence term, delta for social influence vs. prior trust."""

    lam: float = 0.8
    delta: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lam must be in [0, 1], got {self.lam}")
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must be in [0, 1], got {self.delta}")


@dataclass
class CitizenState:
    """Per-node trust and accumulated service utility, both in [0, 1]."""

    tau: np.ndarray
    util: np.ndarray

    def __post_init__(self):
        self.tau = np.asarray(self.tau, dtype=np.float64)
        self.util = np.asarray(self.util, dtype=np.float64)
        if self.tau.shape != self.util.shape:
            raise ValueError("tau and util must have matching length")
        for name, arr in (("tau", self.tau), ("util", self.util)):
            if np.any((arr < 0) | (arr > 1)):
                raise ValueError(f"{name} entries must be in [0, 1]")

    def copy(self) -> "CitizenState":
        return CitizenState(self.tau.copy(), self.util.copy())


def validate_service_vector(s: np.ndarray, n: int, rho: float) -> np.ndarray:
    s = np.asarray(s, dtype=np.float64)
    if s.shape != (n,):
        raise ValueError(f"service vector must have length {n}, got shape {s.shape}")
    if np.any((s < 0) | (s > 1)):
        raise ValueError("service qualities must be in [0, 1]")
    if s.sum() > rho + 1e-9:
        raise ValueError(f"service vector sum {s.sum():.6f} exceeds budget {rho}")
    return s


def gini(x: np.ndarray) -> float:
    """Gini coefficient via the pairwise mean-absolute-difference formula.

    Defined as 0 for constant, zero-mean, or singleton inputs.
    """
    x = np.asarray(x, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("gini requires nonnegative entries")
    n = x.size
    if n <= 1:
        return 0.0
    mean = x.mean()
    if mean == 0.0:
        return 0.0
    diff_sum = np.abs(x[:, None] - x[None, :]).sum()
    return float(diff_sum / (2.0 * n * n * mean))


def neighborhood_fairness(g: CommunityGraph, util: np.ndarray, v: int) -> float:
    """1 - gini over the closed neighborhood N(v) + v; exactly 1 for isolates."""
    g._check_index(v)
    idx = np.nonzero(g.adj[v])[0]
    if idx.size == 0:
        return 1.0
    vals = np.concatenate([util[idx], [util[v]]])
    return 1.0 - gini(vals)


def neighborhood_fairness_all(g: CommunityGraph, util: np.ndarray) -> np.ndarray:
    """neighborhood_fairness evaluated at every node."""
    return np.array([neighborhood_fairness(g, util, v) for v in range(g.n)])


def trust_update(tau_v: float, u_v: float, fairness: float, p: TrustParams) -> float:
    """delta-blend of social influence (lam * u + (1-lam) * fairness) with prior trust."""
    influence = p.lam * u_v + (1.0 - p.lam) * fairness
    return p.delta * influence + (1.0 - p.delta) * tau_v


def ground_truth_iteration(
    g: CommunityGraph,
    state: CitizenState,
    s: np.ndarray,
    i: int,
    p: TrustParams,
    rng: np.random.Generator,
) -> CitizenState:
    """One service iteration of the ground-truth dynamics.

    Consumes exactly n acceptance draws in node-index order. Accepted
    services fold into the running average with the global iteration index
    i; rejections leave utility untouched. Trust then updates for every
    node from a frozen snapshot of the post-acceptance utilities.
    """
    if i < 0:
        raise ValueError("iteration index must be nonnegative")
    n = g.n
    tau = state.tau.copy()
    util = state.util.copy()

    accept = rng.random(n) < tau
    util[accept] = (i * util[accept] + s[accept]) / (i + 1)

    fairness = np.array([neighborhood_fairness(g, util, v) for v in range(n)])
    influence = p.lam * util + (1.0 - p.lam) * fairness
    tau = p.delta * influence + (1.0 - p.delta) * tau

    return CitizenState(tau=tau, util=util)


@dataclass
class Trajectory:
    """Per-iteration snapshots of one evaluated rollout."""

    records: list[dict] = field(default_factory=list)
    final_state: CitizenState | None = None
    warnings: list[str] = field(default_factory=list)

    def to_jsonl(self) -> str:
        lines = []
        for r in self.records:
            lines.append(json.dumps({
                "iter": r["iter"],
                "s": [float(x) for x in r["s"]],
                "util": [float(x) for x in r["util"]],
                "tau": [float(x) for x in r["tau"]],
            }))
        return "\n".join(lines) + "\n"

    def save_jsonl(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())


def run_ground_truth(
    g: CommunityGraph,
    initial: CitizenState,
    policy,
    iterations: int,
    mode: str = "static",
    p: TrustParams = TrustParams(),
    rng: np.random.Generator | None = None,
    rho: float = 1.0,
) -> Trajectory:
    """Roll out a policy against the ground-truth dynamics.

    Static mode queries the policy once on the initial state and reuses the
    service vector; adaptive mode re-queries every iteration. Policy
    outputs that violate the budget are projected and a warning recorded.
    """
    from .ddpg import project_action

    if iterations < 1:
        raise ValueError("iteration count must be at least 1")
    if mode not in ("static", "adaptive"):
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = np.random.default_rng(0)

    traj = Trajectory()
    state = initial.copy()

    def query(st: CitizenState) -> np.ndarray:
        raw = np.clip(np.asarray(policy.act(g, st.util, st.tau), dtype=np.float64), 0.0, 1.0)
        if raw.sum() > rho + 1e-9:
            traj.warnings.append(
                f"policy output sum {raw.sum():.6f} exceeded budget {rho}; projected")
        return project_action(raw, rho)

    s_static = query(state) if mode == "static" else None
    for i in range(iterations):
        s = s_static if mode == "static" else query(state)
        state = ground_truth_iteration(g, state, s, i, p, rng)
        traj.records.append({
            "iter": i,
            "s": s.copy(),
            "util": state.util.copy(),
            "tau": state.tau.copy(),
        })
    traj.final_state = state
    return traj
