"""Training environments for the three trust-information regimes.

All three share one reset/step/observe contract and differ in what the
agent can see and in how citizen utility is simulated:

  * unaware  -- every citizen accepts; utility overwritten by the action.
  * aware    -- acceptance is a coin flip on the true trust, which the
                agent observes and can propagate with the update rule.
  * learned  -- acceptance observed only as coin flips feeding Beta
                beliefs; true trust stays hidden.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beliefs import TrustBelief
from .graph import CommunityGraph, flatten_adjacency
from .reward import OrgConfig, apply_quota, org_utility
from .trust import (
    CitizenState,
    TrustParams,
    neighborhood_fairness_all,
    validate_service_vector,
)

VARIANTS = ("unaware", "aware", "learned")


@dataclass(frozen=True)
class BetaSpec:
    """Parameters (a, b) of the Beta prior that initial trust is drawn from."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"Beta parameters must be positive, got ({self.a}, {self.b})")

    @property
    def mean(self) -> float:
        return self.a / (self.a + self.b)


def observation_length(variant: str, n: int) -> int:
    if variant == "unaware":
        return n * n + n
    if variant == "aware":
        return n * n + 2 * n
    if variant == "learned":
        return n * n + 3 * n
    raise ValueError(f"unknown variant {variant!r}")


class TrustEnv:
    """Episodic environment: I service steps over a fixed community graph."""

    def __init__(
        self,
        variant: str,
        g: CommunityGraph,
        tau_prior: BetaSpec,
        iterations: int,
        p: TrustParams,
        cfg: OrgConfig,
        seed: int = 0,
        drift_enabled: bool = True,
    ):
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
        if iterations < 1:
            raise ValueError("iterations must be at least 1")
        self.variant = variant
        self.g = g
        self.n = g.n
        self.tau_prior = tau_prior
        self.iterations = iterations
        self.p = p
        self.cfg = cfg
        self.drift_enabled = drift_enabled
        self._adj_flat = flatten_adjacency(g)
        self._rng = np.random.default_rng(seed)
        self._initialized = False
        # per-step history, kept for belief-reconstruction checks
        self.history: list[dict] = []

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self._rng = np.random.default_rng(seed)
        self.tau = self._rng.beta(self.tau_prior.a, self.tau_prior.b, size=self.n)
        self.util = np.zeros(self.n)
        self.steps = 0
        self.belief = TrustBelief.uniform(self.n) if self.variant == "learned" else None
        self.history = []
        self._initialized = True
        return self.observe()

    @property
    def done(self) -> bool:
        return self.steps >= self.iterations

    def step(self, action: np.ndarray) -> tuple[np.ndarray, float, bool]:
        if not self._initialized:
            raise RuntimeError("environment must be reset before stepping")
        if self.done:
            raise RuntimeError("episode is done; call reset before stepping again")
        s = validate_service_vector(action, self.n, self.cfg.rho)

        if self.variant == "unaware":
            self.util = s.copy()
        else:
            accept = self._rng.random(self.n) < self.tau
            self.util[accept] = s[accept]
            if self.variant == "learned":
                self.belief.observe(accept)
                self.belief.refresh_estimate()

        fairness = neighborhood_fairness_all(self.g, self.util)
        influence = self.p.lam * self.util + (1.0 - self.p.lam) * fairness
        self.tau = self.p.delta * influence + (1.0 - self.p.delta) * self.tau
        if self.variant == "learned":
            self.belief.blend_estimate(influence, self.p.delta)
            if self.drift_enabled:
                self.belief.drift()

        self.steps += 1
        reward = org_utility(self.util, s, self.cfg)
        if self.cfg.quota_enabled:
            reward = apply_quota(reward, self.util, self.cfg)

        record = {"s": s.copy(), "util": self.util.copy(), "tau": self.tau.copy()}
        if self.variant == "learned":
            record["tau_hat"] = self.belief.tau_hat.copy()
            record["alpha"] = self.belief.alpha.copy()
            record["beta"] = self.belief.beta.copy()
        self.history.append(record)

        return self.observe(), reward, self.done

    def observe(self) -> np.ndarray:
        """Current observation in the variant's layout; pure read."""
        if not self._initialized:
            raise RuntimeError("environment must be reset before observing")
        if self.variant == "unaware":
            return np.concatenate([self._adj_flat, self.util])
        if self.variant == "aware":
            return np.concatenate([self._adj_flat, self.util, self.tau])
        # learned: bounded derived channels of the Beta parameters
        total = self.belief.alpha + self.belief.beta
        return np.concatenate([
            self._adj_flat, self.util, self.belief.alpha / total, 1.0 / total,
        ])

    def true_state(self) -> CitizenState:
        """Hidden ground truth for evaluation; never fed to the agent."""
        if not self._initialized:
            raise RuntimeError("environment must be reset first")
        return CitizenState(tau=self.tau.copy(), util=self.util.copy())
