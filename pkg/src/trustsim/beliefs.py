"""Beta-distribution trust beliefs held by the learned-trust agent."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class TrustBelief:
    """Per-node Beta(alpha, beta) beliefs plus the point estimate tau_hat.

    alpha and beta start at 1 and only ever grow: +1 on each observed
    acceptance/rejection, and (optionally) +0.5*tau_hat each to both after
    the trust-prediction blend ("confidence drift").
    """

    alpha: np.ndarray
    beta: np.ndarray
    tau_hat: np.ndarray

    @classmethod
    def uniform(cls, n: int) -> "TrustBelief":
        return cls(alpha=np.ones(n), beta=np.ones(n), tau_hat=np.full(n, 0.5))

    def observe(self, accepted: np.ndarray) -> None:
        """Record one acceptance/rejection observation per node."""
        accepted = np.asarray(accepted, dtype=bool)
        self.alpha[accepted] += 1.0
        self.beta[~accepted] += 1.0

    def posterior_mean(self) -> np.ndarray:
        return self.alpha / (self.alpha + self.beta)

    def refresh_estimate(self) -> None:
        """Reset tau_hat to the current posterior mean."""
        self.tau_hat = self.posterior_mean()

    def blend_estimate(self, influence: np.ndarray, delta: float) -> None:
        """Apply the same delta-blend the true trust dynamics use to tau_hat."""
        self.tau_hat = delta * influence + (1.0 - delta) * self.tau_hat

    def drift(self) -> None:
        """Add 0.5*tau_hat to both parameters, concentrating the posterior."""
        self.alpha = self.alpha + 0.5 * self.tau_hat
        self.beta = self.beta + 0.5 * self.tau_hat

    def copy(self) -> "TrustBelief":
        return TrustBelief(self.alpha.copy(), self.beta.copy(), self.tau_hat.copy())
