"""Organization utility metric and the externally imposed service quota."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OrgConfig:
    """Organization parameters.

    c weighs resource conservation against service provision; rho is the
    budget; gamma_svc is the utility level at which a citizen counts as
    served; the quota penalizes serving fewer than quota_fraction of nodes.
    """

    c: float = 0.0
    rho: float = 1.0
    gamma_svc: float = 0.05
    quota_enabled: bool = False
    quota_fraction: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"c must be in [0, 1], got {self.c}")
        if self.rho <= 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if not 0.0 < self.gamma_svc <= 1.0:
            raise ValueError(f"gamma_svc must be in (0, 1], got {self.gamma_svc}")
        if not 0.0 <= self.quota_fraction <= 1.0:
            raise ValueError(f"quota_fraction must be in [0, 1], got {self.quota_fraction}")


def count_above_threshold(util: np.ndarray, gamma_svc: float) -> int:
    """Number of citizens with utility at or above the served threshold."""
    util = np.asarray(util, dtype=np.float64)
    return int(np.count_nonzero(util >= gamma_svc))


def org_utility(util: np.ndarray, s: np.ndarray, cfg: OrgConfig) -> float:
    """Reward blending mean utility and served count against saved budget.

    U = (1-c) * (sum(u)/(2n) + |u|_gamma/(2n)) + c * (rho - sum(s)).
    In [0, 1] when rho = 1.
    """
    util = np.asarray(util, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    n = util.size
    served = count_above_threshold(util, cfg.gamma_svc)
    service_term = util.sum() / (2.0 * n) + served / (2.0 * n)
    return float((1.0 - cfg.c) * service_term + cfg.c * (cfg.rho - s.sum()))


def apply_quota(u_org: float, util: np.ndarray, cfg: OrgConfig) -> float:
    """Subtract the quota penalty when fewer than quota_fraction * n are served."""
    util = np.asarray(util, dtype=np.float64)
    n = util.size
    served = count_above_threshold(util, cfg.gamma_svc)
    if served < cfg.quota_fraction * n:
        return float(u_org - 0.5 * (1.0 - served / n))
    return float(u_org)
