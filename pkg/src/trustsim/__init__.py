"""Trust-aware reinforcement learning for community resource allocation."""

__version__ = "0.1.0"

from .beliefs import TrustBelief
from .ddpg import (
    DdpgConfig,
    EqualSplitPolicy,
    PolicyHandle,
    RandomPolicy,
    ReplayBuffer,
    ZeroPolicy,
    project_action,
    train,
)
from .envs import BetaSpec, TrustEnv
from .experiments import GridResult, GridSpec, RunResult, diff_grids, run_cell, run_grid
from .graph import CommunityGraph, FormationConfig, erdos_renyi, form_network
from .nets import Adam, DenseNet, LossProbe, backprop_check, soft_update
from .reward import OrgConfig, apply_quota, count_above_threshold, org_utility
from .trust import (
    CitizenState,
    TrustParams,
    gini,
    ground_truth_iteration,
    neighborhood_fairness,
    run_ground_truth,
    trust_update,
)
