"""Deep deterministic policy gradient for budgeted service allocation.

The actor maps an environment observation to a per-citizen service vector
in [0,1]^n which is then scaled onto the budget simplex; the critic scores
(observation, action) pairs. Training is standard off-policy actor-critic
with a replay ring, target networks, and Gaussian exploration noise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .envs import TrustEnv, observation_length
from .graph import CommunityGraph, flatten_adjacency
from .nets import Adam, DenseNet, soft_update


class TrainingDiverged(RuntimeError):
    pass


def project_action(raw: np.ndarray, rho: float) -> np.ndarray:
    """Scale an elementwise-[0,1] vector onto the budget: sum <= rho."""
    raw = np.asarray(raw, dtype=np.float64)
    total = raw.sum()
    if total <= rho:
        return raw.copy()
    return raw * (rho / total)


@dataclass(frozen=True)
class DdpgConfig:
    actor_lr: float = 1e-4
    critic_lr: float = 1e-3
    discount: float = 0.99
    soft_update_rate: float = 0.005
    batch_size: int = 64
    buffer_capacity: int = 50_000
    episodes: int = 300
    warmup_steps: int = 1_000
    noise_sigma: float = 0.1
    noise_decay: float = 0.999
    hidden_sizes: tuple[int, ...] = (128, 128)
    seed: int = 0

    def __post_init__(self):
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            raise ValueError("learning rates must be positive")
        if not 0.0 <= self.discount < 1.0:
            raise ValueError("discount must be in [0, 1)")
        if not 0.0 < self.soft_update_rate <= 1.0:
            raise ValueError("soft-update rate must be in (0, 1]")


class ReplayBuffer:
    """Fixed-capacity ring of transitions with uniform resampling."""

    def __init__(self, capacity: int, obs_dim: int, act_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.obs = np.zeros((capacity, obs_dim))
        self.act = np.zeros((capacity, act_dim))
        self.rew = np.zeros(capacity)
        self.next_obs = np.zeros((capacity, obs_dim))
        self.done = np.zeros(capacity)
        self.size = 0
        self._ptr = 0

    def store(self, obs, act, rew, next_obs, done) -> None:
        i = self._ptr
        self.obs[i] = obs
        self.act[i] = act
        self.rew[i] = rew
        self.next_obs[i] = next_obs
        self.done[i] = float(done)
        self._ptr = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, k: int, rng: np.random.Generator):
        if self.size < 1:
            raise ValueError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=k)
        return (self.obs[idx], self.act[idx], self.rew[idx],
                self.next_obs[idx], self.done[idx])


class PolicyHandle:
    """A trained (or built-in) deterministic allocation policy.

    Knows its observation layout, so it can build observations directly
    from ground-truth state during evaluation. The learned variant's
    belief channels are taken at their reset values (Beta(1,1)) since the
    ground-truth dynamics expose no acceptance signal to the agent.
    """

    def __init__(self, actor: DenseNet, variant: str, n: int, rho: float, seed: int = 0):
        self.actor = actor
        self.variant = variant
        self.n = n
        self.rho = rho
        self.seed = seed
        if actor.in_dim != observation_length(variant, n):
            raise ValueError(
                f"actor input {actor.in_dim} does not match {variant} layout "
                f"for n={n} ({observation_length(variant, n)})")

    def build_observation(self, g: CommunityGraph, util: np.ndarray,
                          tau: np.ndarray) -> np.ndarray:
        adj = flatten_adjacency(g)
        if self.variant == "unaware":
            return np.concatenate([adj, util])
        if self.variant == "aware":
            return np.concatenate([adj, util, tau])
        n = self.n
        return np.concatenate([adj, util, np.full(n, 0.5), np.full(n, 0.5)])

    def act_on_observation(self, obs: np.ndarray) -> np.ndarray:
        return project_action(self.actor.predict(obs), self.rho)

    def act(self, g: CommunityGraph, util: np.ndarray, tau: np.ndarray) -> np.ndarray:
        return self.act_on_observation(self.build_observation(g, util, tau))

    def save(self, path: str | Path) -> None:
        payload = {
            "variant": self.variant,
            "n": self.n,
            "rho": self.rho,
            "seed": self.seed,
            "layout": observation_length(self.variant, self.n),
            "layer_sizes": self.actor.sizes,
            "output": self.actor.output,
            "weights": [w.tolist() for w in self.actor.weights],
            "biases": [b.tolist() for b in self.actor.biases],
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path: str | Path) -> "PolicyHandle":
        payload = json.loads(Path(path).read_text())
        net = DenseNet(payload["layer_sizes"], output=payload["output"])
        net.weights = [np.asarray(w, dtype=np.float64) for w in payload["weights"]]
        net.biases = [np.asarray(b, dtype=np.float64) for b in payload["biases"]]
        return cls(net, payload["variant"], payload["n"], payload["rho"], payload["seed"])


class ZeroPolicy:
    """Allocates nothing; the analytic optimum at c=1."""

    def __init__(self, n: int):
        self.n = n

    def act(self, g, util, tau) -> np.ndarray:
        return np.zeros(self.n)


class EqualSplitPolicy:
    """Splits the whole budget evenly across citizens."""

    def __init__(self, n: int, rho: float = 1.0):
        self.n = n
        self.rho = rho

    def act(self, g, util, tau) -> np.ndarray:
        return np.full(self.n, min(self.rho / self.n, 1.0))


class RandomPolicy:
    """Uniform-random raw vector projected onto the budget."""

    def __init__(self, n: int, rho: float = 1.0, seed: int = 0):
        self.n = n
        self.rho = rho
        self.rng = np.random.default_rng(seed)

    def act(self, g, util, tau) -> np.ndarray:
        return project_action(self.rng.random(self.n), self.rho)


@dataclass
class TrainingLog:
    episode_returns: list[float] = field(default_factory=list)
    critic_losses: list[float] = field(default_factory=list)
    actor_objectives: list[float] = field(default_factory=list)
    noise_sigmas: list[float] = field(default_factory=list)
    total_steps: int = 0


def train(env_factory, cfg: DdpgConfig, rho: float = 1.0) -> tuple[PolicyHandle, TrainingLog]:
    """Run DDPG against an environment from env_factory(seed).

    Per environment step after warmup: one temporal-difference critic
    update against the target networks and one actor update through the
    critic, followed by Polyak target updates. Returns the greedy policy
    and a per-episode log.
    """
    ss = np.random.SeedSequence(cfg.seed)
    init_seed, env_seed, noise_seed, batch_seed = [int(s.generate_state(1)[0])
                                                   for s in ss.spawn(4)]
    init_rng = np.random.default_rng(init_seed)
    noise_rng = np.random.default_rng(noise_seed)
    batch_rng = np.random.default_rng(batch_seed)
    episode_seeds = np.random.default_rng(env_seed).integers(0, 2**63 - 1,
                                                             size=cfg.episodes)

    env: TrustEnv = env_factory(int(episode_seeds[0]))
    n = env.n
    obs_dim = observation_length(env.variant, n)
    sizes = [obs_dim, *cfg.hidden_sizes, n]
    actor = DenseNet(sizes, output="sigmoid", rng=init_rng)
    critic = DenseNet([obs_dim + n, *cfg.hidden_sizes, 1], output="identity", rng=init_rng)
    actor_t = actor.copy()
    critic_t = critic.copy()
    actor_opt = Adam(actor, cfg.actor_lr)
    critic_opt = Adam(critic, cfg.critic_lr)
    buf = ReplayBuffer(cfg.buffer_capacity, obs_dim, n)

    log = TrainingLog()
    sigma = cfg.noise_sigma
    total_steps = 0

    for ep in range(cfg.episodes):
        obs = env.reset(seed=int(episode_seeds[ep]))
        ep_return = 0.0
        ep_closses: list[float] = []
        ep_aobjs: list[float] = []
        for _ in range(env.iterations):
            if total_steps < cfg.warmup_steps:
                # random feasible action with a random budget scale, so the
                # replay ring covers the whole range of total spend
                direction = noise_rng.random(n)
                scale = noise_rng.random()
                raw = np.clip(direction / direction.sum() * scale * rho, 0.0, 1.0)
            else:
                raw = actor.predict(obs) + noise_rng.normal(0.0, sigma, size=n)
                raw = np.clip(raw, 0.0, 1.0)
            action = project_action(raw, rho)
            next_obs, reward, done = env.step(action)
            # store the pre-projection action: it is the actor's output
            # space, keeping critic gradients on-distribution for the
            # actor update (projection happens inside the executor)
            buf.store(obs, raw, reward, next_obs, done)
            obs = next_obs
            ep_return += reward
            total_steps += 1

            if total_steps >= cfg.warmup_steps and buf.size >= cfg.batch_size:
                closs, aobj = _update(actor, critic, actor_t, critic_t,
                                      actor_opt, critic_opt, buf, cfg, batch_rng, rho)
                ep_closses.append(closs)
                ep_aobjs.append(aobj)

        if not (actor.all_finite() and critic.all_finite()):
            raise TrainingDiverged(
                f"non-finite parameters after episode {ep} (seed {cfg.seed})")

        log.episode_returns.append(ep_return)
        log.critic_losses.append(float(np.mean(ep_closses)) if ep_closses else float("nan"))
        log.actor_objectives.append(float(np.mean(ep_aobjs)) if ep_aobjs else float("nan"))
        log.noise_sigmas.append(sigma)
        sigma *= cfg.noise_decay

    log.total_steps = total_steps
    policy = PolicyHandle(actor.copy(), env.variant, n, rho, seed=cfg.seed)
    return policy, log


def _update(actor, critic, actor_t, critic_t, actor_opt, critic_opt,
            buf, cfg, rng, rho) -> tuple[float, float]:
    obs, act, rew, next_obs, done = buf.sample(cfg.batch_size, rng)
    k = cfg.batch_size

    # critic: TD target through the target networks
    next_act = actor_t.predict(next_obs)
    q_next = critic_t.predict(np.concatenate([next_obs, next_act], axis=1))[:, 0]
    target = rew + cfg.discount * (1.0 - done) * q_next
    q = critic.forward(np.concatenate([obs, act], axis=1))[:, 0]
    td = q - target
    closs = float(np.mean(td ** 2))
    d_ws, d_bs, _ = critic.backward((2.0 * td / k)[:, None])
    critic_opt.step(d_ws, d_bs)

    # actor: ascend the critic's value of its own actions
    a = actor.forward(obs)
    q_pi = critic.forward(np.concatenate([obs, a], axis=1))
    aobj = float(np.mean(q_pi))
    _, _, d_in = critic.backward(np.full((k, 1), -1.0 / k))
    d_action = d_in[:, obs.shape[1]:]
    d_ws, d_bs, _ = actor.backward(d_action)
    actor_opt.step(d_ws, d_bs)

    soft_update(actor_t, actor, cfg.soft_update_rate)
    soft_update(critic_t, critic, cfg.soft_update_rate)
    return closs, aobj


def evaluate_in_env(env: TrustEnv, policy: PolicyHandle, episodes: int,
                    seeds: list[int]) -> float:
    """Greedy mean per-step reward over evaluation episodes (no noise)."""
    if len(seeds) != episodes:
        raise ValueError("need one seed per evaluation episode")
    rewards: list[float] = []
    for ep in range(episodes):
        obs = env.reset(seed=seeds[ep])
        done = False
        while not done:
            action = policy.act_on_observation(obs)
            obs, r, done = env.step(action)
            rewards.append(r)
    return float(np.mean(rewards))
