"""Sweep harness: train and evaluate every (variant, c, prior) cell with
repetitions, aggregate the three metrics, and persist results as CSV."""

from __future__ import annotations

import csv
import hashlib
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .ddpg import DdpgConfig, EqualSplitPolicy, PolicyHandle, RandomPolicy, ZeroPolicy, train
from .envs import VARIANTS, BetaSpec, TrustEnv
from .graph import FormationConfig, form_network
from .reward import OrgConfig, apply_quota, org_utility
from .trust import CitizenState, TrustParams, gini, run_ground_truth

DEFAULT_C_VALUES = (0.0, 0.25, 0.5, 0.75, 1.0)
DEFAULT_PRIORS = ((2, 8), (2, 6), (2, 4), (2, 2), (4, 2), (6, 2), (8, 2))

RUN_COLUMNS = ["variant", "c", "prior_a", "prior_b", "prior_mean", "rep", "seed",
               "org_utility", "fairness", "avg_trust"]
METRICS = ("org_utility", "fairness", "avg_trust")


@dataclass(frozen=True)
class GridSpec:
    """The full sweep description, including nested sub-configs."""

    c_values: tuple[float, ...] = DEFAULT_C_VALUES
    priors: tuple[tuple[float, float], ...] = DEFAULT_PRIORS
    variants: tuple[str, ...] = VARIANTS
    quota: bool = False
    repetitions: int = 5
    eval_mode: str = "static"
    base_seed: int = 0
    n: int = 15
    iterations: int = 25
    trust: TrustParams = TrustParams()
    org: OrgConfig = OrgConfig()  # c and quota_enabled overridden per cell
    formation: FormationConfig = FormationConfig()
    ddpg: DdpgConfig = DdpgConfig()

    def __post_init__(self):
        if not self.c_values or not self.priors or not self.variants:
            raise ValueError("c_values, priors, and variants must be nonempty")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")
        if self.eval_mode not in ("static", "adaptive"):
            raise ValueError(f"unknown eval_mode {self.eval_mode!r}")
        for v in self.variants:
            if v not in VARIANTS:
                raise ValueError(f"unknown variant {v!r} in variants")

    @classmethod
    def from_dict(cls, data: dict) -> "GridSpec":
        kwargs = dict(data)
        if "priors" in kwargs:
            kwargs["priors"] = tuple(tuple(p) for p in kwargs["priors"])
        for key in ("c_values", "variants"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        for key, typ in (("trust", TrustParams), ("org", OrgConfig),
                         ("formation", FormationConfig), ("ddpg", DdpgConfig)):
            if key in kwargs and isinstance(kwargs[key], dict):
                sub = dict(kwargs[key])
                if key == "ddpg" and "hidden_sizes" in sub:
                    sub["hidden_sizes"] = tuple(sub["hidden_sizes"])
                kwargs[key] = typ(**sub)
        unknown = set(kwargs) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class RunResult:
    variant: str
    c: float
    prior: tuple[float, float]
    rep: int
    seed: int
    org_utility: float
    fairness: float
    avg_trust: float


def derive_seed(base_seed: int, variant: str, c_index: int, prior_index: int,
                rep: int) -> int:
    """Stable 63-bit per-cell seed; injective over the grid coordinates."""
    key = f"{base_seed}|{variant}|{c_index}|{prior_index}|{rep}".encode()
    digest = hashlib.blake2b(key, digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _org_config_for(spec: GridSpec, c: float) -> OrgConfig:
    return replace(spec.org, c=c, quota_enabled=spec.quota)


def run_cell(variant: str, c: float, prior: tuple[float, float], rep: int,
             spec: GridSpec, policy_kind: str = "trained") -> RunResult:
    """Train (or pick a built-in) policy for one cell and evaluate it on a
    fresh ground-truth rollout; returns the three metrics."""
    c_index = spec.c_values.index(c)
    prior_index = spec.priors.index(tuple(prior))
    seed = derive_seed(spec.base_seed, variant, c_index, prior_index, rep)
    ss = np.random.SeedSequence(seed)
    net_seed, train_seed, eval_seed, policy_seed = [int(s.generate_state(1)[0]) >> 1
                                                   for s in ss.spawn(4)]

    g = form_network(replace(spec.formation, seed=net_seed), spec.n)
    prior_spec = BetaSpec(*prior)
    org_cfg = _org_config_for(spec, c)

    policy = _make_policy(policy_kind, variant, g, prior_spec, org_cfg, spec,
                          train_seed, policy_seed)

    eval_rng = np.random.default_rng(eval_seed)
    tau0 = eval_rng.beta(prior_spec.a, prior_spec.b, size=spec.n)
    state = CitizenState(tau=tau0, util=np.zeros(spec.n))
    traj = run_ground_truth(g, state, policy, spec.iterations,
                            mode=spec.eval_mode, p=spec.trust, rng=eval_rng,
                            rho=org_cfg.rho)

    step_utils = []
    for rec in traj.records:
        u = org_utility(rec["util"], rec["s"], org_cfg)
        if spec.quota:
            u = apply_quota(u, rec["util"], org_cfg)
        step_utils.append(u)
    final = traj.final_state
    return RunResult(
        variant=variant, c=c, prior=tuple(prior), rep=rep, seed=seed,
        org_utility=float(np.mean(step_utils)),
        fairness=1.0 - gini(final.util),
        avg_trust=float(np.mean(final.tau)),
    )


def _make_policy(policy_kind, variant, g, prior_spec, org_cfg, spec,
                 train_seed, policy_seed):
    if policy_kind == "trained":
        cfg = replace(spec.ddpg, seed=train_seed)
        factory = lambda s: TrustEnv(variant, g, prior_spec, spec.iterations,
                                     spec.trust, org_cfg, seed=s)
        policy, _ = train(factory, cfg, rho=org_cfg.rho)
        return policy
    if policy_kind == "random":
        return RandomPolicy(spec.n, org_cfg.rho, seed=policy_seed)
    if policy_kind == "zero":
        return ZeroPolicy(spec.n)
    if policy_kind == "equal-split":
        return EqualSplitPolicy(spec.n, org_cfg.rho)
    raise ValueError(f"unknown policy kind {policy_kind!r}")


@dataclass
class CellStats:
    n_runs: int
    means: dict[str, float]
    stderrs: dict[str, float]


@dataclass
class GridResult:
    """Aggregated mean and standard error per (variant, c, prior) cell."""

    cells: dict[tuple, CellStats] = field(default_factory=dict)

    @classmethod
    def from_runs(cls, runs: list[RunResult]) -> "GridResult":
        grouped: dict[tuple, list[RunResult]] = {}
        for r in runs:
            grouped.setdefault((r.variant, r.c, r.prior), []).append(r)
        cells = {}
        for key, rs in grouped.items():
            means, errs = {}, {}
            for m in METRICS:
                vals = np.array([getattr(r, m) for r in rs])
                means[m] = float(vals.mean())
                errs[m] = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
            cells[key] = CellStats(n_runs=len(rs), means=means, stderrs=errs)
        return cls(cells=cells)


def _worker(args):
    variant, c, prior, rep, spec, policy_kind = args
    try:
        return run_cell(variant, c, prior, rep, spec, policy_kind), None
    except Exception as exc:  # report per-cell, keep the grid going
        return None, f"cell ({variant}, c={c}, prior={prior}, rep={rep}): {exc}"


def worker_count() -> int:
    env = os.environ.get("TRUSTSIM_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def run_grid(spec: GridSpec, policy_kind: str = "trained",
             progress=None) -> tuple[GridResult, list[RunResult], list[str]]:
    """Execute all cells x repetitions; returns (aggregate, runs, failures)."""
    tasks = [(v, c, prior, rep, spec, policy_kind)
             for v in spec.variants
             for c in spec.c_values
             for prior in spec.priors
             for rep in range(spec.repetitions)]
    runs: list[RunResult] = []
    failures: list[str] = []
    workers = worker_count()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_worker, tasks))
    else:
        outcomes = []
        for t in tasks:
            outcomes.append(_worker(t))
            if progress:
                progress(len(outcomes), len(tasks))
    for result, err in outcomes:
        if err is not None:
            failures.append(err)
        else:
            runs.append(result)
    runs.sort(key=lambda r: (r.variant, r.c, r.prior, r.rep))
    return GridResult.from_runs(runs), runs, failures


def diff_grids(a: GridResult, b: GridResult) -> GridResult:
    """Cellwise a - b per metric; coordinates must match ignoring variant."""
    if set(a.cells) == set(b.cells):
        # same variants on both sides: subtract cell by cell
        cells = {}
        for key in a.cells:
            sa, sb = a.cells[key], b.cells[key]
            means = {m: sa.means[m] - sb.means[m] for m in METRICS}
            errs = {m: math.hypot(sa.stderrs[m], sb.stderrs[m]) for m in METRICS}
            cells[key] = CellStats(n_runs=min(sa.n_runs, sb.n_runs),
                                   means=means, stderrs=errs)
        return GridResult(cells=cells)

    def strip(cells):
        mapping = {}
        for (variant, c, prior), stats in cells.items():
            coord = (c, prior)
            if coord in mapping:
                raise ValueError("diff requires a single variant per grid")
            mapping[coord] = (variant, stats)
        return mapping

    ma, mb = strip(a.cells), strip(b.cells)
    if set(ma) != set(mb):
        raise ValueError("grid coordinates do not match")
    cells = {}
    for coord in ma:
        va, sa = ma[coord]
        vb, sb = mb[coord]
        means = {m: sa.means[m] - sb.means[m] for m in METRICS}
        errs = {m: math.hypot(sa.stderrs[m], sb.stderrs[m]) for m in METRICS}
        c, prior = coord
        cells[(f"{va}-{vb}", c, prior)] = CellStats(
            n_runs=min(sa.n_runs, sb.n_runs), means=means, stderrs=errs)
    return GridResult(cells=cells)


def _fmt(x: float) -> str:
    return format(x, ".12g")


def write_runs(runs: list[RunResult], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RUN_COLUMNS)
        for r in runs:
            writer.writerow([
                r.variant, _fmt(r.c), _fmt(r.prior[0]), _fmt(r.prior[1]),
                _fmt(r.prior[0] / (r.prior[0] + r.prior[1])), r.rep, r.seed,
                _fmt(r.org_utility), _fmt(r.fairness), _fmt(r.avg_trust),
            ])


def read_runs(path: str | Path) -> list[RunResult]:
    runs = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, RUN_COLUMNS, path)
        for row in reader:
            runs.append(RunResult(
                variant=row["variant"], c=float(row["c"]),
                prior=(float(row["prior_a"]), float(row["prior_b"])),
                rep=int(row["rep"]), seed=int(row["seed"]),
                org_utility=float(row["org_utility"]),
                fairness=float(row["fairness"]),
                avg_trust=float(row["avg_trust"]),
            ))
    return runs


AGG_COLUMNS = ["variant", "c", "prior_a", "prior_b", "prior_mean", "n_runs"] + [
    f"{m}_{suffix}" for m in METRICS for suffix in ("mean", "stderr")]


def write_results(grid: GridResult, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGG_COLUMNS)
        for (variant, c, prior), stats in sorted(grid.cells.items()):
            row = [variant, _fmt(c), _fmt(prior[0]), _fmt(prior[1]),
                   _fmt(prior[0] / (prior[0] + prior[1])), stats.n_runs]
            for m in METRICS:
                row.append(_fmt(stats.means[m]))
                row.append(_fmt(stats.stderrs[m]))
            writer.writerow(row)


def read_results(path: str | Path) -> GridResult:
    cells = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_columns(reader.fieldnames, AGG_COLUMNS, path)
        for i, row in enumerate(reader, start=2):
            try:
                key = (row["variant"], float(row["c"]),
                       (float(row["prior_a"]), float(row["prior_b"])))
                means = {m: float(row[f"{m}_mean"]) for m in METRICS}
                errs = {m: float(row[f"{m}_stderr"]) for m in METRICS}
                cells[key] = CellStats(n_runs=int(row["n_runs"]), means=means,
                                       stderrs=errs)
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}: malformed row {i}: {exc}") from exc
    return GridResult(cells=cells)


def _check_columns(fieldnames, expected, path):
    missing = [c for c in expected if fieldnames is None or c not in fieldnames]
    if missing:
        raise ValueError(f"{path}: missing column(s) {missing}")
