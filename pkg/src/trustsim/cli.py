"""Command-line front end: network generation, training, evaluation,
grid sweeps, diffs, and SVG heatmaps."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import __version__
from .ddpg import DdpgConfig, PolicyHandle, train
from .envs import BetaSpec, TrustEnv
from .experiments import (
    GridResult,
    GridSpec,
    diff_grids,
    read_results,
    run_grid,
    write_results,
    write_runs,
)
from .graph import FormationConfig, form_network, save as save_graph
from .heatmap import write_heatmap
from .reward import OrgConfig, apply_quota, org_utility
from .trust import CitizenState, TrustParams, gini, run_ground_truth
from .experiments import _make_policy


def _load_config(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    if p.suffix == ".toml":
        import tomllib
        return tomllib.loads(p.read_text())
    return json.loads(p.read_text())


def _parse_prior(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("prior must be given as a,b")
    return float(parts[0]), float(parts[1])


def cmd_gen_network(args) -> int:
    cfg = FormationConfig(seed=args.seed)
    g = form_network(cfg, args.n)
    save_graph(g, args.out)
    print(f"wrote {args.out} ({g.n} nodes, {g.edge_count} edges, "
          f"{len(g.isolated_nodes())} isolated)")
    return 0


def _single_cell_spec(args) -> GridSpec:
    overrides = {}
    if args.config:
        overrides = _load_config(args.config)
    overrides["c_values"] = [args.c]
    overrides["priors"] = [list(args.prior)]
    overrides["variants"] = [args.variant]
    overrides["base_seed"] = args.seed
    overrides["quota"] = args.quota
    overrides["eval_mode"] = args.eval_mode
    return GridSpec.from_dict(overrides)


def cmd_train(args) -> int:
    spec = _single_cell_spec(args)
    from .experiments import derive_seed
    seed = derive_seed(spec.base_seed, args.variant, 0, 0, 0)
    ss = np.random.SeedSequence(seed)
    net_seed, train_seed = [int(s.generate_state(1)[0]) >> 1 for s in ss.spawn(2)]
    g = form_network(replace(spec.formation, seed=net_seed), spec.n)
    org_cfg = replace(spec.org, c=args.c, quota_enabled=args.quota)
    prior = BetaSpec(*args.prior)
    factory = lambda s: TrustEnv(args.variant, g, prior, spec.iterations,
                                 spec.trust, org_cfg, seed=s)
    policy, log = train(factory, replace(spec.ddpg, seed=train_seed),
                        rho=org_cfg.rho)
    policy.save(args.out)
    save_graph(g, str(args.out) + ".network.json")
    print(f"wrote {args.out}; final episode return "
          f"{log.episode_returns[-1]:.4f} over {log.total_steps} steps")
    return 0


def cmd_eval(args) -> int:
    spec = _single_cell_spec(args)
    org_cfg = replace(spec.org, c=args.c, quota_enabled=args.quota)
    prior = BetaSpec(*args.prior)

    if args.policy == "trained":
        if not args.policy_file:
            raise ValueError("--policy trained requires --policy-file")
        policy = PolicyHandle.load(args.policy_file)
        net_path = Path(str(args.policy_file) + ".network.json")
        if net_path.exists():
            from .graph import load as load_graph
            g = load_graph(net_path)
        else:
            g = form_network(replace(spec.formation, seed=args.seed), spec.n)
        if policy.n != g.n:
            raise ValueError(f"policy expects n={policy.n}, network has n={g.n}")
    else:
        g = form_network(replace(spec.formation, seed=args.seed), spec.n)
        policy = _make_policy(args.policy, args.variant, g, prior, org_cfg,
                              spec, 0, args.seed)

    rng = np.random.default_rng(args.seed)
    tau0 = rng.beta(prior.a, prior.b, size=g.n)
    state = CitizenState(tau=tau0, util=np.zeros(g.n))
    traj = run_ground_truth(g, state, policy, spec.iterations,
                            mode=args.eval_mode, p=spec.trust, rng=rng,
                            rho=org_cfg.rho)
    step_utils = []
    for rec in traj.records:
        u = org_utility(rec["util"], rec["s"], org_cfg)
        if args.quota:
            u = apply_quota(u, rec["util"], org_cfg)
        step_utils.append(u)
    final = traj.final_state
    print(json.dumps({
        "org_utility": float(np.mean(step_utils)),
        "fairness": 1.0 - gini(final.util),
        "avg_trust": float(np.mean(final.tau)),
    }))
    return 0


def cmd_sweep(args) -> int:
    spec = GridSpec.from_dict(_load_config(args.config))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def progress(done, total):
        if args.verbose:
            print(f"  {done}/{total} cells", file=sys.stderr)

    grid, runs, failures = run_grid(spec, progress=progress)
    write_runs(runs, out / "runs.csv")
    write_results(grid, out / "aggregate.csv")
    manifest = {
        "config": json.loads(Path(args.config).read_text())
        if Path(args.config).suffix != ".toml" else str(args.config),
        "trustsim_version": __version__,
        "numpy_version": np.__version__,
        "seeds": sorted({r.seed for r in runs}),
        "failures": failures,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
    if failures:
        for f in failures:
            print(f"FAILED {f}", file=sys.stderr)
        return 1
    print(f"wrote {out / 'runs.csv'}, {out / 'aggregate.csv'}, "
          f"{out / 'manifest.json'}")
    return 0


def cmd_diff(args) -> int:
    grid_a = read_results(args.a)
    grid_b = read_results(args.b)
    write_results(diff_grids(grid_a, grid_b), args.out)
    print(f"wrote {args.out}")
    return 0


def cmd_plot(args) -> int:
    grid = read_results(args.aggregate)
    if args.variant:
        grid = GridResult(cells={k: v for k, v in grid.cells.items()
                                 if k[0] == args.variant})
    variants = {k[0] for k in grid.cells}
    if len(variants) > 1:
        raise ValueError(
            f"aggregate contains variants {sorted(variants)}; pick one with --variant")
    write_heatmap(grid, args.metric, args.out)
    print(f"wrote {args.out}")
    return 0


def _add_cell_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="base config file (JSON or TOML)")
    p.add_argument("--variant", default="unaware",
                   choices=("unaware", "aware", "learned"))
    p.add_argument("--c", type=float, default=0.0)
    p.add_argument("--prior", type=_parse_prior, default=(2.0, 2.0),
                   metavar="A,B")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--quota", action="store_true")
    p.add_argument("--eval-mode", default="static", choices=("static", "adaptive"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trustsim")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-network", help="generate a community network JSON")
    p.add_argument("--n", type=int, default=15)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_network)

    p = sub.add_parser("train", help="train one policy and dump it")
    _add_cell_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a policy on ground-truth dynamics")
    _add_cell_flags(p)
    p.add_argument("--policy", default="trained",
                   choices=("trained", "zero", "equal-split", "random"))
    p.add_argument("--policy-file", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run the full experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("diff", help="cellwise difference of two aggregates")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("plot", help="render an aggregate CSV as an SVG heatmap")
    p.add_argument("aggregate")
    p.add_argument("--metric", required=True,
                   choices=("org_utility", "fairness", "avg_trust"))
    p.add_argument("--variant", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
