import json

import numpy as np
import pytest

from trustsim.cli import main

FAST_SWEEP = {
    "c_values": [1.0],
    "priors": [[2, 2]],
    "variants": ["unaware"],
    "repetitions": 2,
    "ddpg": {"episodes": 2, "warmup_steps": 5, "batch_size": 4,
             "hidden_sizes": [8, 8]},
}


def write_config(tmp_path, cfg=FAST_SWEEP):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return path


def test_gen_network(tmp_path, capsys):
    out = tmp_path / "net.json"
    assert main(["gen-network", "--n", "15", "--seed", "3", "--out", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["n"] == 15
    assert len(data["attrs"]) == 15


def test_eval_zero_policy_fixed_point(capsys):
    assert main(["eval", "--policy", "zero", "--c", "1.0", "--seed", "5"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"org_utility", "fairness", "avg_trust"}
    assert abs(out["avg_trust"] - 0.2) < 1e-6


def test_eval_equal_split(capsys):
    assert main(["eval", "--policy", "equal-split", "--c", "0.0",
                 "--prior", "8,2", "--seed", "1"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert 0.0 <= out["org_utility"] <= 1.0
    assert out["avg_trust"] > 0.2


def test_sweep_outputs_and_determinism(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out1 = tmp_path / "out1"
    out2 = tmp_path / "out2"
    assert main(["sweep", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["sweep", "--config", str(cfg), "--out", str(out2)]) == 0
    for name in ("runs.csv", "aggregate.csv", "manifest.json"):
        assert (out1 / name).exists()
    assert (out1 / "runs.csv").read_bytes() == (out2 / "runs.csv").read_bytes()


def test_sweep_unknown_variant_exits_nonzero(tmp_path, capsys):
    bad = dict(FAST_SWEEP, variants=["psychic"])
    cfg = write_config(tmp_path, bad)
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "o")]) != 0
    assert "variant" in capsys.readouterr().err


def test_sweep_missing_config_exits_nonzero(tmp_path, capsys):
    rc = main(["sweep", "--config", str(tmp_path / "nope.json"),
               "--out", str(tmp_path / "o")])
    assert rc != 0


def test_diff_and_plot(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
    agg = out / "aggregate.csv"
    diff = tmp_path / "diff.csv"
    assert main(["diff", str(agg), str(agg), "--out", str(diff)]) == 0
    svg = tmp_path / "plot.svg"
    assert main(["plot", str(diff), "--metric", "org_utility",
                 "--out", str(svg)]) == 0
    assert svg.read_text().startswith("<svg")
    svg2 = tmp_path / "plot2.svg"
    assert main(["plot", str(agg), "--metric", "fairness",
                 "--out", str(svg2)]) == 0


def test_plot_unknown_metric_rejected(tmp_path, capsys):
    cfg = write_config(tmp_path)
    out = tmp_path / "sweep"
    main(["sweep", "--config", str(cfg), "--out", str(out)])
    with pytest.raises(SystemExit):
        main(["plot", str(out / "aggregate.csv"), "--metric", "happiness",
              "--out", str(tmp_path / "x.svg")])


def test_train_then_eval_round_trip(tmp_path, capsys):
    policy_path = tmp_path / "policy.json"
    cfg = tmp_path / "base.json"
    cfg.write_text(json.dumps({"ddpg": {"episodes": 2, "warmup_steps": 5,
                                        "batch_size": 4, "hidden_sizes": [8, 8]}}))
    assert main(["train", "--config", str(cfg), "--variant", "unaware",
                 "--c", "1.0", "--seed", "2", "--out", str(policy_path)]) == 0
    capsys.readouterr()
    assert main(["eval", "--config", str(cfg), "--policy", "trained",
                 "--policy-file", str(policy_path), "--variant", "unaware",
                 "--c", "1.0", "--seed", "2"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"org_utility", "fairness", "avg_trust"}
