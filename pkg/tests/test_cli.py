import json

import pytest

from crystalwalk.cli import ExperimentConfig, load_config, main
from crystalwalk.errors import ConfigError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_roots_json(capsys):
    code, out, _ = run(capsys, "roots", "--type", "C", "--rank", "3")
    assert code == 0
    data = json.loads(out)
    assert data["rank"] == 3
    assert len(data["positive_roots"]) == 9
    assert data["minuscule_fundamental_indices"] == [1]
    assert data["rho"] == "3,2,1"


def test_roots_bad_rank_exits_nonzero(capsys):
    code, _, err = run(capsys, "roots", "--type", "A", "--rank", "0")
    assert code != 0
    assert "rank" in err


def test_unsupported_type(capsys):
    code, _, err = run(capsys, "roots", "--type", "E", "--rank", "6")
    assert code != 0
    assert "classical" in err


def test_crystal_build(capsys):
    code, out, _ = run(
        capsys, "crystal", "build", "--type", "C", "--rank", "3", "--delta", "w1"
    )
    assert code == 0
    data = json.loads(out)
    assert len(data["vertices"]) == 6
    labels = sorted(e["i"] for e in data["edges"])
    assert labels == [1, 1, 2, 2, 3]


def test_crystal_decompose(capsys):
    code, out, _ = run(
        capsys,
        "crystal", "decompose", "--type", "C", "--rank", "3",
        "--delta", "w1", "--power", "2",
    )
    assert code == 0
    data = json.loads(out)
    comps = {c["highest_weight"]: c["multiplicity"] for c in data["components"]}
    assert comps == {"2,0,0": 1, "1,1,0": 1, "0,0,0": 1}


def test_non_minuscule_delta_names_table(capsys):
    code, _, err = run(
        capsys, "crystal", "build", "--type", "C", "--rank", "3", "--delta", "w2"
    )
    assert code != 0
    assert "w1" in err  # error lists the allowed minuscule entries


def test_spectral_solve(capsys):
    code, out, _ = run(
        capsys, "spectral", "solve", "--type", "A", "--rank", "1", "--t", "0.42857142857142855",
    )
    assert code == 0
    data = json.loads(out)
    assert data["x"][0] == pytest.approx(0.7, abs=1e-9)
    assert data["nabla"] == pytest.approx(1.75, rel=1e-8)
    assert data["metadata"]["version"]


def test_count_paths_csv(tmp_path, capsys):
    out_file = tmp_path / "counts.csv"
    code, out, _ = run(
        capsys,
        "count", "paths", "--type", "C", "--rank", "2", "--delta", "w1",
        "--L", "6", "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "ell,lambda,count"
    assert '0,"0,0",1' in lines[1]


def test_count_mult(capsys):
    code, out, _ = run(
        capsys,
        "count", "mult", "--type", "A", "--rank", "2", "--delta", "w1",
        "--lambda", "2,1,0", "--beta", "1,1,1",
    )
    assert code == 0
    assert json.loads(out)["K"] == 2


def test_kernel_json(capsys):
    code, out, _ = run(
        capsys,
        "kernel", "--which", "H", "--type", "A", "--rank", "1",
        "--delta", "w1", "--t", "0.5", "--window", "3",
    )
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "stochastic"
    assert data["triplets"]


def test_exit_prob(capsys):
    code, out, _ = run(
        capsys,
        "exit-prob", "--type", "A", "--rank", "1", "--delta", "w1",
        "--t", "0.42857142857142855", "--survival-L", "200",
    )
    assert code == 0
    data = json.loads(out)
    assert data["formula"] == pytest.approx(4 / 7, rel=1e-12)
    series = data["survival_dp"]["series"]
    assert all(b <= a for a, b in zip(series, series[1:]))


def test_exit_prob_domain_error(capsys):
    code, _, err = run(
        capsys,
        "exit-prob", "--type", "A", "--rank", "1", "--delta", "w1", "--t", "1.5",
    )
    assert code != 0
    assert "t_i < 1" in err


def test_exit_prob_mc(capsys):
    code, out, _ = run(
        capsys,
        "exit-prob-mc", "--type", "A", "--rank", "1", "--delta", "w1",
        "--t", "0.42857142857142855", "--n", "2000", "--horizon", "300", "--seed", "9",
    )
    assert code == 0
    data = json.loads(out)
    assert abs(data["estimate"] - 4 / 7) < 0.05


def test_simulate_csv(tmp_path, capsys):
    out_file = tmp_path / "traj.csv"
    code, out, _ = run(
        capsys,
        "simulate", "--type", "C", "--rank", "2", "--delta", "w1",
        "--t", "0.5,0.4", "--steps", "10", "--n", "2", "--seed", "42",
        "--out", str(out_file),
    )
    assert code == 0
    lines = out_file.read_text().strip().splitlines()
    assert lines[0] == "trajectory,step,W,H"
    assert len(lines) == 1 + 2 * 11


def test_asymptotics(capsys):
    code, out, _ = run(
        capsys,
        "asymptotics", "--type", "A", "--rank", "1", "--delta", "w1",
        "--t", "0.42857142857142855", "--mu", "w1", "--ells", "20,40",
    )
    assert code == 0
    data = json.loads(out)
    assert len(data["points"]) == 2
    assert all(p["rel_err"] < 0.1 for p in data["points"])


def test_verify_doob_passes(capsys):
    code, out, _ = run(
        capsys,
        "verify", "doob", "--type", "C", "--rank", "3", "--delta", "w1",
        "--t", "0.5,0.5,0.5",
    )
    assert code == 0
    assert "PASS" in out


def test_verify_small_budget_skips(capsys):
    code, out, _ = run(
        capsys,
        "verify", "exit-triangle", "--type", "A", "--rank", "1", "--delta", "w1",
        "--t", "0.42857142857142855", "--mc-n", "1",
    )
    assert code == 0
    assert "MC skipped" in out


def test_config_roundtrip():
    cfg = ExperimentConfig(cartan_type="C", rank=2, delta="w1", t=[0.5, 0.4])
    again = ExperimentConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_config_unknown_field():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"bogus": 1})


def test_config_validation_errors():
    with pytest.raises(ConfigError):
        ExperimentConfig(rank=0).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(mc_n=-5).validate()
    with pytest.raises(ConfigError):
        ExperimentConfig(t=[0.5, -0.1]).validate()


def test_config_file_json(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"cartan_type": "C", "rank": 3, "delta": "w1",
                                "t": [0.5, 0.5, 0.5]}))
    code, out, _ = run(capsys, "roots", "--config", str(path))
    assert code == 0
    assert json.loads(out)["rank"] == 3


def test_config_file_toml_with_override(tmp_path, capsys):
    path = tmp_path / "cfg.toml"
    path.write_text('cartan_type = "C"\nrank = 3\ndelta = "w1"\nt = [0.5, 0.5, 0.5]\n')
    code, out, _ = run(capsys, "roots", "--config", str(path), "--rank", "2")
    assert code == 0
    assert json.loads(out)["rank"] == 2  # flag overrides file
