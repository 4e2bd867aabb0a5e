import json

import numpy as np
import pytest

from geomtail.cli import Config, main
from geomtail.errors import ConfigError


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


def _simulate_config(tmp_path, **kw):
    cfg = {
        "d": 2, "k": 2,
        "grid": [[800.0, 3.0], [800.0, 6.0]],
        "score": {"name": "edge", "t": 1.0},
        "statistic": "T",
        "replicates": 150,
        "seed": 5,
        "law_samples": 20_000,
        "out": str(tmp_path / "out"),
    }
    cfg.update(kw)
    return _write(tmp_path, "cfg.json", cfg)


def test_config_round_trip():
    cfg = Config(d=2, k=2, grid=((1000.0, 5.0),),
                 score={"name": "edge", "t": 1.0}, x=2.5, replicates=100)
    assert Config.from_dict(cfg.to_dict()) == cfg


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        Config.from_dict({"d": 2, "k": 2, "grid": [], "score": {},
                          "bogus": 1})
    with pytest.raises(ConfigError):
        Config.from_dict({"d": 2})


def test_simulate_lln(tmp_path):
    cfg = _simulate_config(tmp_path)
    assert main(["simulate", "--config", cfg]) == 0
    ledger = (tmp_path / "out" / "ledger.csv").read_bytes().decode()
    lines = ledger.strip().split("\r\n")
    assert lines[0].startswith("n,rho,r,statistic,mean,stderr")
    assert len(lines) == 3  # header + one row per grid point
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert "lln" in summary


def test_simulate_rerun_bit_identical(tmp_path):
    cfg = _simulate_config(tmp_path)
    main(["simulate", "--config", cfg])
    first = (tmp_path / "out" / "ledger.csv").read_bytes()
    main(["simulate", "--config", cfg])
    assert (tmp_path / "out" / "ledger.csv").read_bytes() == first


def test_simulate_tail_and_slope(tmp_path):
    cfg = _simulate_config(
        tmp_path, grid=[[800.0, 2.0], [800.0, 4.0], [800.0, 6.0]],
        x=2.5, replicates=4000, batch_size=512)
    code = main(["simulate", "--config", cfg])
    assert code == 0
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["tail"]["x"] == 2.5
    assert "slope" in summary["slope_fit"]
    assert summary["slope_fit"]["slope"] < 0
    assert summary["mu_hat"] == pytest.approx(np.pi / 2, rel=0.05)
    assert summary["target_minus_rate"] < 0


def test_simulate_sparsity_violation_exit_2(tmp_path):
    cfg = _simulate_config(tmp_path, grid=[[100.0, 50.0]])
    assert main(["simulate", "--config", cfg]) == 2


def test_simulate_under_resolved_exit_3(tmp_path):
    cfg = _simulate_config(tmp_path, x=50.0, replicates=100)
    assert main(["simulate", "--config", cfg]) == 3
    assert (tmp_path / "out" / "ledger.csv").exists()  # results still written


def test_simulate_unknown_key_exit_1(tmp_path):
    cfg = _simulate_config(tmp_path, typo_key=1)
    assert main(["simulate", "--config", cfg]) == 1


def test_seed_override_changes_results(tmp_path):
    cfg = _simulate_config(tmp_path)
    main(["simulate", "--config", cfg])
    base = (tmp_path / "out" / "ledger.csv").read_bytes()
    main(["simulate", "--config", cfg, "--seed", "99"])
    assert (tmp_path / "out" / "ledger.csv").read_bytes() != base


def test_rate_command(tmp_path):
    mu = np.pi / 2
    cfg = _write(tmp_path, "rate.json", {
        "d": 2, "k": 2, "score": {"name": "edge", "t": 1.0},
        "x_grid": [0.0, mu, 2 * mu],
        "law_samples": 150_000, "seed": 3, "out": str(tmp_path / "rout"),
    })
    assert main(["rate", "--config", cfg]) == 0
    law = json.loads((tmp_path / "rout" / "score_law.json").read_text())
    assert law["atoms"][0]["mass"] == pytest.approx(mu, rel=0.02)
    summary = json.loads((tmp_path / "rout" / "rate_summary.json").read_text())
    assert summary["mu"][0] == pytest.approx(mu, rel=0.02)
    lines = (tmp_path / "rout" / "rate_curve.csv").read_bytes().decode().strip().split("\r\n")
    assert lines[0] == "x0,I,newton_I"
    rows = [line.split(",") for line in lines[1:]]
    # x = 0: closed form equals mu-hat, no inf in the I column
    assert float(rows[0][1]) == pytest.approx(mu, rel=0.02)
    assert rows[0][1] != "inf"
    # x = mu: rate vanishes
    assert abs(float(rows[1][1])) < 1e-3   # closed form at MC mu-hat
    assert abs(float(rows[1][2])) < 1e-3   # newton agrees
    # x = 2 mu: positive
    assert float(rows[2][1]) > 0


def test_persistence_command_equilateral(tmp_path):
    side = 0.4
    pts = np.array([[0.1, 0.1], [0.1 + side, 0.1],
                    [0.1 + side / 2, 0.1 + side * np.sqrt(3) / 2]])
    csv_path = tmp_path / "points.csv"
    csv_path.write_text("x0,x1\r\n" +
                        "".join(f"{float(p[0])!r},{float(p[1])!r}\r\n"
                                for p in pts))
    cfg = _write(tmp_path, "pers.json", {
        "input_points": str(csv_path), "input_r": 1.0,
        "s_t_pairs": [[0.42, 0.44]], "out": str(tmp_path / "pout"),
    })
    assert main(["persistence", "--config", cfg]) == 0
    lines = (tmp_path / "pout" / "diagram.csv").read_bytes().decode().strip().split("\r\n")
    assert len(lines) == 2
    _dim, birth, death = lines[1].split(",")
    assert float(birth) == pytest.approx(side)
    assert float(death) == pytest.approx(2 * side / np.sqrt(3))
    summary = json.loads((tmp_path / "pout" / "persistence_summary.json").read_text())
    assert summary["queries"][0]["beta1"] == 1
    assert summary["queries"][0]["sandwich"] == "pass"


def test_persistence_command_empty_input(tmp_path):
    csv_path = tmp_path / "empty.csv"
    csv_path.write_text("x0,x1\r\n")
    cfg = _write(tmp_path, "pers.json", {
        "input_points": str(csv_path), "out": str(tmp_path / "pout"),
    })
    assert main(["persistence", "--config", cfg]) == 0
    lines = (tmp_path / "pout" / "diagram.csv").read_bytes().decode().strip().split("\r\n")
    assert lines == ["dim,birth,death"]


def test_persistence_command_sampled_regime(tmp_path):
    cfg = _write(tmp_path, "pers.json", {
        "regime": {"d": 2, "k": 3, "n": 500.0, "rho": 1.0},
        "s_t_pairs": [[1.3, 1.35]],
        "seed": 2,
        "out": str(tmp_path / "pout"),
    })
    assert main(["persistence", "--config", cfg]) == 0
    summary = json.loads((tmp_path / "pout" / "persistence_summary.json").read_text())
    assert summary["queries"][0]["sandwich"] == "pass"


def test_persistence_regime_violation_exit_2(tmp_path):
    cfg = _write(tmp_path, "pers.json", {
        "regime": {"d": 2, "k": 3, "n": 100.0, "rho": 100.0},
        "out": str(tmp_path / "pout"),
    })
    assert main(["persistence", "--config", cfg]) == 2


def test_missing_config_file_exit_1(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "absent.json")]) == 1
