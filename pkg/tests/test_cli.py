import json

import pytest

from locdisc import cli


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def test_example_passes(tmp_path, capsys):
    code, out = run(["example", "--id", "4.1", "--epsilon", "0.1", "--r", "0.1", "--out", str(tmp_path)], capsys)
    assert code == 0
    assert "PASS" in out.out
    doc = json.loads((tmp_path / "ex41.json").read_text())
    assert doc["inputs"]["r"] == 0.1 and doc["passed"]


def test_failing_claim_exit_code(tmp_path, capsys):
    code, out = run(["example", "--id", "4.3", "--rs", "0.2", "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "FAIL" in out.out


def test_config_error_exit_code(tmp_path, capsys):
    code, out = run(["suite", "--name", "lemma52", "--r", "0.01", "--out", str(tmp_path)], capsys)
    assert code == 1
    assert "capacity" in out.err
    assert cli.main(["example", "--id", "4.1", "--config", str(tmp_path / "missing.json")]) == 1
    with pytest.raises(SystemExit) as e:
        cli.main(["example", "--id", "9.9"])
    assert e.value.code == 1


def test_flags_override_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"epsilon": 0.2, "r": 0.05, "seed": 9}))
    code, _ = run(["example", "--id", "4.3", "--config", str(cfg), "--r", "0.1", "--out", str(tmp_path)], capsys)
    assert code == 0
    doc = json.loads((tmp_path / "ex43.json").read_text())
    assert doc["inputs"]["epsilon"] == 0.2 and doc["inputs"]["r"] == 0.1 and doc["inputs"]["seed"] == 9


def test_unknown_config_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"epsilonn": 0.2}))
    assert cli.main(["example", "--id", "4.1", "--config", str(cfg)]) == 1


def test_env_sets_default_output(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    code, _ = run(["sweep", "--sizes", "40,80", "--trials", "2", "--quiet"], capsys)
    assert code == 0
    assert (tmp_path / "env" / "sweep.json").exists()
    assert (tmp_path / "env" / "sweep.csv").exists()


def test_suite_and_oracle_subcommands(tmp_path, capsys):
    assert cli.main(["suite", "--name", "prop54", "--trials", "3", "--out", str(tmp_path), "--quiet"]) == 0
    assert cli.main(["oracle-compare", "--configs", "2", "--resolution", "1e-3", "--no-planar",
                     "--out", str(tmp_path), "--quiet"]) == 0
    assert (tmp_path / "oracle-compare.csv").exists()
