import csv
import json

import pytest

from locdisc import scenarios as sc
from locdisc.scenarios import ConfigError, ResultRecord, ScenarioConfig


def test_config_defaults_and_validation():
    c = ScenarioConfig("ex42")
    assert c.epsilon == 0.1
    assert c.ex42_source == ((0.5, -10.0, 1.0), (0.5, 8.0, 1.0))
    assert c.ex42_target == ((0.5, -8.0, 1.0), (0.5, 10.0, 1.0))
    with pytest.raises(ConfigError):
        ScenarioConfig("ex99")
    with pytest.raises(ConfigError):
        ScenarioConfig("sweep", sizes=(500, 250))
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"scenario": "ex41", "colour": 1})
    with pytest.raises(ConfigError):
        sc.run(ScenarioConfig("ex41", epsilon=0.7))


def test_config_round_trip():
    c = ScenarioConfig("sweep", sizes=(10, 20), r=0.2, seed=4)
    assert ScenarioConfig.from_dict(json.loads(json.dumps(c.to_dict()))) == c


def test_record_round_trip(tmp_path):
    rec = sc.run(ScenarioConfig("ex41"))
    path = sc.write_results(rec, tmp_path)
    back = sc.read_results(path)
    assert back.to_dict() == json.loads(json.dumps(rec.to_dict()))
    assert all(c.provenance in sc.PROVENANCE for c in back.claims)
    assert all(c.cites for c in back.claims)


def test_same_config_same_bytes_except_timestamp(tmp_path):
    cfg = ScenarioConfig("prop54", trials=5, seed=3)
    a = sc.write_results(sc.run(cfg), tmp_path / "a")
    b = sc.write_results(sc.run(cfg), tmp_path / "b")
    da, db = json.loads(a.read_text()), json.loads(b.read_text())
    da.pop("timestamp"), db.pop("timestamp")
    assert da == db
    assert (tmp_path / "a" / "prop54.csv").read_bytes() == (tmp_path / "b" / "prop54.csv").read_bytes()
    assert da["schema_version"] == sc.SCHEMA_VERSION


def test_sweep_table_schema(tmp_path):
    rec = sc.run(ScenarioConfig("sweep", sizes=(40, 80), trials=2))
    sc.write_results(rec, tmp_path)
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == ("size", "seed", "estimator", "value")
    assert {r[2] for r in rows[1:]} == {"hdh", "localized", "rhs_localized", "rhs_classical"}
    assert len(rows) == 1 + 2 * 2 * 4


def test_unconfirmed_constant_is_not_a_failure():
    rec = ResultRecord("ex42", {})
    rec.claim("ex42", "x", False, ">= 0.68", 0.34, unconfirmed=True)
    assert rec.passed and rec.claims[0].status == "unconfirmed-constant"
    rec.claim("ex42", "y", False, "0", 1.0)
    assert not rec.passed


def test_failed_claim_reported_honestly():
    # outside r <= eps the reverse closed form no longer applies
    rec = sc.run(ScenarioConfig("ex43", rs=[0.2]))
    assert not rec.passed


def test_write_surfaces_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="file"):
        sc.write_results(sc.run(ScenarioConfig("ex41")), blocker / "sub")
