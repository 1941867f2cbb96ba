import csv
import json
import subprocess
import sys

import pytest

from mixedhk.cli import main
from mixedhk.scenarios import Scenario, check_scenario, get_scenario, library

FAST = ["z_counterexample", "thm1_harmonic", "thm2_complete", "thm2_cocktail", "deffuant_path",
        "async_hk_complete", "sync_hk_circulant"]


def read_trace(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_library_names_unique_and_complete():
    lib = library()
    assert set(FAST) <= set(lib)
    assert {"lemma6_random", "thm3_gossip"} <= set(lib)
    assert all(name == sc.name for name, sc in lib.items())


@pytest.mark.parametrize("name", FAST)
def test_shipped_scenarios_pass(name):
    report = check_scenario(get_scenario(name))
    assert report["pass"], report["first_failure"]
    assert all(s["vacuous"] == 0 for s in report["summary"])


def test_run_harmonic(tmp_path):
    assert main(["run", "--scenario", "thm1_harmonic", "--steps", "200", "--out", str(tmp_path)]) == 0
    rows = read_trace(tmp_path / "thm1_harmonic_trace.csv")
    x1 = [float(r["x0"]) for r in rows if r["vertex"] == "1"]
    assert len(x1) == 201
    assert all(b <= a for a, b in zip(x1, x1[1:]))
    assert (tmp_path / "thm1_harmonic_monitors.csv").read_text().startswith("t,monitor,value")


def test_run_counterexample_constant(tmp_path):
    assert main(["run", "--scenario", "z_counterexample", "--steps", "50", "--out", str(tmp_path)]) == 0
    rows = read_trace(tmp_path / "z_counterexample_trace.csv")
    assert all(float(r["x0"]) == float(r["vertex"]) for r in rows)


def test_run_config_is_byte_deterministic(tmp_path):
    cfg = {
        "graph": {"family": "circulant", "k": 1}, "initial": {"rule": "uniform_box", "d": 2},
        "epsilon": 0.5, "mode": "group", "alpha": {"kind": "uniform01"},
        "targets": [0, 1], "horizon": 15, "monitors": ["z_group"],
    }
    path = tmp_path / "custom.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for k, seed in enumerate(("7", "7", "8")):
        d = tmp_path / f"o{k}"
        assert main(["run", "--config", str(path), "--seed", seed, "--out", str(d)]) == 0
        outs.append(((d / "custom_trace.csv").read_bytes(), (d / "custom_monitors.csv").read_bytes()))
    assert outs[0] == outs[1]
    assert outs[2][0] != outs[0][0]


def test_out_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("BC_OUT_DIR", str(tmp_path / "env"))
    assert main(["run", "--scenario", "z_counterexample", "--steps", "3"]) == 0
    assert (tmp_path / "env" / "z_counterexample_trace.csv").exists()


def test_monitor_flag(tmp_path):
    assert main(["run", "--scenario", "thm2_complete", "--steps", "5", "--monitors", "z_pair,max_edge_gap", "--out", str(tmp_path)]) == 0
    names = {r["monitor"] for r in read_trace(tmp_path / "thm2_complete_monitors.csv")}
    assert names == {"z_pair", "max_edge_gap"}
    assert main(["run", "--scenario", "thm2_complete", "--monitors", "nope", "--out", str(tmp_path)]) == 2


def test_exit_codes(tmp_path):
    assert main(["run", "--scenario", "does_not_exist", "--out", str(tmp_path)]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["run", "--config", str(bad), "--out", str(tmp_path)]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["run", "--scenario", "z_counterexample", "--frobnicate"])
    assert exc.value.code == 2
    # harmonic rule on the bi-infinite path hits vertex 0 inside the window
    cfg = {"graph": {"family": "bipath"}, "initial": {"rule": "harmonic"}, "epsilon": 1.0,
           "targets": [1], "horizon": 3}
    p = tmp_path / "zero.json"
    p.write_text(json.dumps(cfg))
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 2


def test_check_writes_report(tmp_path):
    assert main(["check", "thm2_cocktail", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "thm2_cocktail_report.json").read_text())
    assert report["pass"] and report["first_failure"] is None
    entry = report["results"][0]
    assert set(entry) == {"contract", "t", "pass", "detail"}


def test_check_randomized_with_trials(tmp_path):
    assert main(["check", "lemma6_random", "--trials", "20", "--seed", "1", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "lemma6_random_report.json").read_text())
    assert report["suite"]["cases"] == 2 * 20 + 1


def test_check_failure_exit_code(tmp_path, monkeypatch):
    sc = {
        "name": "must_fail", "description": "order check on a moving path",
        "config": {"graph": {"family": "finite_path", "n": 3}, "initial": {"rule": "identity"},
                   "epsilon": 2.0, "mode": "group", "targets": [1, 2, 3], "horizon": 5},
        "checks": [{"check": "targets_constant"}],
    }
    report = check_scenario(Scenario.from_dict(sc))
    assert not report["pass"]
    assert report["first_failure"] == {"contract": "check:targets_constant", "t": 1}
    monkeypatch.setattr("mixedhk.cli.get_scenario", lambda name: Scenario.from_dict(sc))
    assert main(["check", "must_fail", "--out", str(tmp_path)]) == 3
    saved = json.loads((tmp_path / "must_fail_report.json").read_text())
    assert saved["first_failure"]["t"] == 1
    p = tmp_path / "must_fail.json"
    p.write_text(json.dumps(sc))
    # a scenario file can also be run directly
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 0


def test_check_unknown_scenario(tmp_path):
    assert main(["check", "nope", "--out", str(tmp_path)]) == 2


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "mixedhk", "list"], capture_output=True, text=True, check=True)
    assert "thm1_harmonic" in out.stdout
