import json
import math

import numpy as np
import pytest

from semiquantum.experiments import (
    ConfigError,
    ScenarioReport,
    build_config,
    emit,
    read_config_file,
    read_field_csv,
    render,
    run_scenario,
)
from semiquantum.experiments import cli
from semiquantum.experiments.report import Comparison
from semiquantum.fock import FockParams, make_number_state
from semiquantum.quasiprob import GridSpec, husimi_q_grid


def test_config_merge_cli_wins(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# squeezing run\nr = 0.3\ntheta=0.5\n\ndim = 30\n")
    entries = read_config_file(path)
    cfg = build_config("squeezing", entries, {"r": 0.4, "theta": None})
    assert (cfg.r, cfg.theta, cfg.dim) == (0.4, 0.5, 30)


@pytest.mark.parametrize(
    "scenario, entries",
    [
        ("hom", {"r": "0.5"}),
        ("subpoisson", {"m": "two"}),
        ("subpoisson", {"m": "-1"}),
        ("anticorrelation", {"T": "1.5"}),
        ("hom", {"format": "xml"}),
        ("hom", {"scenario": "squeezing"}),
    ],
)
def test_config_rejections(scenario, entries):
    with pytest.raises(ConfigError):
        build_config(scenario, entries)


def test_config_file_syntax(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("m 3\n")
    with pytest.raises(ConfigError):
        read_config_file(path)


def test_comparison_relations():
    assert Comparison("a", 1.0, 1.0005, 1e-3, "closed-form").passed
    assert not Comparison("a", 1.0, 1.01, 1e-3, "closed-form").passed
    assert Comparison("b", 0.3, 0.25, 1e-9, "bound", "ge").passed
    assert not Comparison("b", 0.2, 0.25, 1e-9, "bound", "ge").passed
    assert not Comparison("c", float("nan"), 0.0, 1.0, "oracle").passed
    with pytest.raises(ValueError):
        Comparison("d", 0, 0, 0, "guess")


def test_anticorrelation_scenario():
    rep = run_scenario(build_config("anticorrelation", {"T": 0.5}))
    assert rep.passed
    assert abs(rep.semiquantum["n1n2"] - 2) < 1e-3
    assert rep.quantum["n1n2"] < 1e-12


def test_hom_scenario():
    rep = run_scenario(build_config("hom"))
    assert rep.passed
    assert abs(rep.semiquantum["n1n2"] - 3) < 1e-3


def test_squeezing_scenario_vacuum():
    rep = run_scenario(build_config("squeezing", {"r": 0.0}))
    assert rep.passed
    assert abs(rep.semiquantum["variance"] - 0.5) < 1e-5
    rep = run_scenario(build_config("squeezing", {"r": 0.5}))
    assert rep.quantum["squeezed"] and not rep.semiquantum["squeezed"]


def test_subpoisson_and_wigner_scenarios():
    rep = run_scenario(build_config("subpoisson", {"m": 2}))
    assert rep.passed and rep.quantum["subpoissonian"] and not rep.semiquantum["subpoissonian"]
    rep = run_scenario(build_config("wigner-negativity"))
    assert rep.passed
    assert rep.quantum["w_origin"] == pytest.approx(-2 / math.pi, rel=0.02)


def test_separability_scenario_small():
    rep = run_scenario(build_config("separability-suite", {"trials": 10, "seed": 3}))
    assert rep.passed


def test_report_provenance_tags_preserved():
    rep = run_scenario(build_config("hom"))
    doc = json.loads(render(rep, "json"))
    assert {c["provenance"] for c in doc["comparisons"]} <= {"closed-form", "oracle", "bound"}
    assert all("tolerance" in c for c in doc["comparisons"])
    assert doc["inputs"]["scenario"] == "hom"


def test_determinism_excluding_wall_time():
    cfg = build_config("separability-suite", {"trials": 5, "seed": 11})
    a = render(run_scenario(cfg), "json", include_time=False)
    b = render(run_scenario(cfg), "json", include_time=False)
    assert a == b
    a = render(run_scenario(cfg), "csv", include_time=False)
    b = render(run_scenario(cfg), "csv", include_time=False)
    assert a == b


def test_field_csv_header_and_roundtrip(tmp_path):
    q = husimi_q_grid(make_number_state(1, FockParams(3)), GridSpec((-5, 5), (-4.5, 4.5), 41, 31))
    path = tmp_path / "q.csv"
    emit(q, "csv", path)
    lines = path.read_text().splitlines()
    assert lines[0] == "# x_range: -5.0,5.0"
    assert lines[1] == "# y_range: -4.5,4.5"
    assert lines[2] == "# nx: 41" and lines[3] == "# ny: 31"
    assert len(lines) == 4 + 41
    back = read_field_csv(path)
    assert np.array_equal(back.values, q.values)
    assert np.allclose(back.x, q.x) and np.allclose(back.y, q.y)


def test_report_csv_has_header_row():
    rep = ScenarioReport("hom", {"scenario": "hom"})
    rep.check("x", 1.0, 1.0, 0.1, "closed-form")
    text = render(rep, "csv")
    rows = [l for l in text.splitlines() if not l.startswith("#")]
    assert rows[0].startswith("name,computed,expected")
    assert any(l.startswith("# units:") for l in text.splitlines())


def test_emit_invalid_path(tmp_path):
    rep = ScenarioReport("hom", {})
    with pytest.raises(OSError):
        emit(rep, "json", tmp_path / "missing" / "out.json")


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    out = tmp_path / "hom.json"
    assert cli.main(["hom", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["passed"]
    assert cli.main(["hom", "--out", str(tmp_path / "no" / "x.json")]) == 1
    cfg = tmp_path / "c.cfg"
    cfg.write_text("bogus = 1\n")
    assert cli.main(["subpoisson", "--config", str(cfg)]) == 1
    assert cli.main(["subpoisson", "--m", "7", "--dim", "4"]) == 1
    with pytest.raises(SystemExit) as info:
        cli.main(["hom", "--nope"])
    assert info.value.code == 1

    def failing(cfg):
        rep = ScenarioReport(cfg.scenario, cfg.inputs())
        rep.check("forced", 1.0, 0.0, 1e-3, "bound")
        return rep

    monkeypatch.setitem(cli.run_scenario.__globals__["RUNNERS"], "hom", failing)
    assert cli.main(["hom", "--out", str(out)]) == 2


def test_cli_env_out_dir_and_field(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    field = tmp_path / "w.csv"
    assert cli.main(["wigner-negativity", "--format", "csv", "--field-out", str(field)]) == 0
    assert (tmp_path / "wigner-negativity.csv").exists()
    w = read_field_csv(field)
    assert w.values.min() < -0.6


@pytest.mark.parametrize("scenario", ["subpoisson", "anticorrelation", "hom", "squeezing", "wigner-negativity", "separability-suite"])
def test_every_scenario_under_ten_seconds(scenario):
    rep = run_scenario(build_config(scenario))
    assert rep.passed
    assert rep.wall_time < 10.0
