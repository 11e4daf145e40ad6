import json

import pytest

from lapsm.cli import COMMANDS, main
from lapsm.scenarios import PRESETS, load_scenario, save_scenario, scenario_to_dict

from conftest import cached_preset


@pytest.fixture
def preset_file(tmp_path):
    def write(name, doc=None):
        path = tmp_path / f"{name}.json"
        text = save_scenario(cached_preset(name)) if doc is None else json.dumps(doc)
        path.write_text(text)
        return str(path)
    return write


def report_of(path):
    doc = json.loads(open(path).read())
    doc.pop("timing")
    return doc


@pytest.mark.parametrize("command", [c for c in COMMANDS if c != "cocycles"])
@pytest.mark.parametrize("name", sorted(PRESETS))
def test_commands_pass_on_presets(preset_file, command, name, capsys):
    assert main([command, preset_file(name)]) == 0
    assert "pass" in capsys.readouterr().out


def test_cocycles_lists_basis(preset_file, tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["cocycles", preset_file("so3"), "--degree", "0", "--cap", "2", "--json", str(out)]) == 0
    res = report_of(out)["results"]["cocycles"]
    assert res["quotient_dimension"] == 2
    assert len(res["cocycles"]) == 2


def test_broken_jacobi_exits_one_and_names_instance(preset_file, tmp_path):
    doc = scenario_to_dict(cached_preset("so3"))
    doc["algebroid"]["structure"] += [["1", "1", "2", "1"], ["1", "2", "1", "-1"]]
    out = tmp_path / "r.json"
    assert main(["check", preset_file("so3", doc), "--json", str(out)]) == 1
    rep = report_of(out)
    failing = [r for c in rep["checks"] for r in c["records"] if r["verdict"] == "fail"]
    assert any(r["id"] == "jacobi" for r in failing)
    assert rep["status"] == "fail"


@pytest.mark.parametrize("argv", [
    ["frobnicate", "x.json"],
    [],
    ["cocycles", "preset:so3", "--cap", "2"],
    ["check", "/nonexistent/file.json"],
    ["check", "preset:so4"],
    ["check", "preset:so3", "--sample-points", "0"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_malformed_document_exits_two(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{"format": "lapsm-scenario/1", "name": "x"')
    assert main(["check", str(p)]) == 2
    assert "line" in capsys.readouterr().err


def test_cap_budget_exits_two(capsys):
    assert main(["cocycles", "preset:glx_so3", "--degree", "2", "--cap", "12"]) == 2


def test_reports_are_reproducible(preset_file, tmp_path):
    path = preset_file("glx_so3")
    texts = []
    for n, threads in enumerate(("1", "1", "3")):
        out = tmp_path / f"r{n}.json"
        assert main(["covariance", path, "--json", str(out), "--threads", threads]) == 0
        doc = json.loads(out.read_text())
        assert set(doc["timing"]) == {c["check"] for c in doc["checks"]}
        doc.pop("timing")
        texts.append(json.dumps(doc))
    assert texts[0] == texts[1] == texts[2]


def test_expectations(preset_file, tmp_path):
    doc = scenario_to_dict(cached_preset("case_a"))
    doc["expect"] = {"check": "fail"}
    assert main(["check", preset_file("case_a", doc)]) == 1
    doc["algebroid"]["anchor"].append(["1", "m2", "m1"])
    assert main(["check", preset_file("case_a", doc)]) == 0


def test_preset_subcommand(tmp_path, capsys):
    assert main(["preset", "abelian_b"]) == 0
    assert load_scenario(capsys.readouterr().out) == cached_preset("abelian_b")
    out = tmp_path / "p.json"
    assert main(["preset", "case_a", "-o", str(out)]) == 0
    assert load_scenario(out.read_text()) == cached_preset("case_a")
    assert main(["preset", "nope"]) == 2
