import json
import pathlib

import pytest

from gr1diag.cli import main

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def _fx(name: str) -> str:
    return str(FIXTURES / name)


def test_exit_code_synthesizable(capsys):
    assert main(["check", _fx("toy_realizable.spec")]) == 0
    assert "SYNTHESIZABLE" in capsys.readouterr().out


def test_exit_code_unsatisfiable(capsys):
    assert main(["check", _fx("spec2.spec")]) == 2
    assert "UNSATISFIABLE (deadlock)" in capsys.readouterr().out


def test_exit_code_unrealizable_with_goal(capsys):
    assert main(["check", _fx("spec1.spec")]) == 3
    out = capsys.readouterr().out
    assert "UNREALIZABLE (livelock)" in out
    assert "goal: goal" in out


def test_exit_code_on_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.spec"
    bad.write_text("[OUTPUT]\na\n[SYS_TRANS]\na &&& a\n")
    assert main(["check", str(bad)]) == 1
    assert "error:" in capsys.readouterr().err


def test_exit_code_on_missing_file(capsys):
    assert main(["check", "/nonexistent/path.spec"]) == 1
    assert "error:" in capsys.readouterr().err


def test_explain_prints_core_lines(capsys):
    assert main(["explain", _fx("spec2.spec")]) == 2
    out = capsys.readouterr().out
    assert "kitchen" in out and "!kitchen" in out
    assert "method: SatUnroll" in out
    assert "depth used: 0" in out


def test_report_format_round_trips(capsys):
    from gr1diag import Diagnosis

    assert main(["explain", "--format", "report", _fx("spec4.spec")]) == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == 1
    diag = Diagnosis.from_report(doc)
    assert diag.verdict == "Unrealizable"
    assert {c["id"] for c in doc["core"]} == {2, 3}


def test_map_flag_merges_topology(capsys):
    code = main([
        "explain", _fx("spec3_rooms.spec"), "--map", _fx("hospital.map"),
        "--format", "report",
    ])
    assert code == 2
    doc = json.loads(capsys.readouterr().out)
    assert doc["failure_mode"] == "Livelock"
    non_topo = {
        c["id"] for c in doc["core"] if "topology" not in c["tags"]
    }
    assert non_topo == {1, 2, 4}


def test_map_flag_conflicts_with_inline_topology(capsys):
    code = main(["check", _fx("spec3.spec"), "--map", _fx("hospital.map")])
    assert code == 1
    assert "already has" in capsys.readouterr().err


def test_dump_cnf_and_counterstrategy(tmp_path, capsys):
    cnf_path = tmp_path / "out.cnf"
    cs_path = tmp_path / "out.cs"
    code = main([
        "explain", _fx("spec4.spec"),
        "--dump-cnf", str(cnf_path),
        "--dump-counterstrategy", str(cs_path),
    ])
    assert code == 3
    text = cnf_path.read_text()
    assert text.startswith("c instance 0\np cnf ")
    assert "c g " in text

    from gr1diag import extract_counterstrategy, parse_spec

    cs = extract_counterstrategy(parse_spec((FIXTURES / "spec4.spec").read_text()))
    assert cs_path.read_text() == cs.dump()


def test_negative_depth_is_rejected():
    with pytest.raises(SystemExit):
        main(["check", _fx("spec2.spec"), "--max-depth", "-1"])


def test_game_port_validation():
    with pytest.raises(SystemExit):
        main(["game", _fx("spec5.spec"), "--port", "80"])
