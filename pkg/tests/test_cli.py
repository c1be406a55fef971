import json

import pytest

from votegame.cli import main
from votegame.engine import NonTerminating
from votegame.serialize import load_trace


def write_json(path, doc):
    path.write_text(json.dumps(doc, indent=2))
    return str(path)


def cycle_config_doc(**overrides):
    doc = {
        "alternatives": ["x1", "x2", "x3"],
        "weights": [1, 1, 1],
        "preferences": [["x1", "x2", "x3"], ["x2", "x3", "x1"], ["x3", "x2", "x1"]],
        "thresholds": {"x1": 1, "x2": 1, "x3": 1},
        "engine": {"threshold_rule": "static"},
    }
    doc.update(overrides)
    return doc


def test_play_bundled_non_terminating_fixture(capsys):
    code = main(["play", "bundled:nonterminating_cycle"])
    out = capsys.readouterr().out
    assert code == 3
    assert "non-terminating at stage 1" in out


def test_play_bundled_unanimous_winner(capsys):
    code = main(["play", "bundled:unanimous_winner"])
    out = capsys.readouterr().out
    assert code == 0
    assert "winner: x1" in out


def test_play_bundled_trivial_warns_and_ends(capsys):
    code = main(["play", "bundled:trivial_all_eliminated"])
    out = capsys.readouterr().out
    assert code == 0
    assert "warning" in out
    assert "all eliminated" in out


def test_play_unknown_bundled_name(capsys):
    code = main(["play", "bundled:nope"])
    assert code == 1
    assert "no bundled config" in capsys.readouterr().err


def test_play_writes_a_loadable_trace(tmp_path, capsys):
    config = write_json(tmp_path / "game.json", cycle_config_doc())
    trace_path = tmp_path / "out.trace.json"
    code = main(["play", config, "--trace-out", str(trace_path)])
    assert code == 3
    trace = load_trace(trace_path)
    assert trace.outcome == NonTerminating(at_stage=1)


def test_play_rejects_unknown_field(tmp_path, capsys):
    config = write_json(tmp_path / "bad.json", cycle_config_doc(extra=1))
    code = main(["play", config])
    assert code == 1
    assert "unknown field 'extra'" in capsys.readouterr().err


def test_play_rejects_bad_max_stages(tmp_path, capsys):
    doc = cycle_config_doc(engine={"threshold_rule": "static", "max_stages": "lots"})
    config = write_json(tmp_path / "bad.json", doc)
    code = main(["play", config])
    assert code == 1
    assert "max_stages" in capsys.readouterr().err


def test_play_rejects_bad_threshold_keys(tmp_path, capsys):
    doc = cycle_config_doc(thresholds={"x1": 1, "x2": 1})
    config = write_json(tmp_path / "bad.json", doc)
    code = main(["play", config])
    assert code == 1
    assert "thresholds" in capsys.readouterr().err


def test_play_rejects_unknown_label_in_preferences(tmp_path, capsys):
    doc = cycle_config_doc(
        preferences=[["x1", "x2", "x9"], ["x2", "x3", "x1"], ["x3", "x2", "x1"]]
    )
    config = write_json(tmp_path / "bad.json", doc)
    code = main(["play", config])
    assert code == 1
    assert "x9" in capsys.readouterr().err


def test_play_missing_file(capsys):
    code = main(["play", "/nonexistent/game.json"])
    assert code == 1
    assert "not found" in capsys.readouterr().err


def test_play_uniform_preferences_with_seed(tmp_path, capsys):
    doc = {
        "alternatives": ["a", "b", "c", "d"],
        "preferences": {"uniform": {"agents": 3}},
        "thresholds": "2n/m",
    }
    config = write_json(tmp_path / "uniform.json", doc)
    code = main(["play", config, "--seed", "99"])
    assert code == 0  # the guaranteed-elimination initialization always decides
    first = capsys.readouterr().out
    main(["play", config, "--seed", "99"])
    assert capsys.readouterr().out == first
    main(["play", config, "--seed", "100"])
    # a different seed may or may not change the outcome text; just ensure it runs
    assert capsys.readouterr().out


def test_seed_env_var_is_honored(tmp_path, capsys, monkeypatch):
    doc = {
        "alternatives": ["a", "b", "c", "d"],
        "preferences": {"uniform": {"agents": 3}},
        "thresholds": "2n/m",
    }
    config = write_json(tmp_path / "uniform.json", doc)
    monkeypatch.setenv("VOTEGAME_SEED", "99")
    main(["play", config])
    via_env = capsys.readouterr().out
    monkeypatch.delenv("VOTEGAME_SEED")
    main(["play", config, "--seed", "99"])
    assert capsys.readouterr().out == via_env


def sweep_spec_doc():
    return {
        "alternative_counts": [10, 20],
        "agent_counts": [2, 4],
        "trials": 20,
        "master_seed": 5,
        "length_convention": "rounds_plus_final",
    }


def test_sweep_writes_grid_and_report(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", sweep_spec_doc())
    out_dir = tmp_path / "results"
    code = main(["sweep", spec, "--out-dir", str(out_dir)])
    assert code == 0
    assert (out_dir / "grid.csv").is_file()
    assert (out_dir / "report.json").is_file()
    printed = capsys.readouterr().out
    assert "row m=10" in printed
    assert "column n=2" in printed


def test_sweep_rejects_bad_spec(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", {"trials": 0})
    code = main(["sweep", spec, "--out-dir", str(tmp_path / "o")])
    assert code == 1


def test_sweep_jobs_validation(tmp_path, capsys):
    spec = write_json(tmp_path / "spec.json", sweep_spec_doc())
    code = main(["sweep", spec, "--out-dir", str(tmp_path / "o"), "--jobs", "0"])
    assert code == 1


def test_audit_small_clean_run(capsys):
    code = main(["audit", "--trials", "50", "--seed", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "0 violations" in out


def test_audit_detects_injected_mutant(capsys):
    code = main(["audit", "--trials", "80", "--seed", "4", "--inject-off-by-one"])
    out = capsys.readouterr().out
    assert code == 2
    assert "no_elimination" in out


def test_audit_zero_trials_is_usage_error(capsys):
    code = main(["audit", "--trials", "0"])
    assert code == 1


def test_usage_errors_exit_one():
    with pytest.raises(SystemExit) as exc:
        main(["play"])  # missing config argument
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["unknown-command"])
    assert exc.value.code == 1
