from __future__ import annotations

import io
import json
import os
import subprocess
import sys

import pytest

from stope_gauge.catalog import iter_question_paths, parse_catalog, render_catalog
from stope_gauge.cli import run_cli, run_wizard
from stope_gauge.seed import builtin_seed_catalog
from stope_gauge.session import load_session_file, new_session, save_session_file

from test_catalog import MINIMAL_DOC


@pytest.fixture()
def session_file(tmp_path):
    path = tmp_path / "session.json"
    assert run_cli(["assess", "new", "--out", str(path)]) == 0
    return path


def test_catalog_validate_seed_default(capsys):
    assert run_cli(["catalog", "validate"]) == 0
    out = capsys.readouterr().out
    assert "0 errors, 0 warnings" in out


def test_catalog_validate_file_with_errors(tmp_path, capsys):
    doc = json.loads(MINIMAL_DOC)
    issue = doc["domains"][0]["controls"][0]["issues"][0]
    doc["domains"][0]["controls"][0]["id"] = "abc"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    assert run_cli(["catalog", "validate", str(path)]) == 1
    out = capsys.readouterr().out
    assert "malformed-control-id" in out


def test_catalog_validate_unparseable_file(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{nope")
    assert run_cli(["catalog", "validate", str(path)]) == 3
    assert "error:" in capsys.readouterr().err


def test_catalog_validate_missing_file(capsys):
    assert run_cli(["catalog", "validate", "/no/such/file.json"]) == 3


def test_catalog_export_builtin(capsys):
    assert run_cli(["catalog", "export-builtin"]) == 0
    out = capsys.readouterr().out
    assert out == render_catalog(builtin_seed_catalog())
    assert parse_catalog(out) == builtin_seed_catalog()


def test_catalog_show_filters_domain(capsys):
    assert run_cli(["catalog", "show", "--domain", "strategy"]) == 0
    out = capsys.readouterr().out
    assert "5.1.1" in out
    assert "12.2.1" not in out


def test_env_var_overrides_default_catalog(tmp_path, monkeypatch, capsys):
    path = tmp_path / "mini.json"
    path.write_text(MINIMAL_DOC)
    monkeypatch.setenv("STOPE_GAUGE_CATALOG", str(path))
    assert run_cli(["catalog", "validate"]) == 0
    assert "mini" in capsys.readouterr().out


def test_assess_new_and_answer_flow(session_file, capsys):
    capsys.readouterr()
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.1.1",
                    "--value", "yes", "--note", "policy portal"]) == 0
    session = load_session_file(session_file, builtin_seed_catalog())
    assert session.answers["5.1.1.1.1"].note == "policy portal"
    assert len(session.events) == 1


def test_assess_answer_kind_mismatch_exit_2(session_file, capsys):
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.3.1",
                    "--value", "yes"]) == 2
    assert "level" in capsys.readouterr().err
    assert load_session_file(session_file, builtin_seed_catalog()).answers == {}


def test_assess_answer_unknown_question_exit_2(session_file):
    assert run_cli(["assess", "answer", str(session_file), "--question", "x.y.z",
                    "--value", "yes"]) == 2


def test_assess_answer_bad_value_exit_2(session_file, capsys):
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.3.1",
                    "--value", "maybe"]) == 2
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.3.1",
                    "--value", "9"]) == 2


def test_assess_report_json_fresh(session_file, capsys):
    assert run_cli(["assess", "report", str(session_file), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["overall"]["coverage"] == 0.0
    assert doc["overall"]["score"] is None
    assert doc["mode"] == "over-answered"


def test_assess_report_strict_weights_gaps(session_file, capsys):
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.1.1",
                    "--value", "yes"]) == 0
    capsys.readouterr()
    assert run_cli(["assess", "report", str(session_file), "--format", "json",
                    "--mode", "strict", "--weights", "Strategy=3,Technology=1",
                    "--gaps", "4"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mode"] == "strict"
    assert doc["weights"] == {"Strategy": 0.75, "Technology": 0.25}
    assert len(doc["gaps"]) == 4


def test_assess_report_markdown(session_file, capsys):
    assert run_cli(["assess", "report", str(session_file), "--format", "md"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# Assessment report")
    assert "| Assessment Issue | Question | Status | Answer | Score |" in out


def test_assess_report_bad_weights_exit_2(session_file, capsys):
    assert run_cli(["assess", "report", str(session_file), "--weights", "Mars=1"]) == 2


def test_assess_report_does_not_mutate_session(session_file, capsys):
    before = session_file.read_bytes()
    assert run_cli(["assess", "report", str(session_file), "--format", "json"]) == 0
    assert session_file.read_bytes() == before


def test_assess_whatif(session_file, capsys):
    assert run_cli(["assess", "answer", str(session_file), "--question", "5.1.1.1.1",
                    "--value", "no"]) == 0
    capsys.readouterr()
    assert run_cli(["assess", "whatif", str(session_file), "--set",
                    "5.1.1.1.1=yes,5.1.1.3.1=4", "--mode", "strict"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["delta_overall"] > 0
    assert doc["after"]["overall"]["score"] > doc["before"]["overall"]["score"]
    assert "Strategy" in doc["delta_per_domain"]
    # the session file itself is untouched
    session = load_session_file(session_file, builtin_seed_catalog())
    assert len(session.answers) == 1


def test_assess_whatif_unknown_id_exit_2(session_file):
    assert run_cli(["assess", "whatif", str(session_file), "--set", "zz=yes"]) == 2


def test_missing_session_file_exit_3(capsys):
    assert run_cli(["assess", "report", "/no/such/session.json"]) == 3


def test_usage_errors_exit_2(capsys):
    assert run_cli(["frobnicate"]) == 2
    assert run_cli(["assess"]) == 2
    assert run_cli([]) == 2


def test_serve_rejects_bad_port(capsys):
    assert run_cli(["serve", "--port", "0"]) == 2
    assert run_cli(["serve", "--port", "70000"]) == 2


def test_corrupt_session_file_exit_3(tmp_path, capsys):
    path = tmp_path / "corrupt.json"
    path.write_text("{]")
    assert run_cli(["assess", "report", str(path)]) == 3


def test_digest_mismatch_exit_3(tmp_path, monkeypatch, capsys):
    session_path = tmp_path / "s.json"
    assert run_cli(["assess", "new", "--out", str(session_path)]) == 0
    other = tmp_path / "other-catalog.json"
    other.write_text(MINIMAL_DOC)
    monkeypatch.setenv("STOPE_GAUGE_CATALOG", str(other))
    assert run_cli(["assess", "report", str(session_path)]) == 3


# -- wizard -------------------------------------------------------------------


def _wizard_inputs(answers: list[str]) -> io.StringIO:
    return io.StringIO("".join(f"{a}\n" for a in answers))


def test_wizard_answers_three_then_quits(tmp_path):
    path = tmp_path / "w.json"
    out = io.StringIO()
    # each answer is followed by an empty note line
    feed = _wizard_inputs(["y", "", "n", "note about approval", "3", "", "q"])
    code = run_wizard(str(path), builtin_seed_catalog(), input_stream=feed, output_stream=out)
    assert code == 0
    session = load_session_file(path, builtin_seed_catalog())
    assert len(session.answers) == 3
    assert len(session.events) == 3
    assert session.answers["5.1.1.2.1"].note == "note about approval"
    assert session.answers["5.1.1.3.1"].value.level_value == 3


def test_wizard_reprompts_on_out_of_range_level(tmp_path):
    path = tmp_path / "w.json"
    out = io.StringIO()
    feed = _wizard_inputs(["y", "", "y", "", "5", "2", "", "q"])
    run_wizard(str(path), builtin_seed_catalog(), input_stream=feed, output_stream=out)
    session = load_session_file(path, builtin_seed_catalog())
    # "5" was rejected without recording an event; "2" was accepted
    assert len(session.events) == 3
    assert session.answers["5.1.1.3.1"].value.level_value == 2
    assert "between 0 and 4" in out.getvalue()


def test_wizard_completes_all_51(tmp_path):
    path = tmp_path / "w.json"
    answers = []
    for step in iter_question_paths(builtin_seed_catalog()):
        answers.append("y" if step.question.answer_kind.value == "binary" else "4")
        answers.append("")  # skip note
    feed = _wizard_inputs(answers)
    out = io.StringIO()
    code = run_wizard(str(path), builtin_seed_catalog(), input_stream=feed, output_stream=out)
    assert code == 0
    session = load_session_file(path, builtin_seed_catalog())
    assert len(session.answers) == 51
    assert "All 51 questions answered" in out.getvalue()


def test_wizard_resumes_existing_session(tmp_path):
    path = tmp_path / "w.json"
    session = new_session(builtin_seed_catalog())
    save_session_file(session, path)
    out = io.StringIO()
    run_wizard(str(path), builtin_seed_catalog(), input_stream=_wizard_inputs(["q"]), output_stream=out)
    assert session.id in out.getvalue()


def test_wizard_requires_tty(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "stope_gauge", "assess", "wizard", str(tmp_path / "w.json")],
        input="q\n",
        capture_output=True,
        text=True,
    )
    assert result.returncode == 2
    assert "interactive" in result.stderr


# -- atomic writes -------------------------------------------------------------


def test_interrupted_write_leaves_original_loadable(tmp_path, monkeypatch):
    path = tmp_path / "s.json"
    session = new_session(builtin_seed_catalog())
    save_session_file(session, path)
    original = path.read_bytes()

    from stope_gauge.session import AnswerValue, record_answer

    record_answer(session, "5.1.1.1.1", AnswerValue.yes())

    real_replace = os.replace

    def exploding_replace(src, dst):
        raise OSError("simulated crash before rename")

    monkeypatch.setattr(os, "replace", exploding_replace)
    with pytest.raises(OSError):
        save_session_file(session, path)
    monkeypatch.setattr(os, "replace", real_replace)

    assert path.read_bytes() == original
    loaded = load_session_file(path, builtin_seed_catalog())
    assert loaded.answers == {}
    assert list(tmp_path.iterdir()) == [path]  # no temp litter


def test_cli_entrypoint_subprocess():
    result = subprocess.run(
        [sys.executable, "-m", "stope_gauge", "catalog", "validate"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert "0 errors" in result.stdout
