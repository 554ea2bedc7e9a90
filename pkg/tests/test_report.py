from __future__ import annotations

import json
import re

from hypothesis import given, settings
from hypothesis import strategies as st

from stope_gauge.catalog import (
    AnswerKind,
    AssessmentIssue,
    Catalog,
    Control,
    Domain,
    Question,
    STOPE_DOMAINS,
    Status,
    Tier,
    iter_question_paths,
    question_ids,
)
from stope_gauge.report import (
    radar_data,
    render_report_json,
    render_report_markdown,
    report_to_dict,
)
from stope_gauge.scoring import ScoreMode, WeightScheme, gap_analysis, score_session
from stope_gauge.seed import builtin_seed_catalog
from stope_gauge.session import AnswerValue, new_session, record_answer

EQUAL_OVER = WeightScheme.equal()
EQUAL_STRICT = WeightScheme.equal(ScoreMode.STRICT_ZERO)

TABLE_ROW = re.compile(r"^\| (?!---)(?!Assessment Issue)(?!Rank).+\|$")


def _max_for(question):
    return AnswerValue.yes() if question.answer_kind is AnswerKind.BINARY else AnswerValue.level(4)


def _maximal_seed_session():
    session = new_session(builtin_seed_catalog())
    for path in iter_question_paths(session.catalog):
        record_answer(session, path.question.id, _max_for(path.question))
    return session


def test_json_deterministic_bytes():
    session = _maximal_seed_session()
    report = score_session(session, EQUAL_OVER)
    assert render_report_json(report, session) == render_report_json(report, session)


def test_json_fresh_session_over_answered():
    session = new_session(builtin_seed_catalog())
    report = score_session(session, EQUAL_OVER)
    doc = json.loads(render_report_json(report, session))
    assert doc["overall"]["score"] is None
    assert doc["overall"]["coverage"] == 0.0
    assert doc["mode"] == "over-answered"
    assert doc["session"]["completeness"]["answered"] == 0


def test_json_maximal_session():
    session = _maximal_seed_session()
    doc = json.loads(render_report_json(session_report := score_session(session, EQUAL_OVER), session))
    assert doc["overall"]["score"] == 1.0
    assert session_report.overall.score == 1.0


def test_json_reparses_to_report_dict():
    session = _maximal_seed_session()
    report = score_session(session, EQUAL_STRICT)
    gaps = gap_analysis(session, EQUAL_STRICT, 5)
    text = render_report_json(report, session, gaps)
    assert json.loads(text) == report_to_dict(report, session, gaps)
    doc = json.loads(text)
    assert list(doc) == [
        "session",
        "overall",
        "domains",
        "controls",
        "issues",
        "questions",
        "mode",
        "weights",
        "gaps",
    ]
    assert len(doc["questions"]) == 51
    assert len(doc["gaps"]) == 5
    assert {g["rank"] for g in doc["gaps"]} == {1, 2, 3, 4, 5}


def test_markdown_control_table_has_seven_rows_for_policy_control():
    session = new_session(builtin_seed_catalog())
    for qid, value in {
        "5.1.1.1.1": AnswerValue.yes(),
        "5.1.1.2.1": AnswerValue.no(),
        "5.1.1.3.1": AnswerValue.level(2),
    }.items():
        record_answer(session, qid, value)
    report = score_session(session, EQUAL_OVER)
    text = render_report_markdown(report, session, session.catalog)
    section = text.split("### Strategy / 5.1.1")[1].split("###")[0]
    rows = [line for line in section.splitlines() if TABLE_ROW.match(line)]
    assert len(rows) == 7
    assert "| Existence |" in rows[0]
    assert "| yes |" in rows[0]
    assert "| unanswered |" in rows[3]
    assert "| 2 |" in rows[2]


def test_markdown_empty_session_marks_unanswered():
    session = new_session(builtin_seed_catalog())
    report = score_session(session, EQUAL_OVER)
    text = render_report_markdown(report, session, session.catalog)
    assert text.count("| unanswered |") == 51
    assert text == render_report_markdown(report, session, session.catalog)


def test_markdown_gap_section_when_supplied():
    session = new_session(builtin_seed_catalog())
    report = score_session(session, EQUAL_STRICT)
    gaps = gap_analysis(session, EQUAL_STRICT, 4)
    text = render_report_markdown(report, session, session.catalog, gaps)
    assert "## Gaps (top 4)" in text
    assert text.count("\n| 1 |") == 1


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="ab|*_`\\[]#", min_size=1, max_size=12), st.sampled_from(list(Status)))
def test_markdown_survives_markup_in_question_text(nasty, status):
    question = Question(id="q1", text=nasty, status=status, answer_kind=AnswerKind.BINARY)
    catalog = Catalog(
        id="fuzz",
        version="1",
        domains=(
            Domain(
                name="Strategy",
                controls=(
                    Control(
                        id="1.1.1",
                        title=nasty,
                        statement=nasty,
                        tier=Tier.ESSENTIAL,
                        issues=(AssessmentIssue(name=nasty, questions=(question,)),),
                    ),
                ),
            ),
        ),
    )
    session = new_session(catalog)
    report = score_session(session, EQUAL_OVER)
    text = render_report_markdown(report, session, catalog)
    rows = [line for line in text.splitlines() if TABLE_ROW.match(line)]
    assert len(rows) == len(question_ids(catalog)) == 1
    # every row still has exactly 5 cells once escaped pipes are ignored
    cells = re.split(r"(?<!\\)\|", rows[0])
    assert len(cells) == 7  # leading + 5 cells + trailing


def test_radar_seed_axes():
    session = _maximal_seed_session()
    data = radar_data(score_session(session, EQUAL_OVER))
    assert data.axes == STOPE_DOMAINS
    assert data.values == (1.0, 1.0, None, None, None)


def test_radar_fresh_strict_shows_zeroes_for_catalog_domains():
    session = new_session(builtin_seed_catalog())
    data = radar_data(score_session(session, EQUAL_STRICT))
    assert data.values == (0.0, 0.0, None, None, None)


def test_radar_five_domain_catalog():
    domains = tuple(
        Domain(
            name=name,
            controls=(
                Control(
                    id=f"{i + 1}.1.1",
                    title="t",
                    statement="s",
                    tier=Tier.ESSENTIAL,
                    issues=(
                        AssessmentIssue(
                            name="Existence",
                            questions=(
                                Question(
                                    id=f"q{i}",
                                    text="?",
                                    status=Status.APPROVED,
                                    answer_kind=AnswerKind.BINARY,
                                ),
                            ),
                        ),
                    ),
                ),
            ),
        )
        for i, name in enumerate(STOPE_DOMAINS)
    )
    catalog = Catalog(id="five", version="1", domains=domains)
    session = new_session(catalog)
    for i in range(5):
        record_answer(session, f"q{i}", AnswerValue.yes())
    data = radar_data(score_session(session, EQUAL_OVER))
    assert data.values == (1.0, 1.0, 1.0, 1.0, 1.0)
