"""Render score reports: deterministic JSON, Markdown, and radar-chart data.

Both renderers are pure; identical inputs give byte-identical output. JSON
carries full float precision for machines, Markdown rounds scores to three
decimals for people.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .catalog import Catalog, STOPE_DOMAINS
from .scoring import GapItem, ScoreReport
from .session import Session, completeness


@dataclass(frozen=True)
class RadarData:
    """Scores along the five canonical axes; absent domains give None."""

    axes: tuple[str, ...]
    values: tuple[float | None, ...]


def report_to_dict(
    report: ScoreReport, session: Session, gaps: list[GapItem] | None = None
) -> dict:
    """Plain-dict image of the report JSON document."""
    doc = {
        "session": {
            "id": session.id,
            "catalog_id": session.catalog_id,
            "catalog_digest": session.catalog_digest,
            "created_at": session.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "completeness": completeness(session),
        },
        "overall": {"score": report.overall.score, "coverage": report.overall.coverage},
        "domains": [
            {"name": name, "score": node.score, "coverage": node.coverage}
            for name, node in report.per_domain.items()
        ],
        "controls": [
            {"id": cid, "score": node.score, "coverage": node.coverage}
            for cid, node in report.per_control.items()
        ],
        "issues": [
            {"control_id": cid, "name": name, "score": node.score, "coverage": node.coverage}
            for (cid, name), node in report.per_issue.items()
        ],
        "questions": [
            {"id": qid, "score": score} for qid, score in report.per_question.items()
        ],
        "mode": report.mode.value,
        "weights": report.weights,
    }
    if gaps is not None:
        doc["gaps"] = [
            {
                "question_id": g.question_id,
                "current": g.current,
                "potential_gain": g.potential_gain,
                "rank": g.rank,
            }
            for g in gaps
        ]
    return doc


def render_report_json(
    report: ScoreReport, session: Session, gaps: list[GapItem] | None = None
) -> str:
    return json.dumps(report_to_dict(report, session, gaps), ensure_ascii=False, indent=2) + "\n"


def _fmt(score: float | None) -> str:
    return f"{score:.3f}" if score is not None else "-"


def _cell(text: str) -> str:
    # Keep arbitrary question text from breaking the table grid.
    return text.replace("\\", "\\\\").replace("|", "\\|").replace("\n", " ")


def render_report_markdown(
    report: ScoreReport,
    session: Session,
    catalog: Catalog,
    gaps: list[GapItem] | None = None,
) -> str:
    lines: list[str] = []
    done = completeness(session)
    lines.append("# Assessment report")
    lines.append("")
    lines.append(f"- Session: {session.id}")
    lines.append(f"- Date: {session.created_at.strftime('%Y-%m-%dT%H:%M:%SZ')}")
    lines.append(f"- Catalog: {catalog.id} v{catalog.version}")
    lines.append(f"- Mode: {report.mode.value}")
    lines.append(
        f"- Overall: score {_fmt(report.overall.score)}, "
        f"coverage {report.overall.coverage:.3f}, "
        f"answered {done['answered']}/{done['total']}"
    )
    lines.append("")
    for domain in catalog.domains:
        node = report.per_domain[domain.name]
        lines.append(f"## {domain.name}")
        lines.append("")
        lines.append(f"Score {_fmt(node.score)}, coverage {node.coverage:.3f}.")
        lines.append("")
        for control in domain.controls:
            cnode = report.per_control[control.id]
            lines.append(f"### {domain.name} / {control.id} {_cell(control.title)}".rstrip())
            lines.append("")
            if control.statement:
                lines.append(f"> {_cell(control.statement)}")
                lines.append("")
            lines.append(f"Score {_fmt(cnode.score)}, coverage {cnode.coverage:.3f}.")
            lines.append("")
            lines.append("| Assessment Issue | Question | Status | Answer | Score |")
            lines.append("| --- | --- | --- | --- | --- |")
            for issue in control.issues:
                for question in issue.questions:
                    answer = session.answers.get(question.id)
                    answer_cell = str(answer.value.to_wire()) if answer else "unanswered"
                    lines.append(
                        f"| {_cell(issue.name)} | {_cell(question.text)} "
                        f"| {question.status.value} | {answer_cell} "
                        f"| {_fmt(report.per_question[question.id])} |"
                    )
            lines.append("")
    if gaps is not None:
        lines.append(f"## Gaps (top {len(gaps)})")
        lines.append("")
        lines.append("| Rank | Question | Current | Potential gain |")
        lines.append("| --- | --- | --- | --- |")
        for gap in gaps:
            lines.append(
                f"| {gap.rank} | {gap.question_id} | {_fmt(gap.current)} "
                f"| {gap.potential_gain:.4f} |"
            )
        lines.append("")
    return "\n".join(lines)


def radar_data(report: ScoreReport) -> RadarData:
    """Scores along the five STOPE axes in canonical order."""
    values = tuple(
        report.per_domain[name].score if name in report.per_domain else None
        for name in STOPE_DOMAINS
    )
    return RadarData(axes=STOPE_DOMAINS, values=values)
