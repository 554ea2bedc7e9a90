"""Built-in seed catalog and ISO 27001 clause profile.

The seed covers the Strategy and Technology domains: six essential controls
refined into 51 assessable questions. Question ids are deterministic,
"<control-id>.<issue-index>.<question-index>" with 1-based indices in
document order. The embedded copy is authoritative; the same content ships
as ``data/seed_catalog.json`` in the canonical external format.
"""

from __future__ import annotations

from functools import lru_cache

from .catalog import (
    AnswerKind,
    AssessmentIssue,
    Catalog,
    ClauseProfile,
    ClauseProfileEntry,
    Control,
    Domain,
    Question,
    Status,
    Tier,
)

# Each control's rows: (assessment issue, question text, status, answer kind),
# one tuple per table row, in table order. Consecutive rows sharing an issue
# name belong to the same issue.
_SEED_CONTROLS = (
    (
        "Strategy",
        "5.1.1",
        "Information security policy: document",
        "An information security policy document should be approved by management, "
        "and published and communicated to all employees and relevant external parties",
        (
            ("Existence", "Is the information security policy document available?", "approved", "binary"),
            ("Approval", "Is the information security policy document approved by the management?", "approved", "binary"),
            ("Publication", "Is the information security policy document published?", "approved", "level"),
            ("Internal communication", "Is the information security policy document communicated to all ICT employees?", "approved", "level"),
            ("Internal communication", "Is the information security policy document communicated to all ICT users?", "approved", "level"),
            ("External communication", "Is the information security policy document communicated to relevant external parties?", "approved", "level"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
    (
        "Technology",
        "12.2.1",
        "Input data validation",
        "Data input to applications should be validated to ensure that this data is correct and appropriate.",
        (
            ("Existence", "Plausibility checks exist to test the output data reasonability?", "added", "binary"),
            ("Validation", "Is the examination for the input business transaction, standing data and parameter tables exist?", "modified", "level"),
            ("Validation", "Is the automatic examination exists?", "approved", "binary"),
            ("Validation", "Is the periodic review and inspection available?", "modified", "level"),
            ("Management", "Is the response of procedures to validation exist?", "approved", "binary"),
            ("Management", "Is the logging of events exists?", "approved", "binary"),
            ("Accountability", "Are the responsibilities defined?", "approved", "level"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
    (
        "Technology",
        "12.2.4",
        "Output data validation",
        "Data output from an application should be validated to ensure that the processing "
        "of stored information is correct and appropriate to the circumstances.",
        (
            ("Existence", "Plausibility checks exist to test the output data reasonability?", "added", "binary"),
            ("Validation", "Is the provided information for a reader or subsequent processing system sufficient to determine the accuracy, completeness, precision and classification of the information?", "modified", "level"),
            ("Validation", "Is the periodic inspection exists?", "approved", "level"),
            ("Validation", "Are the responding procedures validation test exist?", "added", "binary"),
            ("Practice", "Is the checking that programs are run in order exists?", "approved", "binary"),
            ("Practice", "Is the checking that programs are run at the correct time exists?", "approved", "binary"),
            ("Accountability", "Are the responsibilities defined?", "approved", "binary"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
    (
        "Technology",
        "12.2.2",
        "Control of internal processing",
        "Validation checks should be incorporated into applications to detect any corruption "
        "of information through processing errors or deliberate acts.",
        (
            ("Validation", "Is the validation of generated data, or software, exists?", "approved", "binary"),
            ("Validation", "Is the validation of downloaded data, or software, exists?", "approved", "binary"),
            ("Validation", "Is the validation of the uploaded data, or software, exists?", "approved", "binary"),
            ("Protection", "Is the use of programs that provide recovery from failure exists?", "approved", "binary"),
            ("Protection", "Is the termination of programs at failure exists?", "approved", "binary"),
            ("Protection", "Is the protection against attack exists?", "approved", "binary"),
            ("Practice", "Is the checking that programs are run in order exists?", "approved", "binary"),
            ("Practice", "Is the checking that programs are run at the correct time exists?", "approved", "binary"),
            ("Practice", "Is the checking that programs terminate correctly exists?", "approved", "binary"),
            ("Practice", "Is the logging of events exists?", "approved", "binary"),
            ("Accountability", "Are the responsibilities defined?", "approved", "binary"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
    (
        "Technology",
        "12.2.3",
        "Message integrity",
        "Requirements for ensuring authenticity and protecting message integrity in applications "
        "should be identified, and appropriate controls identified and implemented.",
        (
            ("Requirements", "Are message integrity requirements specified?", "approved", "level"),
            ("Protection", "Are message integrity protection measures implemented?", "approved", "level"),
            ("Protection", "Implemented protection measures are suitable to message integrity requirements", "approved", "level"),
            ("Practice", "Is the logging of events exists?", "approved", "binary"),
            ("Accountability", "Are the responsibilities defined?", "approved", "binary"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
    (
        "Technology",
        "12.6.1",
        "Control of technical vulnerabilities",
        "Timely information about technical vulnerabilities of information systems being used "
        "should be obtained, the organization exposure to such vulnerabilities evaluated and "
        "appropriate measures taken to address the associated risk.",
        (
            ("Inventory of technical assets", "Are the technical specifications of systems and their components exist?", "approved", "binary"),
            ("Vulnerability", "Are the vulnerabilities of technical assets identified?", "approved", "level"),
            ("Vulnerability", "Are the risks associated with vulnerabilities identified?", "approved", "level"),
            ("Protection", "Protection measures that respond to risks are identified", "approved", "level"),
            ("Protection", "Are the protection tools evaluated before use?", "approved", "level"),
            ("Protection", "Is the awareness on potential vulnerabilities among the right people exists?", "approved", "level"),
            ("Practice", "Does the monitoring to manage problems exist?", "approved", "binary"),
            ("Practice", "Are logging of events exist?", "approved", "level"),
            ("Accountability", "Do the defined responsibilities exist?", "approved", "binary"),
            ("Documentation", "Is the reporting of the above exists?", "approved", "level"),
        ),
    ),
)

_DOMAIN_META = {
    "Strategy": {"clauses": (5,), "objectives": 1, "controls_declared": 2},
    "Technology": {"clauses": (10, 11, 12), "objectives": 23, "controls_declared": 73},
}

_PROFILE_ENTRIES = (
    ("Security Policy", 1, 1),
    ("Organizing information security", 2, 1),
    ("Asset Management", 2, 0),
    ("Human Resources Security", 3, 3),
    ("Physical and Environmental", 2, 0),
    ("Communication and Operations Management", 10, 0),
    ("Access Control", 7, 0),
    ("IS Acquisition, Development and Maintenance", 6, 5),
    ("Information Security Incident Management", 2, 3),
    ("Business Continuity Management", 1, 5),
    ("Compliance", 3, 3),
)


def _build_issues(control_id: str, rows) -> tuple[AssessmentIssue, ...]:
    issues: list[AssessmentIssue] = []
    grouped: list[tuple[str, list]] = []
    for issue_name, text, status, kind in rows:
        if not grouped or grouped[-1][0] != issue_name:
            grouped.append((issue_name, []))
        grouped[-1][1].append((text, status, kind))
    for issue_index, (issue_name, question_rows) in enumerate(grouped, start=1):
        questions = tuple(
            Question(
                id=f"{control_id}.{issue_index}.{question_index}",
                text=text,
                status=Status(status),
                answer_kind=AnswerKind(kind),
            )
            for question_index, (text, status, kind) in enumerate(question_rows, start=1)
        )
        issues.append(AssessmentIssue(name=issue_name, questions=questions))
    return tuple(issues)


@lru_cache(maxsize=1)
def builtin_clause_profile() -> ClauseProfile:
    """The 11-clause ISO 27001 structural profile."""
    return ClauseProfile(
        entries=tuple(
            ClauseProfileEntry(clause_name=name, objectives=obj, essential_controls=essential)
            for name, obj, essential in _PROFILE_ENTRIES
        ),
        total_controls=132,
        total_essential=21,
        total_elements=246,
    )


@lru_cache(maxsize=1)
def builtin_seed_catalog() -> Catalog:
    """The embedded Strategy + Technology seed catalog (51 questions)."""
    domains: dict[str, list[Control]] = {}
    for domain_name, control_id, title, statement, rows in _SEED_CONTROLS:
        domains.setdefault(domain_name, []).append(
            Control(
                id=control_id,
                title=title,
                statement=statement,
                tier=Tier.ESSENTIAL,
                issues=_build_issues(control_id, rows),
            )
        )
    return Catalog(
        id="iso27001-essential-seed",
        version="1.0.0",
        domains=tuple(
            Domain(
                name=name,
                controls=tuple(controls),
                clause_numbers=_DOMAIN_META[name]["clauses"],
                declared_objectives=_DOMAIN_META[name]["objectives"],
                declared_controls=_DOMAIN_META[name]["controls_declared"],
            )
            for name, controls in domains.items()
        ),
        profile=builtin_clause_profile(),
    )
