"""Control catalog: data model, strict parser, canonical renderer, validator.

A catalog is a versioned tree: analysis domains hold controls, controls hold
assessment issues, issues hold questions. Catalog values are immutable after
construction and safe to share across threads; every function here is pure.

The external format is a strict UTF-8 JSON document (unknown fields are
rejected, enum tokens are lower-case). ``render_catalog`` emits a canonical
byte-stable serialization and ``parse_catalog(render_catalog(c))`` yields a
catalog equal to ``c``.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterator, NamedTuple

from .errors import CatalogParseError, UnknownQuestionError

# Canonical axis order; also the only admissible domain names.
STOPE_DOMAINS = ("Strategy", "Technology", "Organization", "People", "Environment")

_CONTROL_ID_RE = re.compile(r"^\d+(\.\d+){0,2}$")


class Tier(Enum):
    ESSENTIAL = "essential"
    SPECIAL = "special"
    EXTENDED = "extended"


class Status(Enum):
    APPROVED = "approved"
    MODIFIED = "modified"
    ADDED = "added"


class AnswerKind(Enum):
    BINARY = "binary"
    LEVEL = "level"


@dataclass(frozen=True)
class Question:
    id: str
    text: str
    status: Status
    answer_kind: AnswerKind


@dataclass(frozen=True)
class AssessmentIssue:
    name: str
    questions: tuple[Question, ...]


@dataclass(frozen=True)
class Control:
    id: str
    title: str
    statement: str
    tier: Tier
    issues: tuple[AssessmentIssue, ...]


@dataclass(frozen=True)
class Domain:
    name: str
    controls: tuple[Control, ...]
    clause_numbers: tuple[int, ...] = ()
    declared_objectives: int | None = None
    declared_controls: int | None = None


@dataclass(frozen=True)
class ClauseProfileEntry:
    clause_name: str
    objectives: int
    essential_controls: int


@dataclass(frozen=True)
class ClauseProfile:
    entries: tuple[ClauseProfileEntry, ...]
    total_controls: int
    total_essential: int
    total_elements: int


@dataclass(frozen=True)
class Catalog:
    id: str
    version: str
    domains: tuple[Domain, ...]
    profile: ClauseProfile | None = None


class QuestionPath(NamedTuple):
    """Full ancestry of one question inside a catalog."""

    domain: Domain
    control: Control
    issue: AssessmentIssue
    question: Question


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Finding:
    severity: Severity
    code: str
    message: str
    element: str


def iter_question_paths(catalog: Catalog) -> Iterator[QuestionPath]:
    """Yield every question with its ancestry, in document order."""
    for domain in catalog.domains:
        for control in domain.controls:
            for issue in control.issues:
                for question in issue.questions:
                    yield QuestionPath(domain, control, issue, question)


def question_ids(catalog: Catalog) -> list[str]:
    return [path.question.id for path in iter_question_paths(catalog)]


def find_question(catalog: Catalog, question_id: str) -> QuestionPath:
    """Resolve a question id to its full ancestry path.

    Raises UnknownQuestionError for ids the catalog does not contain.
    """
    for path in iter_question_paths(catalog):
        if path.question.id == question_id:
            return path
    raise UnknownQuestionError(f"no question with id {question_id!r} in catalog {catalog.id!r}")


def catalog_digest(catalog: Catalog) -> str:
    """SHA-256 hex digest of the canonical serialization."""
    return hashlib.sha256(render_catalog(catalog).encode("utf-8")).hexdigest()


# -- parsing ---------------------------------------------------------------

_TOP_KEYS = ("id", "version", "profile", "domains")
_DOMAIN_KEYS = ("name", "clauses", "objectives", "controls_declared", "controls")
_CONTROL_KEYS = ("id", "title", "statement", "tier", "issues")
_ISSUE_KEYS = ("name", "questions")
_QUESTION_KEYS = ("id", "text", "status", "answer_kind")
_PROFILE_KEYS = ("entries", "total_controls", "total_essential", "total_elements")
_ENTRY_KEYS = ("clause", "objectives", "essential_controls")


def _require_object(value: Any, where: str) -> dict:
    if not isinstance(value, dict):
        raise CatalogParseError(f"expected a JSON object for {where}", element=where)
    return value


def _check_keys(obj: dict, allowed: tuple[str, ...], required: tuple[str, ...], where: str) -> None:
    for key in obj:
        if key not in allowed:
            raise CatalogParseError(f"unknown field {key!r}", element=where)
    for key in required:
        if key not in obj:
            raise CatalogParseError(f"missing required field {key!r}", element=where)


def _get_str(obj: dict, key: str, where: str, *, allow_empty: bool = False) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise CatalogParseError(f"field {key!r} must be a string", element=where)
    if not allow_empty and not value:
        raise CatalogParseError(f"field {key!r} must not be empty", element=where)
    return value


def _get_opt_int(obj: dict, key: str, where: str) -> int | None:
    value = obj.get(key)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise CatalogParseError(f"field {key!r} must be an integer or null", element=where)
    if value < 0:
        raise CatalogParseError(f"field {key!r} must be non-negative", element=where)
    return value


def _get_int(obj: dict, key: str, where: str) -> int:
    value = obj.get(key)
    if isinstance(value, bool) or not isinstance(value, int):
        raise CatalogParseError(f"field {key!r} must be an integer", element=where)
    return value


def _get_enum(obj: dict, key: str, enum_cls: type[Enum], where: str) -> Any:
    token = _get_str(obj, key, where)
    try:
        return enum_cls(token)
    except ValueError:
        valid = ", ".join(member.value for member in enum_cls)
        raise CatalogParseError(
            f"unknown {key} token {token!r} (expected one of: {valid})", element=where
        ) from None


def _parse_question(obj: Any, where: str, seen_ids: dict[str, str]) -> Question:
    obj = _require_object(obj, where)
    _check_keys(obj, _QUESTION_KEYS, _QUESTION_KEYS, where)
    qid = _get_str(obj, "id", where)
    if qid in seen_ids:
        raise CatalogParseError(
            f"duplicate question id {qid!r} (first seen in {seen_ids[qid]})", element=qid
        )
    seen_ids[qid] = where
    text = _get_str(obj, "text", f"question {qid!r}")
    status = _get_enum(obj, "status", Status, f"question {qid!r}")
    kind = _get_enum(obj, "answer_kind", AnswerKind, f"question {qid!r}")
    return Question(id=qid, text=text, status=status, answer_kind=kind)


def _parse_issue(obj: Any, where: str, seen_ids: dict[str, str]) -> AssessmentIssue:
    obj = _require_object(obj, where)
    _check_keys(obj, _ISSUE_KEYS, _ISSUE_KEYS, where)
    name = _get_str(obj, "name", where)
    questions_raw = obj["questions"]
    if not isinstance(questions_raw, list):
        raise CatalogParseError("field 'questions' must be a list", element=f"issue {name!r}")
    questions = tuple(
        _parse_question(q, f"issue {name!r} question #{i + 1}", seen_ids)
        for i, q in enumerate(questions_raw)
    )
    return AssessmentIssue(name=name, questions=questions)


def _parse_control(obj: Any, where: str, seen_ids: dict[str, str]) -> Control:
    obj = _require_object(obj, where)
    _check_keys(obj, _CONTROL_KEYS, _CONTROL_KEYS, where)
    cid = _get_str(obj, "id", where)
    title = _get_str(obj, "title", f"control {cid!r}", allow_empty=True)
    statement = _get_str(obj, "statement", f"control {cid!r}", allow_empty=True)
    tier = _get_enum(obj, "tier", Tier, f"control {cid!r}")
    issues_raw = obj["issues"]
    if not isinstance(issues_raw, list):
        raise CatalogParseError("field 'issues' must be a list", element=f"control {cid!r}")
    issues = tuple(
        _parse_issue(issue, f"control {cid!r} issue #{i + 1}", seen_ids)
        for i, issue in enumerate(issues_raw)
    )
    return Control(id=cid, title=title, statement=statement, tier=tier, issues=issues)


def _parse_domain(obj: Any, where: str, seen_ids: dict[str, str]) -> Domain:
    obj = _require_object(obj, where)
    _check_keys(obj, _DOMAIN_KEYS, ("name", "controls"), where)
    name = _get_str(obj, "name", where)
    if name not in STOPE_DOMAINS:
        raise CatalogParseError(
            f"unknown domain name {name!r} (expected one of: {', '.join(STOPE_DOMAINS)})",
            element=name,
        )
    clauses_raw = obj.get("clauses", [])
    if not isinstance(clauses_raw, list) or any(
        isinstance(c, bool) or not isinstance(c, int) for c in clauses_raw
    ):
        raise CatalogParseError("field 'clauses' must be a list of integers", element=name)
    controls_raw = obj["controls"]
    if not isinstance(controls_raw, list):
        raise CatalogParseError("field 'controls' must be a list", element=name)
    controls = tuple(
        _parse_control(c, f"domain {name!r} control #{i + 1}", seen_ids)
        for i, c in enumerate(controls_raw)
    )
    return Domain(
        name=name,
        controls=controls,
        clause_numbers=tuple(clauses_raw),
        declared_objectives=_get_opt_int(obj, "objectives", name),
        declared_controls=_get_opt_int(obj, "controls_declared", name),
    )


def _parse_profile(obj: Any) -> ClauseProfile | None:
    if obj is None:
        return None
    obj = _require_object(obj, "profile")
    _check_keys(obj, _PROFILE_KEYS, _PROFILE_KEYS, "profile")
    entries_raw = obj["entries"]
    if not isinstance(entries_raw, list):
        raise CatalogParseError("field 'entries' must be a list", element="profile")
    entries = []
    for i, entry_raw in enumerate(entries_raw):
        where = f"profile entry #{i + 1}"
        entry_obj = _require_object(entry_raw, where)
        _check_keys(entry_obj, _ENTRY_KEYS, _ENTRY_KEYS, where)
        entries.append(
            ClauseProfileEntry(
                clause_name=_get_str(entry_obj, "clause", where),
                objectives=_get_int(entry_obj, "objectives", where),
                essential_controls=_get_int(entry_obj, "essential_controls", where),
            )
        )
    return ClauseProfile(
        entries=tuple(entries),
        total_controls=_get_int(obj, "total_controls", "profile"),
        total_essential=_get_int(obj, "total_essential", "profile"),
        total_elements=_get_int(obj, "total_elements", "profile"),
    )


def parse_catalog(text: str) -> Catalog:
    """Parse a catalog document, preserving document order everywhere.

    Raises CatalogParseError on syntax errors (with line/column), unknown
    domain/status/answer_kind/tier tokens, duplicate question ids, unknown
    fields, and empty required fields; the error names the offending element.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CatalogParseError(f"invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from None
    doc = _require_object(doc, "catalog")
    _check_keys(doc, _TOP_KEYS, _TOP_KEYS, "catalog")
    catalog_id = _get_str(doc, "id", "catalog")
    version = _get_str(doc, "version", "catalog")
    profile = _parse_profile(doc["profile"])
    domains_raw = doc["domains"]
    if not isinstance(domains_raw, list):
        raise CatalogParseError("field 'domains' must be a list", element="catalog")
    seen_ids: dict[str, str] = {}
    seen_domains: set[str] = set()
    domains = []
    for i, domain_raw in enumerate(domains_raw):
        domain = _parse_domain(domain_raw, f"domain #{i + 1}", seen_ids)
        if domain.name in seen_domains:
            raise CatalogParseError(f"duplicate domain {domain.name!r}", element=domain.name)
        seen_domains.add(domain.name)
        domains.append(domain)
    return Catalog(id=catalog_id, version=version, domains=tuple(domains), profile=profile)


# -- rendering -------------------------------------------------------------


def _profile_to_obj(profile: ClauseProfile | None) -> Any:
    if profile is None:
        return None
    return {
        "entries": [
            {
                "clause": e.clause_name,
                "objectives": e.objectives,
                "essential_controls": e.essential_controls,
            }
            for e in profile.entries
        ],
        "total_controls": profile.total_controls,
        "total_essential": profile.total_essential,
        "total_elements": profile.total_elements,
    }


def catalog_to_obj(catalog: Catalog) -> dict:
    """Plain-dict image of the catalog in the external JSON schema."""
    return {
        "id": catalog.id,
        "version": catalog.version,
        "profile": _profile_to_obj(catalog.profile),
        "domains": [
            {
                "name": d.name,
                "clauses": list(d.clause_numbers),
                "objectives": d.declared_objectives,
                "controls_declared": d.declared_controls,
                "controls": [
                    {
                        "id": c.id,
                        "title": c.title,
                        "statement": c.statement,
                        "tier": c.tier.value,
                        "issues": [
                            {
                                "name": issue.name,
                                "questions": [
                                    {
                                        "id": q.id,
                                        "text": q.text,
                                        "status": q.status.value,
                                        "answer_kind": q.answer_kind.value,
                                    }
                                    for q in issue.questions
                                ],
                            }
                            for issue in c.issues
                        ],
                    }
                    for c in d.controls
                ],
            }
            for d in catalog.domains
        ],
    }


def render_catalog(catalog: Catalog) -> str:
    """Serialize to the canonical external format (deterministic bytes)."""
    return json.dumps(catalog_to_obj(catalog), ensure_ascii=False, indent=2) + "\n"


# -- validation ------------------------------------------------------------


def validate_catalog(catalog: Catalog) -> list[Finding]:
    """Check structural invariants; returns findings in document order.

    Errors mark catalogs unusable for assessment (duplicate ids, empty text,
    malformed control ids); count disagreements are Warnings because partial
    catalogs are legitimate.
    """
    findings: list[Finding] = []

    def error(code: str, message: str, element: str) -> None:
        findings.append(Finding(Severity.ERROR, code, message, element))

    def warning(code: str, message: str, element: str) -> None:
        findings.append(Finding(Severity.WARNING, code, message, element))

    seen_domains: set[str] = set()
    seen_controls: set[str] = set()
    seen_questions: set[str] = set()
    for domain in catalog.domains:
        if domain.name not in STOPE_DOMAINS:
            error("unknown-domain", f"domain name {domain.name!r} is not a STOPE domain", domain.name)
        if domain.name in seen_domains:
            error("duplicate-domain", f"domain {domain.name!r} appears more than once", domain.name)
        seen_domains.add(domain.name)
        essential = sum(1 for c in domain.controls if c.tier is Tier.ESSENTIAL)
        for control in domain.controls:
            if not _CONTROL_ID_RE.match(control.id):
                error(
                    "malformed-control-id",
                    f"control id {control.id!r} is not 1-3 dot-separated numbers",
                    control.id,
                )
            if control.id in seen_controls:
                error("duplicate-control-id", f"control id {control.id!r} appears more than once", control.id)
            seen_controls.add(control.id)
            if control.tier is Tier.ESSENTIAL and not control.statement:
                error("empty-text", f"essential control {control.id!r} has an empty statement", control.id)
            seen_issues: set[str] = set()
            for issue in control.issues:
                if not issue.name:
                    error("empty-text", f"control {control.id!r} has an issue with an empty name", control.id)
                if issue.name in seen_issues:
                    error(
                        "duplicate-issue",
                        f"issue {issue.name!r} appears more than once in control {control.id!r}",
                        f"{control.id}/{issue.name}",
                    )
                seen_issues.add(issue.name)
                for question in issue.questions:
                    if not question.id:
                        error("empty-text", "question with empty id", f"{control.id}/{issue.name}")
                        continue
                    if question.id in seen_questions:
                        error("duplicate-id", f"question id {question.id!r} appears more than once", question.id)
                    seen_questions.add(question.id)
                    if not question.text:
                        error("empty-text", f"question {question.id!r} has empty text", question.id)
        if domain.declared_controls is not None:
            if essential > domain.declared_controls:
                warning(
                    "declared-count-mismatch",
                    f"domain {domain.name!r} declares {domain.declared_controls} controls "
                    f"but contains {essential} essential ones",
                    domain.name,
                )
            elif len(domain.controls) > domain.declared_controls:
                warning(
                    "declared-count-mismatch",
                    f"domain {domain.name!r} declares {domain.declared_controls} controls "
                    f"but contains {len(domain.controls)}",
                    domain.name,
                )
    profile = catalog.profile
    if profile is not None:
        entry_sum = sum(e.essential_controls for e in profile.entries)
        if entry_sum != profile.total_essential:
            warning(
                "profile-total-mismatch",
                f"profile total_essential is {profile.total_essential} "
                f"but entries sum to {entry_sum}",
                "profile",
            )
    return findings


def has_errors(findings: list[Finding]) -> bool:
    return any(f.severity is Severity.ERROR for f in findings)
