"""Assessment sessions: an auditor's answers over one catalog.

A session binds to its catalog through a content digest, keeps at most one
answer per question, and records every change in an append-only event log
(answered / amended / cleared, each amendment carrying the value it
replaced). Sessions have single-writer semantics; distinct sessions are
independent.
"""

from __future__ import annotations

import json
import os
import tempfile
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .catalog import (
    AnswerKind,
    Catalog,
    QuestionPath,
    catalog_digest,
    find_question,
    has_errors,
    iter_question_paths,
    validate_catalog,
)
from .errors import (
    DigestMismatchError,
    InvalidCatalogError,
    KindMismatchError,
    LevelRangeError,
    NotAnsweredError,
    SessionLoadError,
    UnknownQuestionError,
)

LEVEL_MIN = 0
LEVEL_MAX = 4
LEVEL_LABELS = ("None", "Initial", "Partial", "Defined", "Full")


class EventAction(Enum):
    ANSWERED = "answered"
    AMENDED = "amended"
    CLEARED = "cleared"


@dataclass(frozen=True)
class AnswerValue:
    """A binary yes/no or an ordinal level 0..4; exactly one is set."""

    kind: AnswerKind
    binary_value: bool | None = None
    level_value: int | None = None

    def __post_init__(self):
        if self.kind is AnswerKind.BINARY:
            if self.binary_value is None or self.level_value is not None:
                raise ValueError("binary answer must set binary_value only")
        else:
            if self.level_value is None or self.binary_value is not None:
                raise ValueError("level answer must set level_value only")
            if not LEVEL_MIN <= self.level_value <= LEVEL_MAX:
                raise LevelRangeError(
                    f"level value {self.level_value} outside [{LEVEL_MIN}, {LEVEL_MAX}]"
                )

    @classmethod
    def yes(cls) -> "AnswerValue":
        return cls(kind=AnswerKind.BINARY, binary_value=True)

    @classmethod
    def no(cls) -> "AnswerValue":
        return cls(kind=AnswerKind.BINARY, binary_value=False)

    @classmethod
    def level(cls, value: int) -> "AnswerValue":
        return cls(kind=AnswerKind.LEVEL, level_value=value)

    @classmethod
    def from_wire(cls, raw: Any) -> "AnswerValue":
        """Decode the scalar wire form: "yes"/"no" or an integer 0..4."""
        if isinstance(raw, str):
            if raw == "yes":
                return cls.yes()
            if raw == "no":
                return cls.no()
            raise ValueError(f"invalid answer value {raw!r} (expected yes, no, or 0..4)")
        if isinstance(raw, bool) or not isinstance(raw, int):
            raise ValueError(f"invalid answer value {raw!r} (expected yes, no, or 0..4)")
        return cls.level(raw)

    def to_wire(self) -> str | int:
        if self.kind is AnswerKind.BINARY:
            return "yes" if self.binary_value else "no"
        return self.level_value


@dataclass(frozen=True)
class Answer:
    question_id: str
    value: AnswerValue
    note: str | None
    answered_at: datetime


@dataclass(frozen=True)
class Event:
    at: datetime
    action: EventAction
    question_id: str
    previous_value: AnswerValue | None = None


@dataclass
class Session:
    id: str
    catalog_id: str
    catalog_digest: str
    created_at: datetime
    answers: dict[str, Answer] = field(default_factory=dict)
    events: list[Event] = field(default_factory=list)
    catalog: Catalog = field(compare=False, repr=False, default=None)  # type: ignore[assignment]


def _now() -> datetime:
    return datetime.now(timezone.utc).replace(microsecond=0)


def _stamp(at: datetime | None) -> datetime:
    if at is None:
        return _now()
    if at.tzinfo is None:
        raise ValueError("timestamps must be timezone-aware")
    return at.astimezone(timezone.utc).replace(microsecond=0)


def new_session(catalog: Catalog, *, at: datetime | None = None) -> Session:
    """Create an empty session over a catalog with no validation Errors."""
    findings = validate_catalog(catalog)
    if has_errors(findings):
        first = next(f for f in findings if f.severity.value == "error")
        raise InvalidCatalogError(f"catalog {catalog.id!r} has validation errors: {first.message}")
    return Session(
        id=str(uuid.uuid4()),
        catalog_id=catalog.id,
        catalog_digest=catalog_digest(catalog),
        created_at=_stamp(at),
        catalog=catalog,
    )


def _lookup(session: Session, question_id: str) -> QuestionPath:
    return find_question(session.catalog, question_id)


def record_answer(
    session: Session,
    question_id: str,
    value: AnswerValue,
    note: str | None = None,
    *,
    at: datetime | None = None,
) -> Session:
    """Record or amend one answer; on any error the session is unchanged."""
    path = _lookup(session, question_id)
    if value.kind is not path.question.answer_kind:
        raise KindMismatchError(
            f"question {question_id!r} takes {path.question.answer_kind.value} answers, "
            f"got {value.kind.value}"
        )
    stamp = _stamp(at)
    previous = session.answers.get(question_id)
    action = EventAction.AMENDED if previous is not None else EventAction.ANSWERED
    session.answers[question_id] = Answer(
        question_id=question_id, value=value, note=note, answered_at=stamp
    )
    session.events.append(
        Event(
            at=stamp,
            action=action,
            question_id=question_id,
            previous_value=previous.value if previous is not None else None,
        )
    )
    return session


def clear_answer(session: Session, question_id: str, *, at: datetime | None = None) -> Session:
    _lookup(session, question_id)
    previous = session.answers.get(question_id)
    if previous is None:
        raise NotAnsweredError(f"question {question_id!r} is not answered")
    stamp = _stamp(at)
    del session.answers[question_id]
    session.events.append(
        Event(at=stamp, action=EventAction.CLEARED, question_id=question_id, previous_value=previous.value)
    )
    return session


def next_unanswered(session: Session) -> QuestionPath | None:
    """First unanswered question in catalog document order, or None."""
    for path in iter_question_paths(session.catalog):
        if path.question.id not in session.answers:
            return path
    return None


def completeness(session: Session) -> dict:
    """Answered/total counts, overall and per domain."""
    per_domain: dict[str, dict[str, int]] = {}
    answered = 0
    total = 0
    for path in iter_question_paths(session.catalog):
        bucket = per_domain.setdefault(path.domain.name, {"answered": 0, "total": 0})
        bucket["total"] += 1
        total += 1
        if path.question.id in session.answers:
            bucket["answered"] += 1
            answered += 1
    return {"answered": answered, "total": total, "per_domain": per_domain}


# -- event-log integrity ----------------------------------------------------


def replay_answered_ids(events: Iterable[Event]) -> set[str]:
    """Fold the event log from an empty answer map.

    Returns the set of question ids that end up answered and checks the
    previous-value chain: each amend/clear must reference a currently
    answered question and each answered event an unanswered one. Raises
    SessionLoadError on inconsistency. Final values are not derivable from
    the log (events store only previous values); callers compare the id set
    against the answers map.
    """
    answered: set[str] = set()
    for i, event in enumerate(events):
        qid = event.question_id
        if event.action is EventAction.ANSWERED:
            if qid in answered or event.previous_value is not None:
                raise SessionLoadError(f"event #{i + 1}: answered event for already-answered {qid!r}")
            answered.add(qid)
        elif event.action is EventAction.AMENDED:
            if qid not in answered or event.previous_value is None:
                raise SessionLoadError(f"event #{i + 1}: amended event without prior answer for {qid!r}")
        else:
            if qid not in answered or event.previous_value is None:
                raise SessionLoadError(f"event #{i + 1}: cleared event without prior answer for {qid!r}")
            answered.discard(qid)
    return answered


# -- persistence ------------------------------------------------------------

_SESSION_KEYS = ("id", "catalog_id", "catalog_digest", "created_at", "answers", "events")
_ANSWER_KEYS = ("question_id", "kind", "value", "note", "answered_at")
_EVENT_KEYS = ("at", "action", "question_id", "previous")


def _format_ts(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_ts(raw: Any, where: str) -> datetime:
    if not isinstance(raw, str):
        raise SessionLoadError(f"{where}: timestamp must be a string")
    try:
        ts = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError:
        raise SessionLoadError(f"{where}: invalid RFC 3339 timestamp {raw!r}") from None
    if ts.tzinfo is None:
        raise SessionLoadError(f"{where}: timestamp {raw!r} lacks a timezone")
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def save_session(session: Session) -> str:
    """Serialize to the session file format (UTF-8 JSON text)."""
    doc = {
        "id": session.id,
        "catalog_id": session.catalog_id,
        "catalog_digest": session.catalog_digest,
        "created_at": _format_ts(session.created_at),
        "answers": [
            {
                "question_id": a.question_id,
                "kind": a.value.kind.value,
                "value": a.value.to_wire(),
                "note": a.note,
                "answered_at": _format_ts(a.answered_at),
            }
            for a in session.answers.values()
        ],
        "events": [
            {
                "at": _format_ts(e.at),
                "action": e.action.value,
                "question_id": e.question_id,
                "previous": e.previous_value.to_wire() if e.previous_value is not None else None,
            }
            for e in session.events
        ],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _load_value(raw_kind: Any, raw_value: Any, where: str) -> AnswerValue:
    if raw_kind not in ("binary", "level"):
        raise SessionLoadError(f"{where}: unknown kind {raw_kind!r}")
    try:
        value = AnswerValue.from_wire(raw_value)
    except LevelRangeError as exc:
        raise SessionLoadError(f"{where}: {exc}") from None
    except ValueError as exc:
        raise SessionLoadError(f"{where}: {exc}") from None
    if value.kind.value != raw_kind:
        raise SessionLoadError(f"{where}: value {raw_value!r} does not match kind {raw_kind!r}")
    return value


def load_session(text: str, catalog: Catalog) -> Session:
    """Parse a stored session and bind it to its catalog.

    The catalog must hash to the stored catalog_digest; stored answers must
    reference known questions, match their answer kinds, and be within range;
    the event log must replay to the stored answer set.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SessionLoadError(f"invalid JSON: {exc.msg} (line {exc.lineno})") from None
    if not isinstance(doc, dict):
        raise SessionLoadError("session document must be a JSON object")
    for key in doc:
        if key not in _SESSION_KEYS:
            raise SessionLoadError(f"unknown field {key!r} in session document")
    for key in _SESSION_KEYS:
        if key not in doc:
            raise SessionLoadError(f"missing required field {key!r} in session document")
    if not isinstance(doc["id"], str) or not doc["id"]:
        raise SessionLoadError("session id must be a non-empty string")
    if not isinstance(doc["catalog_digest"], str):
        raise SessionLoadError("catalog_digest must be a string")
    expected = catalog_digest(catalog)
    if doc["catalog_digest"] != expected:
        raise DigestMismatchError(
            f"session was recorded against catalog digest {doc['catalog_digest'][:12]}..., "
            f"but the provided catalog hashes to {expected[:12]}..."
        )
    if doc["catalog_id"] != catalog.id:
        raise SessionLoadError(f"catalog_id {doc['catalog_id']!r} does not match {catalog.id!r}")

    session = Session(
        id=doc["id"],
        catalog_id=doc["catalog_id"],
        catalog_digest=doc["catalog_digest"],
        created_at=_parse_ts(doc["created_at"], "created_at"),
        catalog=catalog,
    )
    if not isinstance(doc["answers"], list) or not isinstance(doc["events"], list):
        raise SessionLoadError("'answers' and 'events' must be lists")
    for i, raw in enumerate(doc["answers"]):
        where = f"answer #{i + 1}"
        if not isinstance(raw, dict):
            raise SessionLoadError(f"{where}: must be an object")
        for key in raw:
            if key not in _ANSWER_KEYS:
                raise SessionLoadError(f"{where}: unknown field {key!r}")
        for key in _ANSWER_KEYS:
            if key not in raw:
                raise SessionLoadError(f"{where}: missing field {key!r}")
        qid = raw["question_id"]
        if not isinstance(qid, str):
            raise SessionLoadError(f"{where}: question_id must be a string")
        try:
            path = find_question(catalog, qid)
        except UnknownQuestionError:
            raise SessionLoadError(f"{where}: unknown question id {qid!r}") from None
        if qid in session.answers:
            raise SessionLoadError(f"{where}: duplicate answer for question {qid!r}")
        value = _load_value(raw["kind"], raw["value"], f"question {qid!r}")
        if value.kind is not path.question.answer_kind:
            raise SessionLoadError(
                f"question {qid!r}: stored kind {value.kind.value!r} does not match "
                f"catalog kind {path.question.answer_kind.value!r}"
            )
        note = raw["note"]
        if note is not None and not isinstance(note, str):
            raise SessionLoadError(f"{where}: note must be a string or null")
        session.answers[qid] = Answer(
            question_id=qid,
            value=value,
            note=note,
            answered_at=_parse_ts(raw["answered_at"], where),
        )
    previous_at: datetime | None = None
    for i, raw in enumerate(doc["events"]):
        where = f"event #{i + 1}"
        if not isinstance(raw, dict):
            raise SessionLoadError(f"{where}: must be an object")
        for key in raw:
            if key not in _EVENT_KEYS:
                raise SessionLoadError(f"{where}: unknown field {key!r}")
        for key in _EVENT_KEYS:
            if key not in raw:
                raise SessionLoadError(f"{where}: missing field {key!r}")
        try:
            action = EventAction(raw["action"])
        except ValueError:
            raise SessionLoadError(f"{where}: unknown action {raw['action']!r}") from None
        qid = raw["question_id"]
        if not isinstance(qid, str):
            raise SessionLoadError(f"{where}: question_id must be a string")
        try:
            path = find_question(catalog, qid)
        except UnknownQuestionError:
            raise SessionLoadError(f"{where}: unknown question id {qid!r}") from None
        previous = None
        if raw["previous"] is not None:
            previous = AnswerValue.from_wire(raw["previous"])
            if previous.kind is not path.question.answer_kind:
                raise SessionLoadError(f"{where}: previous value kind does not match question {qid!r}")
        at = _parse_ts(raw["at"], where)
        if previous_at is not None and at < previous_at:
            raise SessionLoadError(f"{where}: event timestamps must be non-decreasing")
        previous_at = at
        session.events.append(Event(at=at, action=action, question_id=qid, previous_value=previous))
    replayed = replay_answered_ids(session.events)
    if replayed != set(session.answers):
        raise SessionLoadError("event log does not replay to the stored answer set")
    return session


def save_session_file(session: Session, path: str | Path) -> None:
    """Atomic write: temp file in the target directory, then rename."""
    path = Path(path)
    text = save_session(session)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def load_session_file(path: str | Path, catalog: Catalog) -> Session:
    return load_session(Path(path).read_text(encoding="utf-8"), catalog)
