"""Hierarchical score aggregation, gap ranking, and what-if deltas.

Answers normalize to [0, 1] (no=0, yes=1, level v=v/4) and aggregate by
arithmetic mean up the tree: question -> issue -> control -> domain, then a
weighted mean across domains. Two coverage modes:

* over-answered: means run over answered material only; a node with zero
  coverage has no score and is excluded from its parent's mean.
* strict: unanswered questions count as 0, so every (non-empty) node scores.

All aggregation runs on ``fractions.Fraction``; floats appear only at the
report boundary, so dyadic inputs produce exact dyadic outputs and nothing
accumulates representation error. Every function here is pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Mapping

from .catalog import AnswerKind, Catalog, Question, STOPE_DOMAINS, find_question
from .errors import DigestMismatchError, KindMismatchError
from .session import AnswerValue, Session, catalog_digest

_ONE = Fraction(1)
_ZERO = Fraction(0)


class ScoreMode(Enum):
    OVER_ANSWERED = "over-answered"
    STRICT_ZERO = "strict"


@dataclass(frozen=True)
class WeightScheme:
    """Per-domain weights plus the coverage mode.

    Weights are normalized (restricted to the domains actually present in a
    catalog) before use, so only their ratios matter. Names must be STOPE
    domain names; at least one weight must be positive.
    """

    domain_weights: Mapping[str, Fraction]
    mode: ScoreMode = ScoreMode.OVER_ANSWERED

    def __post_init__(self):
        converted: dict[str, Fraction] = {}
        for name, weight in self.domain_weights.items():
            if name not in STOPE_DOMAINS:
                raise ValueError(f"unknown domain name {name!r} in weights")
            weight = Fraction(weight)
            if weight < 0:
                raise ValueError(f"weight for {name!r} must be non-negative")
            converted[name] = weight
        if not any(w > 0 for w in converted.values()):
            raise ValueError("at least one domain weight must be positive")
        object.__setattr__(self, "domain_weights", converted)

    @classmethod
    def equal(cls, mode: ScoreMode = ScoreMode.OVER_ANSWERED) -> "WeightScheme":
        return cls({name: _ONE for name in STOPE_DOMAINS}, mode=mode)

    def restricted(self, domain_names: list[str]) -> dict[str, Fraction]:
        """Weights restricted to the given domains and normalized to sum 1."""
        picked = {name: self.domain_weights.get(name, _ZERO) for name in domain_names}
        total = sum(picked.values())
        if total == 0:
            raise ValueError("no positive weight among the catalog's domains")
        return {name: w / total for name, w in picked.items()}


def parse_weights_spec(spec: str) -> dict[str, Fraction]:
    """Parse "Strategy=2,Technology=1" style weight lists (names any case)."""
    weights: dict[str, Fraction] = {}
    for part in spec.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, raw = part.partition("=")
        name = name.strip().capitalize()
        if not sep or name not in STOPE_DOMAINS:
            raise ValueError(f"bad weight {part!r} (expected DomainName=number)")
        try:
            value = Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"bad weight value {raw.strip()!r} for {name}") from None
        if value < 0:
            raise ValueError(f"weight for {name} must be non-negative")
        weights[name] = value
    if not weights:
        raise ValueError("empty weight list")
    return weights


@dataclass(frozen=True)
class NodeScore:
    score: float | None
    coverage: float


@dataclass(frozen=True)
class ScoreReport:
    per_question: dict[str, float | None]
    per_issue: dict[tuple[str, str], NodeScore]
    per_control: dict[str, NodeScore]
    per_domain: dict[str, NodeScore]
    overall: NodeScore
    mode: ScoreMode
    weights: dict[str, float]


@dataclass(frozen=True)
class GapItem:
    question_id: str
    current: float | None
    potential_gain: float
    rank: int


@dataclass(frozen=True)
class WhatIfDelta:
    overrides: dict[str, AnswerValue]
    before: ScoreReport
    after: ScoreReport
    delta_overall: float


def _value_fraction(value: AnswerValue) -> Fraction:
    if value.kind is AnswerKind.BINARY:
        return _ONE if value.binary_value else _ZERO
    return Fraction(value.level_value, 4)


def normalize_answer(question: Question, value: AnswerValue) -> float:
    """Map an answer onto [0, 1]: no=0.0, yes=1.0, level v = v/4."""
    if value.kind is not question.answer_kind:
        raise KindMismatchError(
            f"question {question.id!r} takes {question.answer_kind.value} answers, "
            f"got {value.kind.value}"
        )
    return float(_value_fraction(value))


@dataclass(frozen=True)
class _Node:
    score: Fraction | None
    answered: int
    total: int

    @property
    def coverage(self) -> Fraction:
        return Fraction(self.answered, self.total) if self.total else _ZERO


def _mean_of_children(children: list[_Node]) -> _Node:
    # Scoreless children (zero coverage in over-answered mode, or empty
    # subtrees in either mode) are excluded from the mean.
    answered = sum(c.answered for c in children)
    total = sum(c.total for c in children)
    scored = [c.score for c in children if c.score is not None]
    if not scored:
        return _Node(None, answered, total)
    return _Node(sum(scored) / len(scored), answered, total)


def _aggregate(
    catalog: Catalog, values: Mapping[str, AnswerValue], mode: ScoreMode
) -> tuple[dict[tuple[str, str], _Node], dict[str, _Node], dict[str, _Node]]:
    per_issue: dict[tuple[str, str], _Node] = {}
    per_control: dict[str, _Node] = {}
    per_domain: dict[str, _Node] = {}
    for domain in catalog.domains:
        control_nodes = []
        for control in domain.controls:
            issue_nodes = []
            for issue in control.issues:
                answered = 0
                scores: list[Fraction] = []
                for question in issue.questions:
                    value = values.get(question.id)
                    if value is not None:
                        answered += 1
                        scores.append(_value_fraction(value))
                    elif mode is ScoreMode.STRICT_ZERO:
                        scores.append(_ZERO)
                total = len(issue.questions)
                score = sum(scores, _ZERO) / len(scores) if scores else None
                node = _Node(score, answered, total)
                per_issue[(control.id, issue.name)] = node
                issue_nodes.append(node)
            node = _mean_of_children(issue_nodes)
            per_control[control.id] = node
            control_nodes.append(node)
        per_domain[domain.name] = _mean_of_children(control_nodes)
    return per_issue, per_control, per_domain


def _overall_node(per_domain: dict[str, _Node], weights: dict[str, Fraction]) -> _Node:
    answered = sum(n.answered for n in per_domain.values())
    total = sum(n.total for n in per_domain.values())
    weighted = [(weights[name], node.score) for name, node in per_domain.items() if node.score is not None]
    mass = sum(w for w, _ in weighted)
    if not weighted or mass == 0:
        return _Node(None, answered, total)
    return _Node(sum(w * s for w, s in weighted) / mass, answered, total)


def _overall_fraction(
    catalog: Catalog, values: Mapping[str, AnswerValue], mode: ScoreMode, weights: dict[str, Fraction]
) -> Fraction | None:
    _, _, per_domain = _aggregate(catalog, values, mode)
    return _overall_node(per_domain, weights).score


def _build_report(
    catalog: Catalog, values: Mapping[str, AnswerValue], scheme: WeightScheme
) -> ScoreReport:
    weights = scheme.restricted([d.name for d in catalog.domains])
    per_issue, per_control, per_domain = _aggregate(catalog, values, scheme.mode)
    overall = _overall_node(per_domain, weights)

    def out(node: _Node) -> NodeScore:
        return NodeScore(
            score=float(node.score) if node.score is not None else None,
            coverage=float(node.coverage),
        )

    per_question: dict[str, float | None] = {}
    for domain in catalog.domains:
        for control in domain.controls:
            for issue in control.issues:
                for question in issue.questions:
                    value = values.get(question.id)
                    per_question[question.id] = (
                        float(_value_fraction(value)) if value is not None else None
                    )
    return ScoreReport(
        per_question=per_question,
        per_issue={key: out(node) for key, node in per_issue.items()},
        per_control={key: out(node) for key, node in per_control.items()},
        per_domain={key: out(node) for key, node in per_domain.items()},
        overall=out(overall),
        mode=scheme.mode,
        weights={name: float(w) for name, w in weights.items()},
    )


def _session_values(session: Session) -> dict[str, AnswerValue]:
    return {qid: answer.value for qid, answer in session.answers.items()}


def _check_digest(session: Session) -> None:
    if catalog_digest(session.catalog) != session.catalog_digest:
        raise DigestMismatchError(
            f"session {session.id!r} was recorded against a different catalog revision"
        )


def score_session(session: Session, weights: WeightScheme) -> ScoreReport:
    """Score a session at every granularity under the scheme's mode."""
    _check_digest(session)
    return _build_report(session.catalog, _session_values(session), weights)


def _max_value(question: Question) -> AnswerValue:
    if question.answer_kind is AnswerKind.BINARY:
        return AnswerValue.yes()
    return AnswerValue.level(4)


def gap_analysis(session: Session, weights: WeightScheme, top_k: int) -> list[GapItem]:
    """Rank questions by the overall-score gain of answering them at maximum.

    Gains for unanswered questions are computed in strict mode (an absent
    over-answered baseline cannot be differenced); answered questions use the
    scheme's own mode. Ordering: gain descending, then current score
    ascending (absent current first), then question id ascending.
    """
    if top_k < 1:
        raise ValueError("top_k must be at least 1")
    _check_digest(session)
    catalog = session.catalog
    values = _session_values(session)
    domain_names = [d.name for d in catalog.domains]
    restricted = weights.restricted(domain_names)

    baselines: dict[ScoreMode, Fraction | None] = {}

    def baseline(mode: ScoreMode) -> Fraction:
        if mode not in baselines:
            baselines[mode] = _overall_fraction(catalog, values, mode, restricted)
        score = baselines[mode]
        return score if score is not None else _ZERO

    ranked: list[tuple[Fraction, Fraction, str]] = []
    for domain in catalog.domains:
        for control in domain.controls:
            for issue in control.issues:
                for question in issue.questions:
                    current = values.get(question.id)
                    mode = weights.mode if current is not None else ScoreMode.STRICT_ZERO
                    upgraded = dict(values)
                    upgraded[question.id] = _max_value(question)
                    after = _overall_fraction(catalog, upgraded, mode, restricted)
                    gain = (after if after is not None else _ZERO) - baseline(mode)
                    current_key = _value_fraction(current) if current is not None else Fraction(-1)
                    ranked.append((gain, current_key, question.id))
    ranked.sort(key=lambda item: (-item[0], item[1], item[2]))
    items = []
    for rank, (gain, current_key, qid) in enumerate(ranked[:top_k], start=1):
        items.append(
            GapItem(
                question_id=qid,
                current=float(current_key) if current_key >= 0 else None,
                potential_gain=float(gain),
                rank=rank,
            )
        )
    return items


def what_if(
    session: Session, overrides: Mapping[str, AnswerValue], weights: WeightScheme
) -> WhatIfDelta:
    """Recompute scores under hypothetical answers; the session is untouched.

    All overrides are checked (existence and kind) before anything is
    computed.
    """
    _check_digest(session)
    catalog = session.catalog
    for qid, value in overrides.items():
        path = find_question(catalog, qid)
        if value.kind is not path.question.answer_kind:
            raise KindMismatchError(
                f"override for {qid!r} has kind {value.kind.value}, "
                f"question takes {path.question.answer_kind.value}"
            )
    before = _build_report(catalog, _session_values(session), weights)
    merged = _session_values(session)
    merged.update(overrides)
    after = _build_report(catalog, merged, weights)
    delta = (after.overall.score or 0.0) - (before.overall.score or 0.0)
    return WhatIfDelta(
        overrides=dict(overrides), before=before, after=after, delta_overall=delta
    )
