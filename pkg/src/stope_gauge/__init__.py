"""ISO 27001 essential-control self-assessment engine.

Catalogs structure controls over the five STOPE analysis domains (Strategy,
Technology, Organization, People, Environment); sessions record an auditor's
answers; scoring aggregates them hierarchically and ranks remediation gaps.
"""

from .catalog import (
    AnswerKind,
    AssessmentIssue,
    Catalog,
    ClauseProfile,
    ClauseProfileEntry,
    Control,
    Domain,
    Finding,
    Question,
    QuestionPath,
    STOPE_DOMAINS,
    Severity,
    Status,
    Tier,
    catalog_digest,
    find_question,
    has_errors,
    iter_question_paths,
    parse_catalog,
    question_ids,
    render_catalog,
    validate_catalog,
)
from .errors import (
    CatalogParseError,
    DigestMismatchError,
    InvalidCatalogError,
    KindMismatchError,
    LevelRangeError,
    NotAnsweredError,
    SessionLoadError,
    StopeGaugeError,
    UnknownQuestionError,
)
from .report import RadarData, radar_data, render_report_json, render_report_markdown, report_to_dict
from .scoring import (
    GapItem,
    NodeScore,
    ScoreMode,
    ScoreReport,
    WeightScheme,
    WhatIfDelta,
    gap_analysis,
    normalize_answer,
    parse_weights_spec,
    score_session,
    what_if,
)
from .seed import builtin_clause_profile, builtin_seed_catalog
from .session import (
    Answer,
    AnswerValue,
    Event,
    EventAction,
    LEVEL_LABELS,
    Session,
    clear_answer,
    completeness,
    load_session,
    load_session_file,
    new_session,
    next_unanswered,
    record_answer,
    replay_answered_ids,
    save_session,
    save_session_file,
)

__version__ = "0.1.0"
