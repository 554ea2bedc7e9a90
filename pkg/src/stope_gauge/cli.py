"""Command-line interface.

Exit codes: 0 success, 1 validation Errors found, 2 usage error, 3 I/O or
format error. Data goes to stdout, diagnostics to stderr. Session files are
written atomically (temp file, then rename). The default catalog is the
built-in seed; STOPE_GAUGE_CATALOG overrides it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import IO

from .catalog import Catalog, Severity, parse_catalog, render_catalog, validate_catalog
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
from .report import render_report_json, render_report_markdown, report_to_dict
from .scoring import (
    ScoreMode,
    WeightScheme,
    gap_analysis,
    parse_weights_spec,
    score_session,
    what_if,
)
from .seed import builtin_seed_catalog
from .session import (
    AnswerValue,
    LEVEL_LABELS,
    Session,
    completeness,
    load_session_file,
    new_session,
    next_unanswered,
    record_answer,
    save_session_file,
)

CATALOG_ENV = "STOPE_GAUGE_CATALOG"

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2
EXIT_IO = 3

_USAGE_ERRORS = (
    UnknownQuestionError,
    KindMismatchError,
    LevelRangeError,
    NotAnsweredError,
)
_IO_ERRORS = (
    CatalogParseError,
    SessionLoadError,
    DigestMismatchError,
    InvalidCatalogError,
    OSError,
)


class UsageError(StopeGaugeError):
    pass


def _load_catalog(path: str | None) -> Catalog:
    """Explicit path > STOPE_GAUGE_CATALOG > built-in seed."""
    if path is None:
        path = os.environ.get(CATALOG_ENV)
    if path is None:
        return builtin_seed_catalog()
    return parse_catalog(Path(path).read_text(encoding="utf-8"))


def _scheme(mode_token: str, weights_spec: str | None) -> WeightScheme:
    mode = ScoreMode(mode_token)
    if weights_spec is None:
        return WeightScheme.equal(mode)
    try:
        return WeightScheme(parse_weights_spec(weights_spec), mode=mode)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _parse_value(token: str) -> AnswerValue:
    token = token.strip()
    if token in ("yes", "no"):
        return AnswerValue.from_wire(token)
    try:
        level = int(token)
    except ValueError:
        raise UsageError(f"bad answer value {token!r} (expected yes, no, or 0..4)") from None
    if not 0 <= level <= 4:
        raise UsageError(f"level value {level} outside 0..4")
    return AnswerValue.level(level)


# -- subcommand handlers -----------------------------------------------------


def _cmd_catalog_validate(args) -> int:
    catalog = _load_catalog(args.file)
    findings = validate_catalog(catalog)
    errors = sum(1 for f in findings if f.severity is Severity.ERROR)
    warnings = len(findings) - errors
    for finding in findings:
        print(f"{finding.severity.value}: {finding.code}: {finding.message}")
    print(f"{errors} errors, {warnings} warnings ({catalog.id} v{catalog.version})")
    return EXIT_FINDINGS if errors else EXIT_OK


def _cmd_catalog_show(args) -> int:
    catalog = _load_catalog(args.file)
    for domain in catalog.domains:
        if args.domain and domain.name != args.domain.capitalize():
            continue
        print(f"{domain.name} (clauses {', '.join(map(str, domain.clause_numbers)) or '-'})")
        for control in domain.controls:
            print(f"  {control.id} {control.title} [{control.tier.value}]")
            for issue in control.issues:
                print(f"    {issue.name}")
                for question in issue.questions:
                    print(
                        f"      {question.id} [{question.answer_kind.value}/"
                        f"{question.status.value}] {question.text}"
                    )
    return EXIT_OK


def _cmd_catalog_export_builtin(args) -> int:
    sys.stdout.write(render_catalog(builtin_seed_catalog()))
    return EXIT_OK


def _cmd_assess_new(args) -> int:
    catalog = _load_catalog(args.catalog)
    session = new_session(catalog)
    save_session_file(session, args.out)
    print(session.id)
    return EXIT_OK


def _load_bound_session(path: str, catalog_path: str | None = None) -> Session:
    catalog = _load_catalog(catalog_path)
    return load_session_file(path, catalog)


def _cmd_assess_answer(args) -> int:
    session = _load_bound_session(args.file)
    value = _parse_value(args.value)
    record_answer(session, args.question, value, note=args.note)
    save_session_file(session, args.file)
    print(f"{args.question} = {value.to_wire()}")
    return EXIT_OK


def _cmd_assess_report(args) -> int:
    session = _load_bound_session(args.file)
    scheme = _scheme(args.mode, args.weights)
    report = score_session(session, scheme)
    gaps = gap_analysis(session, scheme, args.gaps) if args.gaps else None
    if args.format == "json":
        sys.stdout.write(render_report_json(report, session, gaps))
    else:
        sys.stdout.write(render_report_markdown(report, session, session.catalog, gaps))
    return EXIT_OK


def _cmd_assess_whatif(args) -> int:
    session = _load_bound_session(args.file)
    overrides: dict[str, AnswerValue] = {}
    for part in args.set.split(","):
        part = part.strip()
        if not part:
            continue
        qid, sep, raw = part.partition("=")
        if not sep:
            raise UsageError(f"bad override {part!r} (expected ID=VALUE)")
        overrides[qid.strip()] = _parse_value(raw)
    scheme = _scheme(args.mode, args.weights)
    delta = what_if(session, overrides, scheme)
    per_domain_delta = {
        name: (delta.after.per_domain[name].score or 0.0)
        - (delta.before.per_domain[name].score or 0.0)
        for name in delta.before.per_domain
    }
    doc = {
        "delta_overall": delta.delta_overall,
        "delta_per_domain": per_domain_delta,
        "before": report_to_dict(delta.before, session),
        "after": report_to_dict(delta.after, session),
    }
    print(json.dumps(doc, ensure_ascii=False, indent=2))
    return EXIT_OK


def run_wizard(
    session_path: str,
    catalog: Catalog,
    *,
    input_stream: IO[str],
    output_stream: IO[str],
) -> int:
    """Interactive answering loop; persists after every answer.

    Accepts y/n for binary questions, 0..4 for level questions, and q to
    quit. The session file is created when missing and resumed otherwise.
    """
    path = Path(session_path)
    if path.exists():
        session = load_session_file(path, catalog)
    else:
        session = new_session(catalog)
        save_session_file(session, path)

    def say(text: str = "") -> None:
        output_stream.write(text + "\n")
        output_stream.flush()

    def ask(prompt: str) -> str | None:
        output_stream.write(prompt)
        output_stream.flush()
        line = input_stream.readline()
        if line == "":
            return None
        return line.strip()

    done = completeness(session)
    say(f"Resuming session {session.id}: {done['answered']}/{done['total']} answered.")
    while True:
        step = next_unanswered(session)
        if step is None:
            done = completeness(session)
            say(f"All {done['total']} questions answered. Run `assess report` for scores.")
            return EXIT_OK
        say()
        say(f"[{step.domain.name} / {step.control.id} {step.control.title}]")
        if step.control.statement:
            say(f"  {step.control.statement}")
        say(f"  Issue: {step.issue.name}")
        say(f"  {step.question.id}: {step.question.text}")
        if step.question.answer_kind.value == "binary":
            prompt = "  answer [y/n, q to quit] > "
        else:
            scale = ", ".join(f"{i}={label}" for i, label in enumerate(LEVEL_LABELS))
            prompt = f"  answer [0-4 ({scale}), q to quit] > "
        while True:
            raw = ask(prompt)
            if raw is None or raw.lower() == "q":
                done = completeness(session)
                say(f"Saved {done['answered']}/{done['total']} answers to {session_path}.")
                return EXIT_OK
            value = _parse_wizard_answer(raw, step.question.answer_kind.value)
            if value is None:
                if step.question.answer_kind.value == "binary":
                    say("  please answer y or n")
                else:
                    say("  please answer with a level between 0 and 4")
                continue
            break
        note = ask("  note (enter to skip) > ")
        record_answer(session, step.question.id, value, note=note or None)
        save_session_file(session, path)
        done = completeness(session)
        say(f"  recorded ({done['answered']}/{done['total']})")


def _parse_wizard_answer(raw: str, kind: str) -> AnswerValue | None:
    raw = raw.strip().lower()
    if kind == "binary":
        if raw in ("y", "yes"):
            return AnswerValue.yes()
        if raw in ("n", "no"):
            return AnswerValue.no()
        return None
    if raw.isdigit() and 0 <= int(raw) <= 4:
        return AnswerValue.level(int(raw))
    return None


def _cmd_assess_wizard(args) -> int:
    if not sys.stdin.isatty():
        print("assess wizard needs an interactive terminal", file=sys.stderr)
        return EXIT_USAGE
    catalog = _load_catalog(None)
    return run_wizard(args.file, catalog, input_stream=sys.stdin, output_stream=sys.stdout)


def _cmd_serve(args) -> int:
    from .service import ServiceState, make_server

    catalog = _load_catalog(None)
    state = ServiceState(catalog, args.session_dir)
    server = make_server(state, args.port)
    host, port = server.server_address[:2]
    print(f"serving on http://{host}:{port} (sessions in {args.session_dir})", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


# -- parser wiring -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stope-gauge",
        description="ISO 27001 essential-control self-assessment over the five STOPE domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_catalog = sub.add_parser("catalog", help="catalog inspection and validation")
    catalog_sub = p_catalog.add_subparsers(dest="subcommand", required=True)
    p = catalog_sub.add_parser("validate", help="check a catalog file for findings")
    p.add_argument("file", nargs="?", default=None)
    p.set_defaults(handler=_cmd_catalog_validate)
    p = catalog_sub.add_parser("show", help="print the catalog tree")
    p.add_argument("file", nargs="?", default=None)
    p.add_argument("--domain", default=None)
    p.set_defaults(handler=_cmd_catalog_show)
    p = catalog_sub.add_parser("export-builtin", help="print the built-in seed catalog")
    p.set_defaults(handler=_cmd_catalog_export_builtin)

    p_assess = sub.add_parser("assess", help="session workflow")
    assess_sub = p_assess.add_subparsers(dest="subcommand", required=True)
    p = assess_sub.add_parser("new", help="create an empty session file")
    p.add_argument("--out", required=True)
    p.add_argument("--catalog", default=None)
    p.set_defaults(handler=_cmd_assess_new)
    p = assess_sub.add_parser("answer", help="record one answer")
    p.add_argument("file")
    p.add_argument("--question", required=True)
    p.add_argument("--value", required=True)
    p.add_argument("--note", default=None)
    p.set_defaults(handler=_cmd_assess_answer)
    p = assess_sub.add_parser("wizard", help="interactive answering loop")
    p.add_argument("file")
    p.set_defaults(handler=_cmd_assess_wizard)
    p = assess_sub.add_parser("report", help="score the session")
    p.add_argument("file")
    p.add_argument("--format", choices=("json", "md"), default="md")
    p.add_argument("--mode", choices=("over-answered", "strict"), default="over-answered")
    p.add_argument("--weights", default=None)
    p.add_argument("--gaps", type=int, default=None)
    p.set_defaults(handler=_cmd_assess_report)
    p = assess_sub.add_parser("whatif", help="score deltas under hypothetical answers")
    p.add_argument("file")
    p.add_argument("--set", required=True)
    p.add_argument("--mode", choices=("over-answered", "strict"), default="over-answered")
    p.add_argument("--weights", default=None)
    p.set_defaults(handler=_cmd_assess_whatif)

    p = sub.add_parser("serve", help="run the local HTTP API")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--session-dir", default="sessions")
    p.set_defaults(handler=_cmd_serve)
    return parser


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "port", None) is not None and args.command == "serve":
        if not 1 <= args.port <= 65535:
            print("port must be in 1..65535", file=sys.stderr)
            return EXIT_USAGE
    try:
        return args.handler(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _IO_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())
