"""Local HTTP API for the companion UI.

One immutable catalog per process; sessions live as JSON files in a session
directory and every mutation is persisted before the response goes out.
Writes to one session are serialized behind a per-session lock; requests to
different sessions proceed in parallel. Binds loopback only by default (desk
tool, no auth). Error bodies are {"error": {"code", "message"}}.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .catalog import Catalog, catalog_digest, catalog_to_obj, render_catalog
from .errors import (
    DigestMismatchError,
    KindMismatchError,
    LevelRangeError,
    NotAnsweredError,
    SessionLoadError,
    StopeGaugeError,
    UnknownQuestionError,
)
from .report import radar_data, report_to_dict
from .scoring import (
    ScoreMode,
    WeightScheme,
    gap_analysis,
    parse_weights_spec,
    score_session,
    what_if,
)
from .session import (
    AnswerValue,
    Session,
    clear_answer,
    completeness,
    load_session_file,
    new_session,
    next_unanswered,
    record_answer,
    save_session,
    save_session_file,
)

_SESSION_ID_RE = re.compile(r"^[A-Za-z0-9-]+$")


class ApiError(StopeGaugeError):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class ServiceState:
    """Shared server state: the catalog, the session store, and locks."""

    def __init__(self, catalog: Catalog, session_dir: str | Path):
        self.catalog = catalog
        self.catalog_text = render_catalog(catalog)
        self.digest = catalog_digest(catalog)
        self.session_dir = Path(session_dir)
        self.session_dir.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._mutex = threading.Lock()

    def lock_for(self, session_id: str) -> threading.RLock:
        with self._mutex:
            if session_id not in self._locks:
                self._locks[session_id] = threading.RLock()
            return self._locks[session_id]

    def _path(self, session_id: str) -> Path:
        return self.session_dir / f"{session_id}.json"

    def create_session(self) -> Session:
        session = new_session(self.catalog)
        with self.lock_for(session.id):
            save_session_file(session, self._path(session.id))
            with self._mutex:
                self._sessions[session.id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        if not _SESSION_ID_RE.match(session_id):
            raise ApiError(404, "unknown-session", f"no session {session_id!r}")
        with self._mutex:
            session = self._sessions.get(session_id)
        if session is not None:
            return session
        path = self._path(session_id)
        if not path.exists():
            raise ApiError(404, "unknown-session", f"no session {session_id!r}")
        try:
            session = load_session_file(path, self.catalog)
        except DigestMismatchError as exc:
            raise ApiError(409, "digest-mismatch", str(exc)) from None
        except SessionLoadError as exc:
            raise ApiError(500, "session-unreadable", str(exc)) from None
        with self._mutex:
            self._sessions[session_id] = session
        return session

    def persist(self, session: Session) -> None:
        save_session_file(session, self._path(session.id))

    def list_ids(self) -> list[str]:
        return sorted(p.stem for p in self.session_dir.glob("*.json"))


def _session_doc(session: Session) -> dict:
    return json.loads(save_session(session))


def _scheme_from_params(params: dict) -> WeightScheme:
    raw_mode = params.get("mode", [ScoreMode.OVER_ANSWERED.value])[0]
    if not isinstance(raw_mode, str):
        raise ApiError(400, "bad-request", "'mode' must be a string")
    try:
        mode = ScoreMode(raw_mode)
    except ValueError:
        raise ApiError(400, "bad-request", f"unknown mode {raw_mode!r}") from None
    raw_weights = params.get("weights", [None])[0]
    if raw_weights is None:
        return WeightScheme.equal(mode)
    if not isinstance(raw_weights, str):
        raise ApiError(400, "bad-request", "'weights' must be a string")
    try:
        return WeightScheme(parse_weights_spec(raw_weights), mode=mode)
    except ValueError as exc:
        raise ApiError(400, "bad-request", str(exc)) from None


def _decode_answer_value(raw: object) -> AnswerValue:
    try:
        return AnswerValue.from_wire(raw)
    except LevelRangeError as exc:
        raise ApiError(422, "level-range", str(exc)) from None
    except ValueError as exc:
        raise ApiError(400, "bad-request", str(exc)) from None


class _Handler(BaseHTTPRequestHandler):
    state: ServiceState  # set by make_server
    protocol_version = "HTTP/1.1"
    quiet = True

    # ordinary request logging is noise for a desk tool; errors still surface
    def log_message(self, format: str, *args) -> None:
        if not self.quiet:
            super().log_message(format, *args)

    # -- plumbing --

    def _send(self, status: int, body: bytes, content_type: str = "application/json") -> None:
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, PUT, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _send_json(self, status: int, obj: object) -> None:
        self._send(status, (json.dumps(obj, ensure_ascii=False, indent=2) + "\n").encode("utf-8"))

    def _send_error_body(self, status: int, code: str, message: str) -> None:
        self._send_json(status, {"error": {"code": code, "message": message}})

    def _read_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        if length > 1_000_000:
            raise ApiError(400, "bad-request", "request body too large")
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise ApiError(400, "bad-request", "missing request body")
        try:
            doc = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ApiError(400, "bad-request", f"malformed JSON body: {exc}") from None
        if not isinstance(doc, dict):
            raise ApiError(400, "bad-request", "request body must be a JSON object")
        return doc

    def _dispatch(self, method: str) -> None:
        split = urlsplit(self.path)
        path = split.path
        params = parse_qs(split.query)
        try:
            handled = self._route(method, path, params)
        except ApiError as exc:
            self._send_error_body(exc.status, exc.code, exc.message)
            return
        except UnknownQuestionError as exc:
            self._send_error_body(404, "unknown-question", str(exc))
            return
        except NotAnsweredError as exc:
            self._send_error_body(404, "not-answered", str(exc))
            return
        except KindMismatchError as exc:
            self._send_error_body(409, "kind-mismatch", str(exc))
            return
        except DigestMismatchError as exc:
            self._send_error_body(409, "digest-mismatch", str(exc))
            return
        except LevelRangeError as exc:
            self._send_error_body(422, "level-range", str(exc))
            return
        except Exception as exc:  # pragma: no cover - last-resort guard
            self._send_error_body(500, "internal", f"{type(exc).__name__}: {exc}")
            return
        if not handled:
            self._send_error_body(404, "not-found", f"no route for {method} {path}")

    def do_GET(self) -> None:
        self._dispatch("GET")

    def do_POST(self) -> None:
        self._dispatch("POST")

    def do_PUT(self) -> None:
        self._dispatch("PUT")

    def do_DELETE(self) -> None:
        self._dispatch("DELETE")

    def do_OPTIONS(self) -> None:
        self._send(204, b"")

    # -- routes --

    def _route(self, method: str, path: str, params: dict) -> bool:
        state = self.state
        if path == "/api/catalog" and method == "GET":
            self._send(200, state.catalog_text.encode("utf-8"))
            return True
        if path == "/api/profile" and method == "GET":
            self._send_json(200, catalog_to_obj(state.catalog)["profile"])
            return True
        if path == "/api/sessions" and method == "POST":
            session = state.create_session()
            self._send_json(201, _session_doc(session))
            return True
        if path == "/api/sessions" and method == "GET":
            listing = []
            for sid in state.list_ids():
                with state.lock_for(sid):
                    try:
                        session = state.get_session(sid)
                    except ApiError as exc:
                        listing.append({"id": sid, "error": exc.code})
                        continue
                    done = completeness(session)
                    listing.append(
                        {
                            "id": sid,
                            "created_at": session.created_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
                            "answered": done["answered"],
                            "total": done["total"],
                        }
                    )
            self._send_json(200, listing)
            return True

        match = re.match(r"^/api/sessions/([^/]+)$", path)
        if match and method == "GET":
            session_id = match.group(1)
            with state.lock_for(session_id):
                doc = _session_doc(state.get_session(session_id))
            self._send_json(200, doc)
            return True

        match = re.match(r"^/api/sessions/([^/]+)/answers/([^/]+)$", path)
        if match:
            session_id, question_id = match.group(1), match.group(2)
            if method == "PUT":
                body = self._read_body()
                unknown = set(body) - {"value", "note"}
                if unknown:
                    raise ApiError(400, "bad-request", f"unknown field {sorted(unknown)[0]!r}")
                if "value" not in body:
                    raise ApiError(400, "bad-request", "missing field 'value'")
                note = body.get("note")
                if note is not None and not isinstance(note, str):
                    raise ApiError(400, "bad-request", "'note' must be a string")
                value = _decode_answer_value(body["value"])
                with state.lock_for(session_id):
                    session = state.get_session(session_id)
                    record_answer(session, question_id, value, note=note)
                    state.persist(session)
                    answer = session.answers[question_id]
                self._send_json(
                    200,
                    {
                        "question_id": question_id,
                        "kind": answer.value.kind.value,
                        "value": answer.value.to_wire(),
                        "note": answer.note,
                        "answered_at": answer.answered_at.strftime("%Y-%m-%dT%H:%M:%SZ"),
                    },
                )
                return True
            if method == "DELETE":
                with state.lock_for(session_id):
                    session = state.get_session(session_id)
                    clear_answer(session, question_id)
                    state.persist(session)
                self._send(204, b"")
                return True
            return False

        match = re.match(r"^/api/sessions/([^/]+)/next$", path)
        if match and method == "GET":
            session_id = match.group(1)
            with state.lock_for(session_id):
                session = state.get_session(session_id)
                step = next_unanswered(session)
                question = None
                if step is not None:
                    question = {
                        "id": step.question.id,
                        "text": step.question.text,
                        "status": step.question.status.value,
                        "answer_kind": step.question.answer_kind.value,
                        "issue": step.issue.name,
                        "control_id": step.control.id,
                        "control_title": step.control.title,
                        "control_statement": step.control.statement,
                        "domain": step.domain.name,
                    }
                body = {
                    "done": step is None,
                    "question": question,
                    "completeness": completeness(session),
                }
            self._send_json(200, body)
            return True

        match = re.match(r"^/api/sessions/([^/]+)/report$", path)
        if match and method == "GET":
            session_id = match.group(1)
            scheme = _scheme_from_params(params)
            gaps_raw = params.get("gaps", [None])[0]
            top_k = None
            if gaps_raw is not None:
                try:
                    top_k = int(gaps_raw)
                except ValueError:
                    raise ApiError(400, "bad-request", f"bad gaps count {gaps_raw!r}") from None
                if top_k < 1:
                    raise ApiError(400, "bad-request", "gaps count must be at least 1")
            with state.lock_for(session_id):
                session = state.get_session(session_id)
                gaps = gap_analysis(session, scheme, top_k) if top_k is not None else None
                report = score_session(session, scheme)
                body = report_to_dict(report, session, gaps)
            self._send_json(200, body)
            return True

        match = re.match(r"^/api/sessions/([^/]+)/whatif$", path)
        if match and method == "POST":
            session_id = match.group(1)
            body = self._read_body()
            unknown = set(body) - {"overrides", "mode", "weights"}
            if unknown:
                raise ApiError(400, "bad-request", f"unknown field {sorted(unknown)[0]!r}")
            overrides_raw = body.get("overrides")
            if not isinstance(overrides_raw, dict):
                raise ApiError(400, "bad-request", "'overrides' must be an object")
            overrides = {
                qid: _decode_answer_value(value) for qid, value in overrides_raw.items()
            }
            mode_params = {}
            if "mode" in body:
                mode_params["mode"] = [body["mode"]]
            if "weights" in body:
                mode_params["weights"] = [body["weights"]]
            scheme = _scheme_from_params(mode_params)
            with state.lock_for(session_id):
                session = state.get_session(session_id)
                delta = what_if(session, overrides, scheme)
                per_domain_delta = {
                    name: (delta.after.per_domain[name].score or 0.0)
                    - (delta.before.per_domain[name].score or 0.0)
                    for name in delta.before.per_domain
                }
                response = {
                    "delta_overall": delta.delta_overall,
                    "delta_per_domain": per_domain_delta,
                    "before": report_to_dict(delta.before, session),
                    "after": report_to_dict(delta.after, session),
                }
            self._send_json(200, response)
            return True

        match = re.match(r"^/api/sessions/([^/]+)/radar$", path)
        if match and method == "GET":
            session_id = match.group(1)
            scheme = _scheme_from_params(params)
            with state.lock_for(session_id):
                session = state.get_session(session_id)
                data = radar_data(score_session(session, scheme))
            self._send_json(200, {"axes": list(data.axes), "values": list(data.values)})
            return True
        return False


def make_server(state: ServiceState, port: int, host: str = "127.0.0.1") -> ThreadingHTTPServer:
    """Build the HTTP server (loopback by default); caller runs serve_forever."""
    handler = type("BoundHandler", (_Handler,), {"state": state})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def serve(state: ServiceState, port: int, host: str = "127.0.0.1") -> None:
    server = make_server(state, port, host)
    try:
        server.serve_forever()
    finally:
        server.server_close()
