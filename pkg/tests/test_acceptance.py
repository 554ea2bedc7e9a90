"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Property rounds use a seeded local generator (500 cases per property) so the
whole suite is deterministic and fits its time budgets.
"""

from __future__ import annotations

import json
import random
import subprocess
import sys
import threading
import time
from collections import Counter
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from pathlib import Path

import httpx
import pytest

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
    parse_catalog,
    render_catalog,
)
from stope_gauge.scoring import ScoreMode, WeightScheme, gap_analysis, score_session
from stope_gauge.seed import builtin_clause_profile, builtin_seed_catalog
from stope_gauge.service import ServiceState, make_server
from stope_gauge.session import (
    AnswerValue,
    load_session,
    load_session_file,
    new_session,
    record_answer,
    save_session,
    save_session_file,
)

from test_scoring import _brute_force_top

GOLDEN = json.loads((Path(__file__).parent / "data" / "seed_golden.json").read_text())
BASE = datetime(2026, 1, 1, tzinfo=timezone.utc)


class _Budget:
    def __init__(self, name: str, seconds: float):
        self.name = name
        self.seconds = seconds

    def __enter__(self):
        self.start = time.monotonic()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.monotonic() - self.start
        status = "PASS" if exc_type is None else "FAIL"
        print(f"[acceptance] {self.name}: {status} ({elapsed:.2f}s)")
        if exc_type is None:
            assert elapsed < self.seconds, f"{self.name} exceeded its {self.seconds}s budget"
        return False


# -- seeded local generators ---------------------------------------------------


def _random_catalog(rng: random.Random, flat: bool = False) -> Catalog:
    names = list(STOPE_DOMAINS)
    rng.shuffle(names)
    counter = 0
    domains = []
    for d in range(rng.randint(1, 3)):
        controls = []
        for c in range(1 if flat else rng.randint(1, 2)):
            issues = []
            for i in range(1 if flat else rng.randint(1, 3)):
                questions = []
                for _ in range(rng.randint(1, 3)):
                    counter += 1
                    questions.append(
                        Question(
                            id=f"q{counter}",
                            text=f"Question {counter}?",
                            status=rng.choice(list(Status)),
                            answer_kind=rng.choice(list(AnswerKind)),
                        )
                    )
                issues.append(AssessmentIssue(name=f"issue-{i + 1}", questions=tuple(questions)))
            controls.append(
                Control(
                    id=f"{d + 1}.{c + 1}.{rng.randint(1, 99)}",
                    title=f"Control {d + 1}.{c + 1}",
                    statement="Something should be controlled.",
                    tier=rng.choice(list(Tier)),
                    issues=tuple(issues),
                )
            )
        domains.append(
            Domain(
                name=names[d],
                controls=tuple(controls),
                clause_numbers=tuple(rng.sample(range(1, 15), rng.randint(0, 2))),
                declared_objectives=rng.choice([None, rng.randint(0, 30)]),
                declared_controls=rng.choice([None, rng.randint(len(controls), 60)]),
            )
        )
    return Catalog(
        id=f"cat-{rng.randint(1, 9999)}",
        version="1.0",
        domains=tuple(domains),
    )


def _value_for(kind: AnswerKind, rng: random.Random) -> AnswerValue:
    if kind is AnswerKind.BINARY:
        return AnswerValue.yes() if rng.random() < 0.5 else AnswerValue.no()
    return AnswerValue.level(rng.randrange(5))


def _random_session(rng: random.Random, catalog: Catalog, fill: float | None = None):
    session = new_session(catalog, at=BASE)
    threshold = rng.random() if fill is None else fill
    tick = 0
    for path in iter_question_paths(catalog):
        if rng.random() < threshold:
            tick += 1
            record_answer(
                session,
                path.question.id,
                _value_for(path.question.answer_kind, rng),
                note=rng.choice([None, f"note {tick}"]),
                at=BASE + timedelta(seconds=tick),
            )
    return session


def _paths_by_id(catalog: Catalog) -> dict:
    return {p.question.id: p for p in iter_question_paths(catalog)}


# -- criteria ------------------------------------------------------------------


def test_acceptance_seed_fidelity():
    with _Budget("seed fidelity", 1.0):
        catalog = builtin_seed_catalog()
        paths = list(iter_question_paths(catalog))
        assert len(catalog.domains) == 2
        controls = [c for d in catalog.domains for c in d.controls]
        assert len(controls) == 6
        assert all(c.tier is Tier.ESSENTIAL for c in controls)
        assert len(paths) == 51
        assert dict(Counter(p.control.id for p in paths)) == {
            "5.1.1": 7,
            "12.2.1": 8,
            "12.2.4": 8,
            "12.2.2": 12,
            "12.2.3": 6,
            "12.6.1": 10,
        }
        assert dict(Counter(p.question.status.value for p in paths)) == {
            "approved": 45,
            "modified": 3,
            "added": 3,
        }
        # answer kinds row-for-row against the goldened table fixture
        golden_rows = {
            control["id"]: [tuple(row) for row in control["rows"]]
            for domain in GOLDEN["domains"]
            for control in domain["controls"]
        }
        for control in controls:
            actual = [
                (issue.name, q.text, q.status.value, q.answer_kind.value)
                for issue in control.issues
                for q in issue.questions
            ]
            assert actual == golden_rows[control.id], control.id


def test_acceptance_profile_fidelity():
    with _Budget("profile fidelity", 1.0):
        profile = builtin_clause_profile()
        assert len(profile.entries) == 11
        assert sum(e.essential_controls for e in profile.entries) == 21
        assert profile.total_essential == 21
        assert profile.total_controls == 132
        assert profile.total_elements == 246


def test_acceptance_round_trips():
    with _Budget("round trips (500 catalogs, 500 sessions)", 30.0):
        seed = builtin_seed_catalog()
        assert parse_catalog(render_catalog(seed)) == seed
        rng = random.Random(1001)
        for _ in range(500):
            catalog = _random_catalog(rng)
            assert parse_catalog(render_catalog(catalog)) == catalog
        rng = random.Random(1002)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog)
            assert load_session(save_session(session), catalog) == session


def test_acceptance_scoring_properties():
    with _Budget("scoring properties (5 x 500 cases + oracle)", 60.0):
        # boundedness
        rng = random.Random(2001)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog)
            report = score_session(session, WeightScheme.equal(rng.choice(list(ScoreMode))))
            for node in (
                report.overall,
                *report.per_domain.values(),
                *report.per_control.values(),
                *report.per_issue.values(),
            ):
                assert 0.0 <= node.coverage <= 1.0
                assert node.score is None or 0.0 <= node.score <= 1.0

        # strict-zero monotonicity
        rng = random.Random(2002)
        strict = WeightScheme.equal(ScoreMode.STRICT_ZERO)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog)
            paths = _paths_by_id(catalog)
            qid = rng.choice(sorted(paths))
            path = paths[qid]
            answer = session.answers.get(qid)
            current = Fraction(0)
            if answer is not None:
                value = answer.value
                current = (
                    Fraction(1 if value.binary_value else 0)
                    if value.kind is AnswerKind.BINARY
                    else Fraction(value.level_value, 4)
                )
            if current == 1:
                continue
            before = score_session(session, strict)
            if path.question.answer_kind is AnswerKind.BINARY:
                higher = AnswerValue.yes()
            else:
                higher = AnswerValue.level(rng.randint(int(current * 4) + 1, 4))
            record_answer(session, qid, higher)
            after = score_session(session, strict)
            key = (path.control.id, path.issue.name)
            assert after.per_issue[key].score >= before.per_issue[key].score
            assert after.per_control[path.control.id].score >= before.per_control[path.control.id].score
            assert after.per_domain[path.domain.name].score >= before.per_domain[path.domain.name].score
            assert after.overall.score >= before.overall.score
            for other, node in before.per_control.items():
                if other != path.control.id:
                    assert after.per_control[other] == node

        # permutation invariance
        rng = random.Random(2003)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog)
            shuffled = new_session(catalog, at=BASE)
            order = list(session.answers.values())
            rng.shuffle(order)
            for answer in order:
                record_answer(shuffled, answer.question_id, answer.value, note=answer.note)
            for mode in ScoreMode:
                scheme = WeightScheme.equal(mode)
                assert score_session(shuffled, scheme) == score_session(session, scheme)

        # weight-scaling invariance
        rng = random.Random(2004)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog)
            base = {name: Fraction(rng.randint(1, 9)) for name in STOPE_DOMAINS}
            factor = rng.randint(1, 1000)
            mode = rng.choice(list(ScoreMode))
            a = score_session(session, WeightScheme(base, mode=mode))
            b = score_session(
                session, WeightScheme({k: v * factor for k, v in base.items()}, mode=mode)
            )
            assert a == b

        # full-coverage mode agreement
        rng = random.Random(2005)
        for _ in range(500):
            catalog = _random_catalog(rng)
            session = _random_session(rng, catalog, fill=1.1)  # everything answered
            over = score_session(session, WeightScheme.equal(ScoreMode.OVER_ANSWERED))
            strict_report = score_session(session, WeightScheme.equal(ScoreMode.STRICT_ZERO))
            assert over.overall == strict_report.overall
            assert over.per_domain == strict_report.per_domain
            assert over.per_control == strict_report.per_control
            assert over.per_issue == strict_report.per_issue

        # flat-vs-hierarchical oracle equivalence on degenerate catalogs
        rng = random.Random(2006)
        for _ in range(500):
            catalog = _random_catalog(rng, flat=True)
            session = _random_session(rng, catalog)
            report = score_session(session, WeightScheme.equal(ScoreMode.STRICT_ZERO))
            weights = {d.name: Fraction(1, len(catalog.domains)) for d in catalog.domains}
            flat_total = Fraction(0)
            for domain in catalog.domains:
                questions = [q for c in domain.controls for i in c.issues for q in i.questions]
                acc = Fraction(0)
                for q in questions:
                    answer = session.answers.get(q.id)
                    if answer is not None:
                        acc += (
                            Fraction(1 if answer.value.binary_value else 0)
                            if answer.value.kind is AnswerKind.BINARY
                            else Fraction(answer.value.level_value, 4)
                        )
                flat_total += weights[domain.name] * (acc / len(questions))
            assert report.overall.score == pytest.approx(float(flat_total), abs=1e-12)


def test_acceptance_gap_oracle():
    with _Budget("gap oracle (100 randomized trials)", 60.0):
        catalog = builtin_seed_catalog()
        rng = random.Random(3001)
        for trial in range(100):
            session = _random_session(rng, catalog)
            scheme = WeightScheme.equal(rng.choice(list(ScoreMode)))
            values = {qid: a.value for qid, a in session.answers.items()}
            expected_gain, _, expected_qid = _brute_force_top(catalog, values, scheme)
            top = gap_analysis(session, scheme, 1)[0]
            assert top.question_id == expected_qid, f"trial {trial}"
            assert top.potential_gain == pytest.approx(float(expected_gain), abs=1e-12)
            assert top.rank == 1


def test_acceptance_cli_contract(tmp_path, monkeypatch):
    with _Budget("cli contract", 60.0):
        def cli(*args: str, expect: int = 0) -> subprocess.CompletedProcess:
            result = subprocess.run(
                [sys.executable, "-m", "stope_gauge", *args],
                capture_output=True,
                text=True,
                cwd=tmp_path,
            )
            assert result.returncode == expect, (args, result.stderr)
            return result

        session_path = tmp_path / "audit.json"
        out = cli("catalog", "validate")
        assert "0 errors" in out.stdout
        cli("assess", "new", "--out", str(session_path))
        cli("assess", "answer", str(session_path), "--question", "5.1.1.1.1", "--value", "yes")
        cli("assess", "answer", str(session_path), "--question", "5.1.1.2.1", "--value", "no")
        cli("assess", "answer", str(session_path), "--question", "5.1.1.3.1", "--value", "3",
            "--note", "published on the portal")
        # documented failure classes
        cli("assess", "answer", str(session_path), "--question", "5.1.1.4.1", "--value", "yes",
            expect=2)  # kind mismatch: level question
        cli("assess", "answer", str(session_path), "--question", "nope", "--value", "yes", expect=2)
        cli("assess", "report", str(tmp_path / "missing.json"), expect=3)
        cli("frobnicate", expect=2)

        report_json = cli("assess", "report", str(session_path), "--format", "json")
        doc = json.loads(report_json.stdout)
        assert doc["session"]["completeness"]["answered"] == 3
        assert doc["mode"] == "over-answered"
        report_md = cli("assess", "report", str(session_path), "--format", "md")
        assert "| Assessment Issue | Question | Status | Answer | Score |" in report_md.stdout

        whatif = cli("assess", "whatif", str(session_path), "--set", "5.1.1.2.1=yes")
        delta_doc = json.loads(whatif.stdout)
        assert "delta_overall" in delta_doc

        strict = cli("assess", "report", str(session_path), "--format", "json", "--mode", "strict")
        strict_doc = json.loads(strict.stdout)
        assert strict_doc["mode"] == "strict"
        assert strict_doc["overall"]["score"] is not None

        # session file survives a simulated interrupt mid-write
        import os as os_module

        from stope_gauge.session import record_answer as record

        catalog = builtin_seed_catalog()
        session = load_session_file(session_path, catalog)
        before_bytes = session_path.read_bytes()
        record(session, "12.2.3.1.1", AnswerValue.level(2))
        monkeypatch.setattr(os_module, "replace", lambda src, dst: (_ for _ in ()).throw(OSError("boom")))
        with pytest.raises(OSError):
            save_session_file(session, session_path)
        monkeypatch.undo()
        assert session_path.read_bytes() == before_bytes
        reloaded = load_session_file(session_path, catalog)
        assert len(reloaded.answers) == 3


def test_acceptance_service_contract(tmp_path):
    with _Budget("service contract", 60.0):
        session_dir = tmp_path / "sessions"
        state = ServiceState(builtin_seed_catalog(), session_dir)
        server = make_server(state, 0)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{server.server_address[1]}"
        with httpx.Client(base_url=base, timeout=10.0) as client:
            created = client.post("/api/sessions")
            assert created.status_code == 201
            sid = created.json()["id"]
            assert client.get(f"/api/sessions/{sid}").json()["answers"] == []

            answered = client.put(f"/api/sessions/{sid}/answers/5.1.1.1.1", json={"value": "yes"})
            assert answered.status_code == 200

            mismatch = client.put(f"/api/sessions/{sid}/answers/5.1.1.3.1", json={"value": "yes"})
            assert mismatch.status_code == 409
            assert mismatch.json()["error"]["code"] == "kind-mismatch"

            out_of_range = client.put(f"/api/sessions/{sid}/answers/5.1.1.3.1", json={"value": 9})
            assert out_of_range.status_code == 422
            assert out_of_range.json()["error"]["code"] == "level-range"

            report = client.get(f"/api/sessions/{sid}/report", params={"mode": "strict", "gaps": 3})
            assert report.status_code == 200
            report_doc = report.json()
            assert report_doc["overall"]["score"] is not None
            assert len(report_doc["gaps"]) == 3

            identity = client.post(f"/api/sessions/{sid}/whatif", json={"overrides": {}})
            assert identity.status_code == 200
            assert identity.json()["delta_overall"] == 0.0
        server.shutdown()
        server.server_close()
        thread.join(timeout=5)

        # restart on the same session directory: mutations survived
        state2 = ServiceState(builtin_seed_catalog(), session_dir)
        server2 = make_server(state2, 0)
        thread2 = threading.Thread(target=server2.serve_forever, daemon=True)
        thread2.start()
        base2 = f"http://127.0.0.1:{server2.server_address[1]}"
        with httpx.Client(base_url=base2, timeout=10.0) as client:
            doc = client.get(f"/api/sessions/{sid}").json()
            assert {a["question_id"]: a["value"] for a in doc["answers"]} == {"5.1.1.1.1": "yes"}
        server2.shutdown()
        server2.server_close()
        thread2.join(timeout=5)
