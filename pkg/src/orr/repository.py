"""File-backed store for templates, assessments, evidence and references.

Layout under one root:

    templates/<name>/<version>.orrt.json   immutable once written
    assessments/<id>/assessment.json       current snapshot
    assessments/<id>/events.log            append-only JSON lines
    evidence/<assessment-id>/<evidence-id> raw artifact bytes
    references/<name>.json                 comparator reference checklists

Writes follow write-temp-then-rename so a crash can never tear a snapshot.
Event lines are appended (and fsynced) before the snapshot commits, so after
a torn save the log may run at most one step ahead of the snapshot; replay
is the recovery story, never the other way round.  Mutations are guarded by
an in-process per-assessment lock plus an optimistic revision check, which
is the single-writer-per-revision contract the domain layer assumes.
"""

from __future__ import annotations

import json
import os
import re
import threading
import uuid
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Iterator

from .assessment import (
    Answer,
    Assessment,
    migrate_answers,
    new_assessment,
    record_answer,
)
from .builtin import builtin_template
from .comparator import (
    ReferenceFramework,
    google_2016_reference,
    serialize_reference,
)
from .errors import (
    NotFound,
    RevisionConflict,
    SchemaError,
    VersionExists,
)
from .template import (
    ChecklistTemplate,
    ReleaseProfile,
    parse_template,
    serialize_template,
    validate_template,
    version_key,
)
from .workflow import Role, WorkflowState, record_signoff, request_transition

_SAFE_ID = re.compile(r"^[a-zA-Z0-9][a-zA-Z0-9_.-]*$")

MUTATING_EVENT_KINDS = frozenset({"answer", "migrated"})


def _check_id(value: str, what: str) -> str:
    if not _SAFE_ID.match(value):
        raise SchemaError(f"{what} {value!r} is not a safe identifier")
    return value


def _write_atomic(path: Path, data: bytes) -> None:
    tmp = path.with_name(f"{path.name}.tmp.{os.getpid()}.{uuid.uuid4().hex[:6]}")
    try:
        with open(tmp, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


class Repository:
    def __init__(self, root: str | Path, seed: bool = True) -> None:
        self.root = Path(root)
        for sub in ("templates", "assessments", "evidence", "references"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._template_guard = threading.Lock()
        if seed:
            self.seed_defaults()

    def seed_defaults(self) -> None:
        """Make sure the stock template, the reference checklist, and the
        worked sample assessment exist."""
        stock = builtin_template()
        if not self._template_path(stock.name, stock.version).exists():
            self.put_template(stock)
        reference = google_2016_reference()
        if not self._reference_path(reference.name).exists():
            self.put_reference(reference)
        from .sample import SAMPLE_ID, sample_assessment

        if not self._assessment_dir(SAMPLE_ID).exists():
            self.save_assessment(sample_assessment(), expected_revision=None)

    @contextmanager
    def lock(self, assessment_id: str) -> Iterator[None]:
        with self._locks_guard:
            lock = self._locks.setdefault(assessment_id, threading.Lock())
        with lock:
            yield

    # --- templates -------------------------------------------------------------

    def _template_path(self, name: str, version: str) -> Path:
        return self.root / "templates" / name / f"{version}.orrt.json"

    def put_template(self, template: ChecklistTemplate) -> None:
        problems = [
            issue
            for issue in validate_template(template)
            if issue.severity == "error"
        ]
        if problems:
            details = "; ".join(f"{i.where}: {i.message}" for i in problems)
            raise SchemaError(f"template does not validate: {details}")
        path = self._template_path(template.name, template.version)
        with self._template_guard:
            if path.exists():
                raise VersionExists(
                    f"template {template.ref} is already stored; versions are immutable"
                )
            path.parent.mkdir(parents=True, exist_ok=True)
            _write_atomic(path, serialize_template(template))

    def ingest_template(self, document: bytes | str | dict) -> ChecklistTemplate:
        template = parse_template(document)
        self.put_template(template)
        return template

    def get_template(self, name: str, version: str) -> ChecklistTemplate:
        path = self._template_path(name, version)
        if not path.exists():
            raise NotFound(f"no template {name}@{version}")
        return parse_template(path.read_bytes())

    def list_templates(self) -> list[tuple[str, str]]:
        out = []
        base = self.root / "templates"
        for name_dir in sorted(base.iterdir()) if base.exists() else []:
            if not name_dir.is_dir():
                continue
            for file in name_dir.glob("*.orrt.json"):
                out.append((name_dir.name, file.name[: -len(".orrt.json")]))
        out.sort(key=lambda pair: (pair[0], version_key(pair[1])))
        return out

    def latest_version(self, name: str) -> str:
        versions = [v for n, v in self.list_templates() if n == name]
        if not versions:
            raise NotFound(f"no template named {name!r}")
        return versions[-1]

    def resolve_template(self, ref: str) -> ChecklistTemplate:
        """Accept "name" (latest version) or "name@version"."""
        if "@" in ref:
            name, version = ref.split("@", 1)
        else:
            name, version = ref, self.latest_version(ref)
        return self.get_template(name, version)

    # --- references ------------------------------------------------------------

    def _reference_path(self, name: str) -> Path:
        return self.root / "references" / f"{name}.json"

    def put_reference(self, framework: ReferenceFramework) -> None:
        _check_id(framework.name, "reference name")
        _write_atomic(
            self._reference_path(framework.name), serialize_reference(framework)
        )

    def get_reference(self, name: str) -> ReferenceFramework:
        path = self._reference_path(name)
        if not path.exists():
            raise NotFound(f"no reference checklist {name!r}")
        try:
            doc = json.loads(path.read_bytes())
        except json.JSONDecodeError as exc:
            raise SchemaError(f"reference {name!r} is not valid JSON: {exc}") from exc
        return ReferenceFramework.from_doc(doc)

    def list_references(self) -> list[str]:
        base = self.root / "references"
        return sorted(p.name[: -len(".json")] for p in base.glob("*.json"))

    # --- assessments -------------------------------------------------------------

    def _assessment_dir(self, assessment_id: str) -> Path:
        return self.root / "assessments" / assessment_id

    def _snapshot_path(self, assessment_id: str) -> Path:
        return self._assessment_dir(assessment_id) / "assessment.json"

    def _events_path(self, assessment_id: str) -> Path:
        return self._assessment_dir(assessment_id) / "events.log"

    def create_assessment(
        self,
        template: ChecklistTemplate,
        profile: ReleaseProfile,
        assessment_id: str | None = None,
    ) -> Assessment:
        assessment_id = _check_id(
            assessment_id or f"orr-{uuid.uuid4().hex[:12]}", "assessment id"
        )
        # The template must be the stored copy, not a lookalike.
        stored = self.get_template(template.name, template.version)
        if stored != template:
            raise SchemaError(
                f"template {template.ref} differs from the stored version"
            )
        assessment = new_assessment(assessment_id, template, profile)
        return self.save_assessment(assessment, expected_revision=None)

    def save_assessment(
        self, assessment: Assessment, expected_revision: int | None
    ) -> Assessment:
        """Persist a snapshot plus its pending events and evidence.

        ``expected_revision`` is the revision the caller loaded before
        mutating (None for a brand new assessment).  A mismatch with the
        stored snapshot means someone else committed first: RevisionConflict,
        nothing written.
        """
        with self.lock(assessment.id):
            snapshot = self._snapshot_path(assessment.id)
            if expected_revision is None:
                if snapshot.exists():
                    raise RevisionConflict(0, self._stored_revision(assessment.id))
            else:
                stored = self._stored_revision(assessment.id)
                if stored != expected_revision:
                    raise RevisionConflict(expected_revision, stored)
            self._assessment_dir(assessment.id).mkdir(parents=True, exist_ok=True)
            for evidence_id, content in assessment.evidence_pending:
                self.store_evidence(assessment.id, evidence_id, content)
            if assessment.events_pending:
                self._append_events(assessment.id, assessment.events_pending)
            _write_atomic(
                snapshot,
                (
                    json.dumps(assessment.to_doc(), indent=2, ensure_ascii=False)
                    + "\n"
                ).encode("utf-8"),
            )
            return assessment.drained()

    def _stored_revision(self, assessment_id: str) -> int:
        path = self._snapshot_path(assessment_id)
        if not path.exists():
            raise NotFound(f"no assessment {assessment_id!r}")
        try:
            doc = json.loads(path.read_bytes())
        except json.JSONDecodeError as exc:
            raise SchemaError(
                f"assessment snapshot {assessment_id!r} is corrupt: {exc}"
            ) from exc
        return int(doc.get("revision", 0))

    def load_assessment(self, assessment_id: str) -> Assessment:
        path = self._snapshot_path(assessment_id)
        if not path.exists():
            raise NotFound(f"no assessment {assessment_id!r}")
        try:
            doc = json.loads(path.read_bytes())
        except json.JSONDecodeError as exc:
            raise SchemaError(
                f"assessment snapshot {assessment_id!r} is corrupt: {exc}"
            ) from exc
        ref = doc.get("template", {})
        template = self.get_template(str(ref.get("name")), str(ref.get("version")))
        return Assessment.from_doc(doc, template)

    def list_assessments(self) -> list[str]:
        base = self.root / "assessments"
        return sorted(
            p.name for p in base.iterdir() if (p / "assessment.json").exists()
        )

    # --- events -------------------------------------------------------------------

    def _append_events(self, assessment_id: str, events: tuple[dict, ...]) -> None:
        path = self._events_path(assessment_id)
        with open(path, "a", encoding="utf-8") as handle:
            for event in events:
                handle.write(json.dumps(event, ensure_ascii=False) + "\n")
            handle.flush()
            os.fsync(handle.fileno())

    def events(self, assessment_id: str) -> list[dict]:
        path = self._events_path(assessment_id)
        if not path.exists():
            raise NotFound(f"no event log for assessment {assessment_id!r}")
        out = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    out.append(json.loads(line))
        return out

    def replay_assessment(self, assessment_id: str) -> Assessment:
        """Rebuild the assessment purely from its event log.

        Every event goes back through the same domain operation that
        produced it, so replay re-enforces every rule and lands, step by
        step, on the exact state the snapshot holds.
        """
        events = self.events(assessment_id)
        if not events or events[0].get("kind") != "created":
            raise SchemaError(
                f"event log for {assessment_id!r} does not start with creation"
            )
        doc = events[0]["assessment"]
        ref = doc.get("template", {})
        template = self.get_template(str(ref.get("name")), str(ref.get("version")))
        assessment = Assessment.from_doc(doc, template)
        for event in events[1:]:
            kind = event.get("kind")
            if kind == "answer":
                assessment = record_answer(
                    assessment, Answer.from_doc(event["answer"])
                )
            elif kind == "signoff":
                assessment = record_signoff(
                    assessment,
                    Role(event["role"]),
                    str(event["actor"]),
                    at=str(event["at"]),
                )
            elif kind == "transition":
                assessment = request_transition(
                    assessment,
                    WorkflowState(event["target"]),
                    str(event["actor"]),
                    Role(event["role"]),
                    reason=str(event.get("reason", "")),
                    at=str(event["at"]),
                )
            elif kind == "probe_error":
                continue
            elif kind == "migrated":
                new_template = self.get_template(
                    assessment.template.name, str(event["version"])
                )
                assessment, _report = migrate_answers(assessment, new_template)
            else:
                raise SchemaError(f"unknown event kind {kind!r} in log")
        return assessment.drained()

    def verify_assessment(self, assessment_id: str) -> bool:
        """Snapshot == replay, and revision == 1 + mutating events."""
        snapshot = self.load_assessment(assessment_id)
        replayed = self.replay_assessment(assessment_id)
        mutations = sum(
            1
            for event in self.events(assessment_id)
            if event.get("kind") in MUTATING_EVENT_KINDS
        )
        return snapshot == replayed and snapshot.revision == 1 + mutations

    # --- evidence -------------------------------------------------------------------

    def store_evidence(
        self, assessment_id: str, evidence_id: str, content: bytes
    ) -> None:
        _check_id(evidence_id, "evidence id")
        directory = self.root / "evidence" / assessment_id
        directory.mkdir(parents=True, exist_ok=True)
        _write_atomic(directory / evidence_id, content)

    def read_evidence(self, assessment_id: str, evidence_id: str) -> bytes:
        _check_id(evidence_id, "evidence id")
        path = self.root / "evidence" / assessment_id / evidence_id
        if not path.exists():
            raise NotFound(
                f"no evidence {evidence_id!r} for assessment {assessment_id!r}"
            )
        return path.read_bytes()
