"""HTTP face of the engine, everything under /api/v1.

Business rules stay in the domain modules; handlers translate between HTTP
and domain calls.  Identity is asserted, not authenticated: callers say who
they are via X-ORR-Actor and what hat they wear via X-ORR-Role, and the
workflow decides whether that hat may do the thing.  Errors come back as
machine-readable JSON ({"error": ..., "detail": ...}) with conflict-style
refusals on 409, role refusals on 403 and validation trouble on 422.
"""

from __future__ import annotations

import base64
import binascii
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Header, Request, Response
from fastapi.responses import HTMLResponse, JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .assessment import (
    Answer,
    CheckpointStatus,
    compute_scorecard,
    new_evidence,
    record_answer,
    run_all_probes,
    run_checkpoint_probe,
    scorecard_to_csv,
    scorecard_to_doc,
)
from .comparator import compare, render_matrix
from .dashboard import build_dashboard, portfolio_rollup, render_dashboard
from .errors import (
    GateNotMet,
    IllegalTransition,
    LockedState,
    NotFound,
    OrrError,
    PredicateSyntaxError,
    RevisionConflict,
    RoleNotPermitted,
    SchemaError,
    StaleSignOff,
    VersionExists,
)
from .repository import Repository
from .template import ReleaseProfile, applicable_set, template_to_doc
from .workflow import Role, WorkflowState, record_signoff, request_transition

API = "/api/v1"

_CONFLICTS = (
    VersionExists,
    RevisionConflict,
    LockedState,
    IllegalTransition,
    GateNotMet,
    StaleSignOff,
)


def _status_for(exc: OrrError) -> int:
    if isinstance(exc, NotFound):
        return 404
    if isinstance(exc, _CONFLICTS):
        return 409
    if isinstance(exc, RoleNotPermitted):
        return 403
    return 422


def _error_body(exc: OrrError) -> dict[str, Any]:
    body: dict[str, Any] = {
        "error": type(exc).__name__,
        "detail": str(exc),
    }
    if isinstance(exc, GateNotMet):
        body["shortfalls"] = {
            region: [[category, score] for category, score in items]
            for region, items in exc.shortfalls.items()
        }
    if isinstance(exc, PredicateSyntaxError):
        body["offset"] = exc.offset
        body["expected"] = exc.expected
    if isinstance(exc, RevisionConflict):
        body["expected"] = exc.expected
        body["actual"] = exc.actual
    return body


class EvidenceIn(BaseModel):
    description: str = ""
    content_base64: str


class AnswerIn(BaseModel):
    checkpoint_id: str
    region: str
    status: str
    note: str = ""
    evidence: EvidenceIn | None = None


class AnswersPut(BaseModel):
    expected_revision: int
    answers: list[AnswerIn]


class CreateAssessment(BaseModel):
    template: str  # "name" or "name@version"
    profile: dict
    id: str | None = None


class TransitionIn(BaseModel):
    to: str
    reason: str = ""


class ProbeRunIn(BaseModel):
    region: str
    checkpoint_id: str | None = None


def _parse_role(raw: str | None) -> Role:
    if raw is None:
        raise SchemaError("missing X-ORR-Role header")
    try:
        return Role(raw)
    except ValueError:
        raise SchemaError(
            f"unknown role {raw!r}; one of {[r.value for r in Role]}"
        ) from None


def _assessment_body(repo: Repository, assessment) -> dict[str, Any]:
    doc = assessment.to_doc()
    doc["applicable_checkpoints"] = sorted(
        applicable_set(assessment.template, assessment.profile)
    )
    return doc


def create_app(
    repo: Repository,
    ui_dir: str | Path | None = None,
    command_allowlist: tuple[str, ...] = (),
) -> FastAPI:
    app = FastAPI(title="orr", docs_url=None, redoc_url=None)

    @app.exception_handler(OrrError)
    async def orr_error_handler(_request: Request, exc: OrrError) -> JSONResponse:
        return JSONResponse(status_code=_status_for(exc), content=_error_body(exc))

    # --- templates -------------------------------------------------------------

    @app.get(API + "/templates")
    def list_templates() -> dict[str, Any]:
        return {
            "templates": [
                {"name": name, "version": version}
                for name, version in repo.list_templates()
            ]
        }

    @app.post(API + "/templates", status_code=201)
    async def upload_template(request: Request) -> dict[str, Any]:
        document = await request.body()
        template = repo.ingest_template(document)
        return {"name": template.name, "version": template.version}

    @app.get(API + "/templates/{name}/{version}")
    def get_template(name: str, version: str) -> dict[str, Any]:
        return template_to_doc(repo.get_template(name, version))

    # --- assessments -------------------------------------------------------------

    @app.post(API + "/assessments", status_code=201)
    def create_assessment(payload: CreateAssessment) -> dict[str, Any]:
        template = repo.resolve_template(payload.template)
        profile = ReleaseProfile.from_doc(payload.profile)
        assessment = repo.create_assessment(template, profile, payload.id)
        return _assessment_body(repo, assessment)

    @app.get(API + "/assessments/{assessment_id}")
    def get_assessment(assessment_id: str) -> dict[str, Any]:
        return _assessment_body(repo, repo.load_assessment(assessment_id))

    @app.put(API + "/assessments/{assessment_id}/answers")
    def put_answers(
        assessment_id: str,
        payload: AnswersPut,
        x_orr_actor: str | None = Header(default=None),
    ) -> dict[str, Any]:
        assessment = repo.load_assessment(assessment_id)
        if assessment.revision != payload.expected_revision:
            raise RevisionConflict(payload.expected_revision, assessment.revision)
        actor = x_orr_actor or "anonymous"
        for entry in payload.answers:
            try:
                status = CheckpointStatus(entry.status)
            except ValueError:
                raise SchemaError(
                    f"unknown status {entry.status!r}; one of "
                    f"{[s.value for s in CheckpointStatus]}"
                ) from None
            evidence = None
            content = None
            if entry.evidence is not None:
                try:
                    content = base64.b64decode(
                        entry.evidence.content_base64, validate=True
                    )
                except (binascii.Error, ValueError):
                    raise SchemaError("evidence content_base64 does not decode") from None
                evidence = new_evidence(
                    content, "attestation", entry.evidence.description
                )
            answer = Answer(
                checkpoint_id=entry.checkpoint_id,
                region=entry.region,
                status=status,
                note=entry.note,
                evidence=evidence,
                answered_by=actor,
            )
            assessment = record_answer(assessment, answer, evidence_content=content)
        assessment = repo.save_assessment(
            assessment, expected_revision=payload.expected_revision
        )
        return {"revision": assessment.revision}

    @app.get(API + "/assessments/{assessment_id}/scorecard")
    def get_scorecard(assessment_id: str, format: str = "json") -> Response:
        scorecard = compute_scorecard(repo.load_assessment(assessment_id))
        if format == "csv":
            return PlainTextResponse(
                scorecard_to_csv(scorecard), media_type="text/csv"
            )
        if format == "json":
            return JSONResponse(scorecard_to_doc(scorecard))
        raise SchemaError(f"unknown scorecard format {format!r} (json or csv)")

    @app.get(API + "/assessments/{assessment_id}/dashboard")
    def get_dashboard(assessment_id: str, format: str = "html") -> Response:
        model = build_dashboard(repo.load_assessment(assessment_id))
        if format == "html":
            return HTMLResponse(render_dashboard(model, "html"))
        if format == "csv":
            return PlainTextResponse(
                render_dashboard(model, "csv"), media_type="text/csv"
            )
        raise SchemaError(f"unknown dashboard format {format!r} (html or csv)")

    @app.post(API + "/assessments/{assessment_id}/signoffs")
    def post_signoff(
        assessment_id: str,
        x_orr_role: str | None = Header(default=None),
        x_orr_actor: str | None = Header(default=None),
    ) -> dict[str, Any]:
        role = _parse_role(x_orr_role)
        assessment = repo.load_assessment(assessment_id)
        expected = assessment.revision
        assessment = record_signoff(assessment, role, x_orr_actor or "anonymous")
        assessment = repo.save_assessment(assessment, expected_revision=expected)
        return _assessment_body(repo, assessment)

    @app.post(API + "/assessments/{assessment_id}/transition")
    def post_transition(
        assessment_id: str,
        payload: TransitionIn,
        x_orr_role: str | None = Header(default=None),
        x_orr_actor: str | None = Header(default=None),
    ) -> dict[str, Any]:
        role = _parse_role(x_orr_role)
        try:
            target = WorkflowState(payload.to)
        except ValueError:
            raise SchemaError(
                f"unknown state {payload.to!r}; one of "
                f"{[s.value for s in WorkflowState]}"
            ) from None
        assessment = repo.load_assessment(assessment_id)
        expected = assessment.revision
        assessment = request_transition(
            assessment, target, x_orr_actor or "anonymous", role, payload.reason
        )
        assessment = repo.save_assessment(assessment, expected_revision=expected)
        return _assessment_body(repo, assessment)

    @app.post(API + "/assessments/{assessment_id}/probes/run")
    def post_probes_run(assessment_id: str, payload: ProbeRunIn) -> dict[str, Any]:
        assessment = repo.load_assessment(assessment_id)
        expected = assessment.revision
        if payload.checkpoint_id is not None:
            assessment, result = run_checkpoint_probe(
                assessment, payload.checkpoint_id, payload.region, command_allowlist
            )
            outcomes = [(payload.checkpoint_id, result)]
        else:
            assessment, outcomes = run_all_probes(
                assessment, payload.region, command_allowlist
            )
        assessment = repo.save_assessment(assessment, expected_revision=expected)
        return {
            "revision": assessment.revision,
            "results": [
                {
                    "checkpoint_id": checkpoint_id,
                    "outcome": result.outcome.value,
                    "observed": result.observed,
                    "attempts": result.attempts,
                    "duration_ms": result.duration_ms,
                }
                for checkpoint_id, result in outcomes
            ],
        }

    # --- portfolio / compare --------------------------------------------------------

    @app.get(API + "/portfolio")
    def get_portfolio() -> dict[str, Any]:
        assessments = [
            repo.load_assessment(assessment_id)
            for assessment_id in repo.list_assessments()
        ]
        return portfolio_rollup(assessments).to_doc()

    @app.get(API + "/compare/{template_ref}/{reference_name}")
    def get_compare(
        template_ref: str, reference_name: str, format: str = "json"
    ) -> Response:
        template = repo.resolve_template(template_ref)
        framework = repo.get_reference(reference_name)
        matrix = compare(template, [framework])
        if format == "csv":
            return PlainTextResponse(
                render_matrix(matrix, "csv"), media_type="text/csv"
            )
        if format == "json":
            return JSONResponse(matrix.to_doc())
        raise SchemaError(f"unknown compare format {format!r} (json or csv)")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def run_server(
    root: str | Path,
    port: int = 8000,
    host: str = "127.0.0.1",
    ui_dir: str | Path | None = None,
    command_allowlist: tuple[str, ...] = (),
) -> None:
    import uvicorn

    app = create_app(Repository(root), ui_dir=ui_dir, command_allowlist=command_allowlist)
    uvicorn.run(app, host=host, port=port, log_level="info")
