"""Command line interface.

Every command works against exactly one backend per invocation: a local
repository directory (--repo, default ./orr-data or $ORR_REPO) or a running
service (--url / $ORR_URL).  Exit codes are part of the contract:

    0  fine
    1  usage problems
    2  validation or parse failures
    3  governance refusals (bad transition, role, gate, stale sign-off,
       concurrent edit)
    4  I/O trouble (filesystem or network)
"""

from __future__ import annotations

import argparse
import base64
import json
import os
import sys
from pathlib import Path
from typing import Any, Sequence

import requests

from .assessment import (
    Answer,
    Assessment,
    CheckpointStatus,
    compute_scorecard,
    migrate_answers,
    new_evidence,
    record_answer,
    run_all_probes,
    run_checkpoint_probe,
    scorecard_to_csv,
)
from .comparator import compare, render_matrix
from .dashboard import (
    DashboardCell,
    DashboardModel,
    DashboardRow,
    build_dashboard,
    render_dashboard,
)
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
    TemplateSyntaxError,
    UnsupportedFormat,
    VersionExists,
)
from .assessment import CellColor
from .repository import Repository
from .template import (
    ChecklistTemplate,
    ReleaseProfile,
    diff_templates,
    parse_template,
    validate_template,
)
from .workflow import Role, WorkflowState, record_signoff, request_transition

_REFUSALS = (
    IllegalTransition,
    RoleNotPermitted,
    GateNotMet,
    StaleSignOff,
    LockedState,
    RevisionConflict,
)


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _Usage(message)


# --- remote client ----------------------------------------------------------------

_REMOTE_ERRORS: dict[str, type[OrrError]] = {
    cls.__name__: cls
    for cls in (
        NotFound,
        VersionExists,
        RevisionConflict,
        LockedState,
        IllegalTransition,
        GateNotMet,
        StaleSignOff,
        RoleNotPermitted,
        SchemaError,
        TemplateSyntaxError,
        PredicateSyntaxError,
        UnsupportedFormat,
    )
}


def _raise_remote(status: int, body: Any) -> None:
    if isinstance(body, dict) and "error" in body:
        name = body["error"]
        detail = body.get("detail", name)
        if name == "GateNotMet":
            raise GateNotMet(
                {
                    region: [(c, s) for c, s in items]
                    for region, items in body.get("shortfalls", {}).items()
                }
            )
        if name == "RevisionConflict":
            raise RevisionConflict(body.get("expected", -1), body.get("actual", -1))
        if name == "PredicateSyntaxError":
            raise PredicateSyntaxError(
                detail, body.get("offset", 0), body.get("expected", "?")
            )
        cls = _REMOTE_ERRORS.get(name, OrrError)
        raise cls(detail)
    raise OrrError(f"service answered HTTP {status}")


class ApiClient:
    """Thin wrapper over the /api/v1 surface.

    ``session`` only needs requests' ``request(method, url, ...)`` shape, so
    tests can substitute an in-process client.
    """

    def __init__(self, base_url: str, session: Any | None = None) -> None:
        self.base_url = base_url.rstrip("/")
        self.session = session or requests.Session()

    def call(
        self,
        method: str,
        path: str,
        json_body: Any = None,
        data: bytes | None = None,
        headers: dict[str, str] | None = None,
        params: dict[str, str] | None = None,
    ) -> Any:
        response = self.session.request(
            method,
            self.base_url + path,
            json=json_body,
            data=data,
            headers=headers,
            params=params,
        )
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = None
            _raise_remote(response.status_code, body)
        content_type = response.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            return response.json()
        return response.text


# --- backend plumbing ---------------------------------------------------------------

def _backend(args: argparse.Namespace) -> tuple[Repository | None, ApiClient | None]:
    url = args.url or os.environ.get("ORR_URL")
    if url and args.repo_given:
        raise _Usage("--repo and --url are mutually exclusive")
    if url:
        return None, ApiClient(url)
    return Repository(args.repo), None


def _load_assessment(repo: Repository | None, api: ApiClient | None, assessment_id: str):
    if repo is not None:
        return repo.load_assessment(assessment_id)
    doc = api.call("GET", f"/api/v1/assessments/{assessment_id}")
    ref = doc["template"]
    template_doc = api.call(
        "GET", f"/api/v1/templates/{ref['name']}/{ref['version']}"
    )
    return Assessment.from_doc(doc, parse_template(template_doc))


def _parse_role_arg(raw: str) -> Role:
    try:
        return Role(raw)
    except ValueError:
        raise SchemaError(
            f"unknown role {raw!r}; one of {[r.value for r in Role]}"
        ) from None


def _read_file(path: str) -> bytes:
    return Path(path).read_bytes()


def _echo(text: str = "") -> None:
    print(text)


def _warn(text: str) -> None:
    print(text, file=sys.stderr)


# --- template commands -----------------------------------------------------------------

def _load_template_arg(
    repo: Repository | None, api: ApiClient | None, arg: str
) -> ChecklistTemplate:
    if os.path.exists(arg):
        return parse_template(_read_file(arg))
    if "@" in arg:
        name, version = arg.split("@", 1)
    else:
        name, version = arg, None
    if repo is not None:
        return repo.resolve_template(arg)
    if version is None:
        listed = [
            t for t in api.call("GET", "/api/v1/templates")["templates"]
            if t["name"] == name
        ]
        if not listed:
            raise NotFound(f"no template named {name!r}")
        version = listed[-1]["version"]
    doc = api.call("GET", f"/api/v1/templates/{name}/{version}")
    return parse_template(doc)


def cmd_template_validate(args, repo, api) -> int:
    try:
        template = parse_template(_read_file(args.file))
    except (TemplateSyntaxError, SchemaError, PredicateSyntaxError) as exc:
        _warn(f"invalid: {exc}")
        return 2
    issues = validate_template(template)
    for issue in issues:
        _echo(f"{issue.severity}: {issue.where}: {issue.message}")
    errors = [i for i in issues if i.severity == "error"]
    if errors:
        _warn(f"{template.ref}: {len(errors)} error(s)")
        return 2
    checkpoints = sum(len(c.checkpoints) for c in template.categories)
    _echo(
        f"{template.ref}: ok ({len(template.categories)} categories, "
        f"{checkpoints} checkpoints)"
    )
    return 0


def cmd_template_list(args, repo, api) -> int:
    if repo is not None:
        rows = repo.list_templates()
    else:
        rows = [
            (t["name"], t["version"])
            for t in api.call("GET", "/api/v1/templates")["templates"]
        ]
    for name, version in rows:
        _echo(f"{name}@{version}")
    return 0


def cmd_template_diff(args, repo, api) -> int:
    old = _load_template_arg(repo, api, args.old)
    new = _load_template_arg(repo, api, args.new)
    diff = diff_templates(old, new)
    for label, ids in (
        ("added", diff.added),
        ("removed", diff.removed),
        ("changed", diff.changed),
    ):
        for checkpoint_id in sorted(ids):
            _echo(f"{label}: {checkpoint_id}")
    if diff.empty:
        _echo("no checkpoint differences")
    return 0


def cmd_template_push(args, repo, api) -> int:
    document = _read_file(args.file)
    if repo is not None:
        template = repo.ingest_template(document)
    else:
        answer = api.call(
            "POST",
            "/api/v1/templates",
            data=document,
            headers={"content-type": "application/json"},
        )
        template = parse_template(document)
        assert answer["name"] == template.name
    _echo(f"stored {template.ref}")
    return 0


# --- assessment commands ------------------------------------------------------------------

def cmd_new(args, repo, api) -> int:
    profile_doc = json.loads(_read_file(args.profile))
    if repo is not None:
        template = repo.resolve_template(args.template)
        profile = ReleaseProfile.from_doc(profile_doc)
        assessment = repo.create_assessment(template, profile, args.id)
        assessment_id = assessment.id
        regions = assessment.profile.regions
    else:
        doc = api.call(
            "POST",
            "/api/v1/assessments",
            json_body={
                "template": args.template,
                "profile": profile_doc,
                "id": args.id,
            },
        )
        assessment_id = doc["id"]
        regions = doc["profile"]["regions"]
    _echo(f"created assessment {assessment_id} ({len(regions)} regions)")
    return 0


def _wizard_targets(assessment: Assessment, region: str, redo: bool = False) -> list:
    from .template import applicable_set

    # ``redo`` reopens NonCompliant / InProgress answers so the
    # ChangesRequested loop can actually fix what the review flagged.
    settled = {CheckpointStatus.UNANSWERED}
    if redo:
        settled.add(CheckpointStatus.NON_COMPLIANT)
        settled.add(CheckpointStatus.IN_PROGRESS)
    applicable = applicable_set(assessment.template, assessment.profile)
    answered = {
        (a.checkpoint_id, a.region)
        for a in assessment.answers
        if a.status not in settled
    }
    out = []
    for category in assessment.template.categories:
        for checkpoint in category.checkpoints:
            if checkpoint.id not in applicable:
                continue
            if (checkpoint.id, region) in answered:
                continue
            out.append((category, checkpoint))
    return out


_WIZARD_KEYS = {
    "y": CheckpointStatus.COMPLIANT,
    "n": CheckpointStatus.NON_COMPLIANT,
    "p": CheckpointStatus.IN_PROGRESS,
}


def cmd_fill(args, repo, api) -> int:
    assessment = _load_assessment(repo, api, args.id)
    regions = [args.region] if args.region else list(assessment.profile.regions)
    for region in regions:
        if region not in assessment.profile.regions:
            raise SchemaError(f"region {region!r} is not part of this assessment")
    actor = args.actor
    answered_count = 0
    for region in regions:
        targets = _wizard_targets(assessment, region, redo=args.redo)
        if not targets:
            _echo(f"{region}: nothing left to answer")
            continue
        _echo(f"-- {region}: {len(targets)} open checkpoints --")
        for index, (category, checkpoint) in enumerate(targets, 1):
            _echo(f"[{index}/{len(targets)}] {category.name}")
            _echo(f"  {checkpoint.prompt}")
            if checkpoint.guidance:
                _echo(f"  ({checkpoint.guidance})")
            try:
                choice = input(
                    "  [y]=Compliant [n]=NonCompliant [p]=InProgress "
                    "[s]=skip [q]=quit > "
                ).strip().lower()
            except EOFError:
                choice = "q"
            if choice == "q":
                _echo(f"stopped; {answered_count} answers recorded")
                return 0
            if choice not in _WIZARD_KEYS:
                _echo("  skipped")
                continue
            status = _WIZARD_KEYS[choice]
            note = ""
            evidence = None
            content = None
            if status == CheckpointStatus.COMPLIANT and checkpoint.evidence_required:
                note = input("  evidence note (required) > ").strip()
                while not note:
                    note = input("  evidence note (required) > ").strip()
                content = note.encode("utf-8")
                evidence = new_evidence(
                    content, "attestation", f"wizard note for {checkpoint.id}"
                )
            answer = Answer(
                checkpoint_id=checkpoint.id,
                region=region,
                status=status,
                note=note,
                evidence=evidence,
                answered_by=actor,
            )
            # Persist immediately so a dropped session loses at most the
            # answer being typed.
            if repo is not None:
                before = assessment.revision
                assessment = record_answer(assessment, answer, evidence_content=content)
                assessment = repo.save_assessment(assessment, expected_revision=before)
            else:
                payload_answer: dict[str, Any] = {
                    "checkpoint_id": checkpoint.id,
                    "region": region,
                    "status": status.value,
                    "note": note,
                }
                if content is not None:
                    payload_answer["evidence"] = {
                        "description": f"wizard note for {checkpoint.id}",
                        "content_base64": base64.b64encode(content).decode("ascii"),
                    }
                api.call(
                    "PUT",
                    f"/api/v1/assessments/{args.id}/answers",
                    json_body={
                        "expected_revision": assessment.revision,
                        "answers": [payload_answer],
                    },
                    headers={"X-ORR-Actor": actor},
                )
                assessment = _load_assessment(repo, api, args.id)
            answered_count += 1
    _echo(f"done; {answered_count} answers recorded")
    return 0


def cmd_probe(args, repo, api) -> int:
    allowlist = tuple(args.allow_command or ())
    if args.region:
        regions = [args.region]
    else:
        regions = list(_load_assessment(repo, api, args.id).profile.regions)
    rows = []
    for region in regions:
        if repo is not None:
            assessment = _load_assessment(repo, api, args.id)
            before = assessment.revision
            if args.checkpoint:
                assessment, result = run_checkpoint_probe(
                    assessment, args.checkpoint, region, allowlist
                )
                outcomes = [(args.checkpoint, result)]
            else:
                assessment, outcomes = run_all_probes(assessment, region, allowlist)
            if assessment.events_pending:
                repo.save_assessment(assessment, expected_revision=before)
            rows.extend(
                (region, cid, result.outcome.value, result.observed, result.attempts)
                for cid, result in outcomes
            )
        else:
            doc = api.call(
                "POST",
                f"/api/v1/assessments/{args.id}/probes/run",
                json_body={"region": region, "checkpoint_id": args.checkpoint},
            )
            rows.extend(
                (region, r["checkpoint_id"], r["outcome"], r["observed"], r["attempts"])
                for r in doc["results"]
            )
    if not rows:
        _echo("no probe-bound checkpoints apply")
        return 0
    for region, checkpoint_id, outcome, observed, attempts in rows:
        _echo(f"{outcome:5s} {region} {checkpoint_id}: {observed} (attempts: {attempts})")
    return 0


def _model_from_docs(assessment_doc: dict, scorecard_doc: dict) -> DashboardModel:
    regions = tuple(scorecard_doc["regions"])

    def cell(doc: dict) -> DashboardCell:
        score = doc["score"]
        return DashboardCell(
            text="N/A" if score is None else f"{score}%",
            color=CellColor(doc["color"]),
        )

    rows = [
        DashboardRow(
            label="Overall",
            cells=tuple(cell(scorecard_doc["overall"][r]) for r in regions),
        )
    ]
    for row in scorecard_doc["categories"]:
        rows.append(
            DashboardRow(
                label=row["name"],
                cells=tuple(cell(row["cells"][r]) for r in regions),
            )
        )
    profile = assessment_doc.get("profile", {})
    density = (
        len(regions)
        + len(scorecard_doc["categories"])
        + len(regions) * len(scorecard_doc["categories"])
        + sum(
            1
            for row in scorecard_doc["categories"]
            for r in regions
            if row["cells"][r]["color"] != "grey"
        )
        + sum(scorecard_doc["overall"][r]["applicable"] for r in regions)
    )
    return DashboardModel(
        assessment_id=scorecard_doc["assessment_id"],
        application=profile.get("application") or scorecard_doc["assessment_id"],
        template_ref=(
            f"{scorecard_doc['template']['name']}@{scorecard_doc['template']['version']}"
        ),
        state=assessment_doc.get("workflow", {}).get("state", ""),
        generated_at="",
        regions=regions,
        rows=tuple(rows),
        density_total=density,
        gate={r: bool(scorecard_doc["gate_passed"][r]) for r in regions},
    )


def cmd_score(args, repo, api) -> int:
    fmt = args.format
    if repo is not None:
        assessment = repo.load_assessment(args.id)
        if fmt == "csv":
            _echo(scorecard_to_csv(compute_scorecard(assessment)).rstrip("\n"))
            return 0
        model = build_dashboard(assessment)
        sys.stdout.write(render_dashboard(model, fmt))
        return 0
    if fmt in ("csv", "html"):
        text = api.call(
            "GET",
            f"/api/v1/assessments/{args.id}/dashboard",
            params={"format": fmt},
        )
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return 0
    scorecard_doc = api.call(
        "GET", f"/api/v1/assessments/{args.id}/scorecard", params={"format": "json"}
    )
    assessment_doc = api.call("GET", f"/api/v1/assessments/{args.id}")
    model = _model_from_docs(assessment_doc, scorecard_doc)
    sys.stdout.write(render_dashboard(model, "tty"))
    return 0


def cmd_signoff(args, repo, api) -> int:
    role = _parse_role_arg(getattr(args, "as"))
    if repo is not None:
        assessment = repo.load_assessment(args.id)
        expected = assessment.revision
        assessment = record_signoff(assessment, role, args.actor)
        repo.save_assessment(assessment, expected_revision=expected)
        revision = assessment.revision
    else:
        doc = api.call(
            "POST",
            f"/api/v1/assessments/{args.id}/signoffs",
            json_body={},
            headers={"X-ORR-Role": role.value, "X-ORR-Actor": args.actor},
        )
        revision = doc["revision"]
    _echo(f"{role.value} signed off at revision {revision}")
    return 0


def cmd_transition(args, repo, api) -> int:
    role = _parse_role_arg(getattr(args, "as"))
    try:
        target = WorkflowState(args.to)
    except ValueError:
        raise SchemaError(
            f"unknown state {args.to!r}; one of {[s.value for s in WorkflowState]}"
        ) from None
    if repo is not None:
        assessment = repo.load_assessment(args.id)
        expected = assessment.revision
        assessment = request_transition(
            assessment, target, args.actor, role, args.reason
        )
        repo.save_assessment(assessment, expected_revision=expected)
        state = assessment.workflow.state.value
    else:
        doc = api.call(
            "POST",
            f"/api/v1/assessments/{args.id}/transition",
            json_body={"to": target.value, "reason": args.reason},
            headers={"X-ORR-Role": role.value, "X-ORR-Actor": args.actor},
        )
        state = doc["workflow"]["state"]
    _echo(f"assessment {args.id} is now {state}")
    return 0


def cmd_migrate(args, repo, api) -> int:
    if repo is None:
        raise _Usage("migrate works against a local repository, not --url")
    assessment = repo.load_assessment(args.id)
    new_template = repo.get_template(assessment.template.name, args.to)
    expected = assessment.revision
    migrated, report = migrate_answers(assessment, new_template)
    if migrated is not assessment:
        repo.save_assessment(migrated, expected_revision=expected)
    carried, archived, added = report.counts
    _echo(
        f"migrated {args.id} to {new_template.ref}: "
        f"carried {carried}, archived {archived}, new checkpoints {added}"
    )
    return 0


def cmd_compare(args, repo, api) -> int:
    if repo is not None:
        template = repo.resolve_template(args.template)
        framework = repo.get_reference(args.reference)
        matrix = compare(template, [framework])
        sys.stdout.write(render_matrix(matrix, args.format))
        return 0
    text = api.call(
        "GET",
        f"/api/v1/compare/{args.template}/{args.reference}",
        params={"format": "csv" if args.format == "csv" else "json"},
    )
    if args.format == "csv":
        sys.stdout.write(text)
        return 0
    # tty over the wire: rebuild and render locally
    from .comparator import CoverageLevel, GapMatrix, GapRow

    matrix = GapMatrix(
        columns=tuple(text["columns"]),
        rows=tuple(
            GapRow(
                category=row["category"],
                levels=tuple(
                    CoverageLevel(row["levels"][column]) for column in text["columns"]
                ),
            )
            for row in text["rows"]
        ),
    )
    sys.stdout.write(render_matrix(matrix, "tty"))
    return 0


def cmd_serve(args, repo, api) -> int:
    if api is not None:
        raise _Usage("serve starts a local service; it needs --root, not --url")
    from .service import run_server

    run_server(
        args.root or args.repo,
        port=args.port,
        host=args.host,
        ui_dir=args.ui,
        command_allowlist=tuple(args.allow_command or ()),
    )
    return 0


# --- wiring ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="orr", description="operational readiness reviews")
    parser.add_argument(
        "--repo",
        default=os.environ.get("ORR_REPO", "orr-data"),
        help="repository directory (default: ./orr-data or $ORR_REPO)",
    )
    parser.add_argument("--url", default=None, help="service URL instead of --repo")
    sub = parser.add_subparsers(dest="command", metavar="command")

    template = sub.add_parser("template", help="manage checklist templates")
    template_sub = template.add_subparsers(dest="subcommand", metavar="subcommand")
    p = template_sub.add_parser("validate", help="check a template file")
    p.add_argument("file")
    p.set_defaults(func=cmd_template_validate)
    p = template_sub.add_parser("list", help="list stored templates")
    p.set_defaults(func=cmd_template_list)
    p = template_sub.add_parser("diff", help="compare two template versions")
    p.add_argument("old", help="file path or name@version")
    p.add_argument("new", help="file path or name@version")
    p.set_defaults(func=cmd_template_diff)
    p = template_sub.add_parser("push", help="store a template file")
    p.add_argument("file")
    p.set_defaults(func=cmd_template_push)

    p = sub.add_parser("new", help="open an assessment from a template")
    p.add_argument("--template", required=True, help="name or name@version")
    p.add_argument("--profile", required=True, help="release profile JSON file")
    p.add_argument("--id", default=None)
    p.set_defaults(func=cmd_new)

    p = sub.add_parser("fill", help="interactive answer wizard")
    p.add_argument("id")
    p.add_argument("--region", default=None)
    p.add_argument("--actor", default="cli")
    p.add_argument(
        "--redo",
        action="store_true",
        help="also revisit NonCompliant and InProgress answers",
    )
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("probe", help="run live probes for an assessment")
    p.add_argument("id")
    p.add_argument("--region", default=None, help="default: every region in turn")
    p.add_argument("--checkpoint", default=None)
    p.add_argument(
        "--allow-command",
        action="append",
        help="allow-list a command for command_exit probes (repeatable)",
    )
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("score", help="render the scorecard / dashboard")
    p.add_argument("id")
    p.add_argument("--format", choices=("tty", "csv", "html"), default="tty")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("signoff", help="record a role sign-off")
    p.add_argument("id")
    p.add_argument("--as", required=True, metavar="ROLE")
    p.add_argument("--actor", default="cli")
    p.set_defaults(func=cmd_signoff)

    p = sub.add_parser("transition", help="move the workflow")
    p.add_argument("id")
    p.add_argument("--to", required=True, metavar="STATE")
    p.add_argument("--as", required=True, metavar="ROLE")
    p.add_argument("--actor", default="cli")
    p.add_argument("--reason", default="")
    p.set_defaults(func=cmd_transition)

    p = sub.add_parser("migrate", help="move an assessment to a newer template version")
    p.add_argument("id")
    p.add_argument("--to", required=True, metavar="VERSION")
    p.set_defaults(func=cmd_migrate)

    p = sub.add_parser("compare", help="coverage matrix against a reference checklist")
    p.add_argument("template", help="name or name@version")
    p.add_argument("reference")
    p.add_argument("--format", choices=("tty", "csv"), default="tty")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--root", default=None, help="repository directory (default --repo)")
    p.add_argument("--ui", default=None, help="directory of built web UI assets")
    p.add_argument("--allow-command", action="append")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        raw = list(argv) if argv is not None else sys.argv[1:]
        args.repo_given = "--repo" in raw
        func = getattr(args, "func", None)
        if func is None:
            parser.print_help()
            return 1
        if func is cmd_serve:
            repo, api = (None, ApiClient(args.url)) if args.url else (None, None)
            return func(args, repo, api)
        repo, api = _backend(args)
        return func(args, repo, api)
    except _Usage as exc:
        _warn(f"usage: {exc}")
        return 1
    except GateNotMet as exc:
        _warn(f"GateNotMet: {exc}")
        for region, items in sorted(exc.shortfalls.items()):
            for category, score in items:
                _warn(f"  {region}: {category} at {score}%")
        return 3
    except _REFUSALS as exc:
        _warn(f"{type(exc).__name__}: {exc}")
        return 3
    except (TemplateSyntaxError, PredicateSyntaxError, SchemaError) as exc:
        _warn(f"{type(exc).__name__}: {exc}")
        return 2
    except (OSError, requests.RequestException) as exc:
        _warn(f"i/o error: {exc}")
        return 4
    except json.JSONDecodeError as exc:
        _warn(f"bad JSON: {exc}")
        return 2
    except OrrError as exc:
        _warn(f"{type(exc).__name__}: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
