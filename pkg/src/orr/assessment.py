"""Assessments: answers per region, scoring, the 100% gate, migration.

An assessment instantiates one template version for one release: it fixes the
profile (which drives applicability), the regions, and collects answers per
(checkpoint, region).  Values are immutable; every mutating operation hands
back a fresh Assessment with the revision bumped by one and a pending event
describing what happened, which the repository appends to the assessment's
event log on save.

Scoring follows three rules that the rest of the engine leans on:

* a checkpoint counts as compliant only when its recorded status is
  Compliant; Unanswered, InProgress and NonCompliant all count against;
* a category with zero applicable checkpoints is N/A (grey), never zero;
* percentages round half up, except that 100 is reserved for full compliance
  and 0 for none, so a 199/200 category can never masquerade as done.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Mapping, Sequence

from .errors import (
    EvidenceMissing,
    LockedState,
    NoProbeBinding,
    NotApplicable,
    SchemaError,
    TemplateMismatch,
    UnknownCheckpoint,
    UnknownRegion,
)
from .probes import (
    Evidence,
    ProbeOutcome,
    ProbeResult,
    run_probe,
    sha256_hex,
)
from .template import (
    ChecklistTemplate,
    ColorThresholds,
    ReleaseProfile,
    applicable_set,
    validate_profile,
    version_key,
)
from .workflow import EDITABLE_STATES, WorkflowRecord, WorkflowState, now_utc


class CheckpointStatus(str, Enum):
    UNANSWERED = "Unanswered"
    IN_PROGRESS = "InProgress"
    COMPLIANT = "Compliant"
    NON_COMPLIANT = "NonCompliant"


@dataclass(frozen=True, slots=True)
class Answer:
    checkpoint_id: str
    region: str
    status: CheckpointStatus
    note: str = ""
    evidence: Evidence | None = None
    answered_by: str = ""
    answered_at: str = ""

    def to_doc(self) -> dict[str, Any]:
        return {
            "checkpoint_id": self.checkpoint_id,
            "region": self.region,
            "status": self.status.value,
            "note": self.note,
            "evidence": self.evidence.to_doc() if self.evidence else None,
            "answered_by": self.answered_by,
            "answered_at": self.answered_at,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "Answer":
        evidence_doc = doc.get("evidence")
        return cls(
            checkpoint_id=str(doc["checkpoint_id"]),
            region=str(doc["region"]),
            status=CheckpointStatus(doc["status"]),
            note=str(doc.get("note", "")),
            evidence=Evidence.from_doc(evidence_doc) if evidence_doc else None,
            answered_by=str(doc.get("answered_by", "")),
            answered_at=str(doc.get("answered_at", "")),
        )


@dataclass(frozen=True, slots=True)
class Assessment:
    id: str
    template: ChecklistTemplate
    profile: ReleaseProfile
    answers: tuple[Answer, ...] = ()
    archived_answers: tuple[Answer, ...] = ()
    workflow: WorkflowRecord = field(default_factory=WorkflowRecord)
    revision: int = 1
    created_at: str = ""
    # Side channels for the repository; not part of value identity.
    events_pending: tuple[dict, ...] = field(default=(), compare=False, repr=False)
    evidence_pending: tuple[tuple[str, bytes], ...] = field(
        default=(), compare=False, repr=False
    )

    @property
    def application(self) -> str:
        return self.profile.application or self.id

    def answer_for(self, checkpoint_id: str, region: str) -> Answer | None:
        for answer in self.answers:
            if answer.checkpoint_id == checkpoint_id and answer.region == region:
                return answer
        return None

    def _with_answers(
        self,
        answers: tuple[Answer, ...],
        event: dict,
        evidence: tuple[tuple[str, bytes], ...] = (),
    ) -> "Assessment":
        """Answer content changed: bump revision, void every sign-off."""
        new_revision = self.revision + 1
        event = dict(event, revision=new_revision)
        return replace(
            self,
            answers=answers,
            revision=new_revision,
            workflow=replace(self.workflow, signoffs=()),
            events_pending=self.events_pending + (event,),
            evidence_pending=self.evidence_pending + evidence,
        )

    def _with_workflow(self, record: WorkflowRecord, event: dict) -> "Assessment":
        return replace(
            self,
            workflow=record,
            events_pending=self.events_pending + (event,),
        )

    def _with_event(self, event: dict) -> "Assessment":
        return replace(self, events_pending=self.events_pending + (event,))

    def drained(self) -> "Assessment":
        """Copy with the side channels emptied (repository calls this after
        persisting events and evidence blobs)."""
        return replace(self, events_pending=(), evidence_pending=())

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "template": {"name": self.template.name, "version": self.template.version},
            "profile": self.profile.to_doc(),
            "answers": [a.to_doc() for a in self.answers],
            "archived_answers": [a.to_doc() for a in self.archived_answers],
            "workflow": {
                "state": self.workflow.state.value,
                "signoffs": [
                    {
                        "role": s.role.value,
                        "actor": s.actor,
                        "at": s.at,
                        "revision": s.revision,
                    }
                    for s in self.workflow.signoffs
                ],
                "history": [
                    {
                        "source": t.source.value,
                        "target": t.target.value,
                        "actor": t.actor,
                        "role": t.role.value,
                        "at": t.at,
                        "reason": t.reason,
                    }
                    for t in self.workflow.history
                ],
            },
            "revision": self.revision,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(
        cls, doc: Mapping[str, Any], template: ChecklistTemplate
    ) -> "Assessment":
        from .workflow import Role, SignOff, TransitionRecord

        ref = doc.get("template", {})
        if (ref.get("name"), ref.get("version")) != (
            template.name,
            template.version,
        ):
            raise TemplateMismatch(
                f"assessment references {ref.get('name')}@{ref.get('version')}, "
                f"got template {template.ref}"
            )
        wf_doc = doc.get("workflow", {})
        workflow = WorkflowRecord(
            state=WorkflowState(wf_doc.get("state", "Draft")),
            signoffs=tuple(
                SignOff(
                    role=Role(s["role"]),
                    actor=str(s["actor"]),
                    at=str(s["at"]),
                    revision=int(s["revision"]),
                )
                for s in wf_doc.get("signoffs", [])
            ),
            history=tuple(
                TransitionRecord(
                    source=WorkflowState(t["source"]),
                    target=WorkflowState(t["target"]),
                    actor=str(t["actor"]),
                    role=Role(t["role"]),
                    at=str(t["at"]),
                    reason=str(t.get("reason", "")),
                )
                for t in wf_doc.get("history", [])
            ),
        )
        return cls(
            id=str(doc["id"]),
            template=template,
            profile=ReleaseProfile.from_doc(doc["profile"]),
            answers=tuple(Answer.from_doc(a) for a in doc.get("answers", [])),
            archived_answers=tuple(
                Answer.from_doc(a) for a in doc.get("archived_answers", [])
            ),
            workflow=workflow,
            revision=int(doc.get("revision", 1)),
            created_at=str(doc.get("created_at", "")),
        )


def new_assessment(
    assessment_id: str,
    template: ChecklistTemplate,
    profile: ReleaseProfile,
    created_at: str | None = None,
) -> Assessment:
    """Open a fresh Draft assessment at revision 1.

    The profile is checked against the template's attribute schema, and the
    branching rules are evaluated once up front so an undeclared attribute
    fails here rather than at first scoring.
    """
    validate_profile(template.profile_schema, profile)
    applicable_set(template, profile)
    assessment = Assessment(
        id=assessment_id,
        template=template,
        profile=profile,
        created_at=created_at or now_utc(),
    )
    return assessment._with_event(
        {"kind": "created", "assessment": assessment.to_doc()}
    )


def new_evidence(
    content: bytes,
    source: str,
    description: str = "",
    captured_at: str | None = None,
) -> Evidence:
    if source not in ("probe", "attestation", "document"):
        raise SchemaError(f"unknown evidence source {source!r}")
    return Evidence(
        id=uuid.uuid4().hex,
        source=source,
        digest=sha256_hex(content),
        captured_at=captured_at or now_utc(),
        description=description,
    )


def _upsert(answers: tuple[Answer, ...], answer: Answer) -> tuple[Answer, ...]:
    out = []
    replaced = False
    for existing in answers:
        if (
            existing.checkpoint_id == answer.checkpoint_id
            and existing.region == answer.region
        ):
            out.append(answer)
            replaced = True
        else:
            out.append(existing)
    if not replaced:
        out.append(answer)
    return tuple(out)


def _check_answer_target(assessment: Assessment, checkpoint_id: str, region: str):
    if assessment.workflow.state not in EDITABLE_STATES:
        raise LockedState(
            f"answers are frozen in state {assessment.workflow.state.value}"
        )
    if region not in assessment.profile.regions:
        raise UnknownRegion(f"region {region!r} is not part of this assessment")
    checkpoint = assessment.template.checkpoint(checkpoint_id)
    if checkpoint is None:
        raise UnknownCheckpoint(f"no checkpoint {checkpoint_id!r} in {assessment.template.ref}")
    if checkpoint_id not in applicable_set(assessment.template, assessment.profile):
        raise NotApplicable(
            f"checkpoint {checkpoint_id!r} is excluded by the branching rules "
            "for this release profile"
        )
    return checkpoint


def record_answer(
    assessment: Assessment,
    answer: Answer,
    evidence_content: bytes | None = None,
) -> Assessment:
    """Store (or overwrite) one answer; returns the next revision.

    Compliant answers to evidence-required checkpoints must carry evidence.
    When ``evidence_content`` is given it must hash to the answer's evidence
    digest; the repository later writes it into the evidence tree.
    """
    checkpoint = _check_answer_target(assessment, answer.checkpoint_id, answer.region)
    if (
        answer.status == CheckpointStatus.COMPLIANT
        and checkpoint.evidence_required
        and answer.evidence is None
    ):
        raise EvidenceMissing(
            f"checkpoint {checkpoint.id!r} requires evidence for a Compliant answer"
        )
    pending: tuple[tuple[str, bytes], ...] = ()
    if evidence_content is not None:
        if answer.evidence is None:
            raise SchemaError("evidence content supplied without evidence metadata")
        if sha256_hex(evidence_content) != answer.evidence.digest:
            raise SchemaError("evidence digest does not match the supplied content")
        pending = ((answer.evidence.id, evidence_content),)
    return assessment._with_answers(
        _upsert(assessment.answers, answer),
        event={"kind": "answer", "answer": answer.to_doc()},
        evidence=pending,
    )


# --- probes over answers -----------------------------------------------------------

def apply_probe_result(
    assessment: Assessment,
    checkpoint_id: str,
    region: str,
    result: ProbeResult,
) -> Assessment:
    """Fold a probe outcome into the answer sheet.

    Pass marks the checkpoint Compliant. Fail marks it NonCompliant.  Both
    overwrite any manual answer and attach the probe transcript as evidence.
    Error leaves the recorded answer untouched and only logs the attempt.
    """
    _check_answer_target(assessment, checkpoint_id, region)
    if result.outcome == ProbeOutcome.ERROR:
        return assessment._with_event(
            {
                "kind": "probe_error",
                "checkpoint_id": checkpoint_id,
                "region": region,
                "observed": result.observed,
                "at": result.started_at,
            }
        )
    transcript = result.transcript()
    evidence = Evidence(
        id=uuid.uuid4().hex,
        source="probe",
        digest=sha256_hex(transcript),
        captured_at=result.started_at,
        description=f"{result.spec.kind.value}: {result.observed}",
    )
    status = (
        CheckpointStatus.COMPLIANT
        if result.outcome == ProbeOutcome.PASS
        else CheckpointStatus.NON_COMPLIANT
    )
    answer = Answer(
        checkpoint_id=checkpoint_id,
        region=region,
        status=status,
        note=result.observed,
        evidence=evidence,
        answered_by="probe",
        answered_at=result.started_at,
    )
    return assessment._with_answers(
        _upsert(assessment.answers, answer),
        event={"kind": "answer", "answer": answer.to_doc()},
        evidence=((evidence.id, transcript),),
    )


def run_checkpoint_probe(
    assessment: Assessment,
    checkpoint_id: str,
    region: str,
    command_allowlist: Sequence[str] = (),
) -> tuple[Assessment, ProbeResult]:
    """Run the probe bound to one checkpoint and apply its outcome."""
    checkpoint = _check_answer_target(assessment, checkpoint_id, region)
    if checkpoint.probe is None:
        raise NoProbeBinding(f"checkpoint {checkpoint_id!r} has no probe attached")
    result = run_probe(checkpoint.probe, command_allowlist)
    return apply_probe_result(assessment, checkpoint_id, region, result), result


def run_all_probes(
    assessment: Assessment,
    region: str,
    command_allowlist: Sequence[str] = (),
) -> tuple[Assessment, list[tuple[str, ProbeResult]]]:
    """Run every probe-bound applicable checkpoint for a region, in template
    order, folding outcomes in as it goes."""
    if region not in assessment.profile.regions:
        raise UnknownRegion(f"region {region!r} is not part of this assessment")
    applicable = applicable_set(assessment.template, assessment.profile)
    results: list[tuple[str, ProbeResult]] = []
    for checkpoint in assessment.template.checkpoints():
        if checkpoint.probe is None or checkpoint.id not in applicable:
            continue
        result = run_probe(checkpoint.probe, command_allowlist)
        assessment = apply_probe_result(assessment, checkpoint.id, region, result)
        results.append((checkpoint.id, result))
    return assessment, results


# --- scoring -------------------------------------------------------------------------

class CellColor(str, Enum):
    GREEN = "green"
    YELLOW = "yellow"
    RED = "red"
    GREY = "grey"


def score_percent(compliant: int, applicable: int) -> int | None:
    """Integer percentage, rounded half up, with the honest endpoints:
    100 only for full compliance, 0 only for none, N/A (None) when nothing
    applies."""
    if applicable == 0:
        return None
    if compliant == applicable:
        return 100
    if compliant == 0:
        return 0
    rounded = (200 * compliant + applicable) // (2 * applicable)
    return min(99, max(1, rounded))


def color_for(score: int | None, thresholds: ColorThresholds) -> CellColor:
    if score is None:
        return CellColor.GREY
    if score >= thresholds.green_min:
        return CellColor.GREEN
    if score >= thresholds.yellow_min:
        return CellColor.YELLOW
    return CellColor.RED


@dataclass(frozen=True, slots=True)
class CategoryCell:
    compliant: int
    applicable: int
    score: int | None
    color: CellColor


@dataclass(frozen=True, slots=True)
class CategoryRow:
    key: str
    name: str
    cells: Mapping[str, CategoryCell]


@dataclass(frozen=True, slots=True)
class ScoreCard:
    assessment_id: str
    template_name: str
    template_version: str
    regions: tuple[str, ...]
    thresholds: ColorThresholds
    categories: tuple[CategoryRow, ...]
    overall: Mapping[str, CategoryCell]


def _cell(compliant: int, applicable: int, thresholds: ColorThresholds) -> CategoryCell:
    score = score_percent(compliant, applicable)
    return CategoryCell(
        compliant=compliant,
        applicable=applicable,
        score=score,
        color=color_for(score, thresholds),
    )


def compute_scorecard(assessment: Assessment) -> ScoreCard:
    template = assessment.template
    thresholds = template.thresholds
    applicable = applicable_set(template, assessment.profile)
    compliant_index: set[tuple[str, str]] = {
        (a.checkpoint_id, a.region)
        for a in assessment.answers
        if a.status == CheckpointStatus.COMPLIANT
    }
    rows: list[CategoryRow] = []
    totals = {region: [0, 0] for region in assessment.profile.regions}
    for category in template.categories:
        ids = [cp.id for cp in category.checkpoints if cp.id in applicable]
        cells: dict[str, CategoryCell] = {}
        for region in assessment.profile.regions:
            compliant = sum(1 for cp_id in ids if (cp_id, region) in compliant_index)
            cells[region] = _cell(compliant, len(ids), thresholds)
            totals[region][0] += compliant
            totals[region][1] += len(ids)
        rows.append(CategoryRow(key=category.key, name=category.name, cells=cells))
    overall = {
        region: _cell(compliant, applicable_count, thresholds)
        for region, (compliant, applicable_count) in totals.items()
    }
    return ScoreCard(
        assessment_id=assessment.id,
        template_name=template.name,
        template_version=template.version,
        regions=assessment.profile.regions,
        thresholds=thresholds,
        categories=tuple(rows),
        overall=overall,
    )


def gate_passed(scorecard: ScoreCard, region: str) -> bool:
    """True when the region's overall score is 100, which (by the reserved
    endpoints of score_percent) happens exactly when every applicable
    checkpoint is Compliant.  A region with nothing applicable passes
    vacuously."""
    if region not in scorecard.overall:
        raise UnknownRegion(f"region {region!r} is not on this scorecard")
    cell = scorecard.overall[region]
    return cell.compliant == cell.applicable


def scorecard_to_doc(scorecard: ScoreCard) -> dict[str, Any]:
    def cell_doc(cell: CategoryCell) -> dict[str, Any]:
        return {
            "compliant": cell.compliant,
            "applicable": cell.applicable,
            "score": cell.score,
            "color": cell.color.value,
        }

    return {
        "assessment_id": scorecard.assessment_id,
        "template": {
            "name": scorecard.template_name,
            "version": scorecard.template_version,
        },
        "regions": list(scorecard.regions),
        "thresholds": {
            "green_min": scorecard.thresholds.green_min,
            "yellow_min": scorecard.thresholds.yellow_min,
        },
        "overall": {r: cell_doc(scorecard.overall[r]) for r in scorecard.regions},
        "categories": [
            {
                "key": row.key,
                "name": row.name,
                "cells": {r: cell_doc(row.cells[r]) for r in scorecard.regions},
            }
            for row in scorecard.categories
        ],
        "gate_passed": {
            r: gate_passed(scorecard, r) for r in scorecard.regions
        },
    }


def _format_cell(cell: CategoryCell) -> str:
    return "N/A" if cell.score is None else f"{cell.score}%"


def scorecard_to_csv(scorecard: ScoreCard) -> str:
    """Tabular export: header, an Overall row, then one row per category.

    N/A cells stay literal, everything else is an integer percent.  This
    exact byte layout is a contract shared with the dashboard renderer.
    """
    import csv
    import io

    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["category", *scorecard.regions])
    writer.writerow(
        ["Overall", *(_format_cell(scorecard.overall[r]) for r in scorecard.regions)]
    )
    for row in scorecard.categories:
        writer.writerow(
            [row.name, *(_format_cell(row.cells[r]) for r in scorecard.regions)]
        )
    return buffer.getvalue()


@dataclass(frozen=True, slots=True)
class DensityReport:
    regions: int
    categories: int
    score_cells: int
    color_cells: int
    rolled_up_checkpoints: int

    @property
    def total(self) -> int:
        return (
            self.regions
            + self.categories
            + self.score_cells
            + self.color_cells
            + self.rolled_up_checkpoints
        )


def density_report(
    scorecard: ScoreCard,
    rolled_up: int | None = None,
    color_cells: int | None = None,
) -> DensityReport:
    """How many data points one dashboard rolls up.

    ``rolled_up`` defaults to the applicable-checkpoint count summed over
    regions; ``color_cells`` to the number of colored (non-grey) category
    cells.  Both stay overridable because published counts sometimes follow
    house rules this engine cannot reconstruct.
    """
    regions = len(scorecard.regions)
    categories = len(scorecard.categories)
    if rolled_up is None:
        rolled_up = sum(scorecard.overall[r].applicable for r in scorecard.regions)
    if color_cells is None:
        color_cells = sum(
            1
            for row in scorecard.categories
            for region in scorecard.regions
            if row.cells[region].color != CellColor.GREY
        )
    return DensityReport(
        regions=regions,
        categories=categories,
        score_cells=regions * categories,
        color_cells=color_cells,
        rolled_up_checkpoints=rolled_up,
    )


# --- migration ------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class MigrationReport:
    carried: tuple[str, ...]
    archived: tuple[str, ...]
    added: tuple[str, ...]

    @property
    def counts(self) -> tuple[int, int, int]:
        return len(self.carried), len(self.archived), len(self.added)


def migrate_answers(
    assessment: Assessment, new_template: ChecklistTemplate
) -> tuple[Assessment, MigrationReport]:
    """Move an assessment onto a newer version of its template.

    Answers whose checkpoints survive (and still apply) are carried verbatim;
    answers whose checkpoints were removed or fell out of applicability are
    archived, never deleted; new checkpoints start unanswered.  Migration is
    an answer-content mutation: revision bumps, sign-offs die.
    """
    old_template = assessment.template
    if new_template.name != old_template.name:
        raise TemplateMismatch(
            f"cannot migrate {old_template.name!r} onto {new_template.name!r}"
        )
    if version_key(new_template.version) < version_key(old_template.version):
        raise TemplateMismatch(
            f"cannot migrate backwards from {old_template.version} "
            f"to {new_template.version}"
        )
    if new_template.version == old_template.version and new_template == old_template:
        report = MigrationReport(
            carried=tuple(a.checkpoint_id for a in assessment.answers),
            archived=(),
            added=(),
        )
        return assessment, report
    if assessment.workflow.state not in EDITABLE_STATES:
        raise LockedState(
            f"cannot migrate in state {assessment.workflow.state.value}"
        )
    validate_profile(new_template.profile_schema, assessment.profile)
    new_applicable = applicable_set(new_template, assessment.profile)
    old_ids = {cp.id for cp in old_template.checkpoints()}
    new_ids = {cp.id for cp in new_template.checkpoints()}

    kept: list[Answer] = []
    shelved: list[Answer] = []
    for answer in assessment.answers:
        if answer.checkpoint_id in new_ids and answer.checkpoint_id in new_applicable:
            kept.append(answer)
        else:
            shelved.append(answer)
    report = MigrationReport(
        carried=tuple(a.checkpoint_id for a in kept),
        archived=tuple(a.checkpoint_id for a in shelved),
        added=tuple(sorted(new_ids - old_ids)),
    )
    new_revision = assessment.revision + 1
    migrated = replace(
        assessment,
        template=new_template,
        answers=tuple(kept),
        archived_answers=assessment.archived_answers + tuple(shelved),
        revision=new_revision,
        workflow=replace(assessment.workflow, signoffs=()),
        events_pending=assessment.events_pending
        + (
            {
                "kind": "migrated",
                "version": new_template.version,
                "revision": new_revision,
            },
        ),
    )
    return migrated, report
