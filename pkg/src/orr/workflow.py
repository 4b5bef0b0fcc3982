"""Release governance: roles, workflow states, sign-offs, transitions.

The workflow is a fixed state machine.  Every edge is owned by exactly one
role, and the Approved edge additionally demands a clean scorecard (100% in
every region) plus current sign-offs from both the change owner and the
change manager.  Sign-offs are pinned to the assessment revision they were
made against and die the moment an answer changes.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import TYPE_CHECKING

from .errors import (
    GateNotMet,
    IllegalTransition,
    RoleNotPermitted,
    SchemaError,
    StaleSignOff,
)

if TYPE_CHECKING:  # pragma: no cover - import cycle guard, types only
    from .assessment import Assessment


class Role(str, Enum):
    CHANGE_OWNER = "ChangeOwner"
    CHANGE_MANAGER = "ChangeManager"
    LEADERSHIP_AUTHORIZER = "LeadershipAuthorizer"
    OBSERVER = "Observer"


class WorkflowState(str, Enum):
    DRAFT = "Draft"
    SELF_ASSESSMENT = "SelfAssessment"
    SUBMITTED = "Submitted"
    UNDER_REVIEW = "UnderReview"
    CHANGES_REQUESTED = "ChangesRequested"
    APPROVED = "Approved"
    RELEASED = "Released"
    WITHDRAWN = "Withdrawn"


class ReleaseKind(str, Enum):
    MAJOR_IMPLEMENTATION = "MajorImplementation"
    ONBOARDING = "Onboarding"
    HOSTING_TRANSITION = "HostingTransition"
    SIGNIFICANT_CHANGE = "SignificantChange"
    MINOR_ENHANCEMENT = "MinorEnhancement"
    HOTFIX = "Hotfix"


class ReviewPolicy(str, Enum):
    REQUIRED = "Required"
    OPTIONAL = "Optional"


TERMINAL_STATES = frozenset({WorkflowState.RELEASED, WorkflowState.WITHDRAWN})

# States in which answer content may still change.
EDITABLE_STATES = frozenset(
    {
        WorkflowState.DRAFT,
        WorkflowState.SELF_ASSESSMENT,
        WorkflowState.CHANGES_REQUESTED,
    }
)

# States in which owner / manager attestations are collected.
SIGNOFF_STATES = frozenset({WorkflowState.SUBMITTED, WorkflowState.UNDER_REVIEW})

_OPTIONAL_REVIEW_KINDS = frozenset(
    {ReleaseKind.MINOR_ENHANCEMENT, ReleaseKind.HOTFIX}
)


def applicability_policy(kind: ReleaseKind) -> ReviewPolicy:
    """Whether a review is mandatory for this kind of release."""
    if kind in _OPTIONAL_REVIEW_KINDS:
        return ReviewPolicy.OPTIONAL
    return ReviewPolicy.REQUIRED


def _build_transition_table() -> dict[tuple[WorkflowState, WorkflowState], Role]:
    s = WorkflowState
    r = Role
    table = {
        (s.DRAFT, s.SELF_ASSESSMENT): r.CHANGE_OWNER,
        (s.SELF_ASSESSMENT, s.SUBMITTED): r.CHANGE_OWNER,
        (s.SUBMITTED, s.UNDER_REVIEW): r.CHANGE_MANAGER,
        (s.UNDER_REVIEW, s.CHANGES_REQUESTED): r.CHANGE_MANAGER,
        (s.CHANGES_REQUESTED, s.SELF_ASSESSMENT): r.CHANGE_OWNER,
        (s.UNDER_REVIEW, s.APPROVED): r.LEADERSHIP_AUTHORIZER,
        (s.APPROVED, s.RELEASED): r.CHANGE_MANAGER,
    }
    for state in s:
        if state not in TERMINAL_STATES:
            table[(state, s.WITHDRAWN)] = r.CHANGE_OWNER
    return table


TRANSITIONS = _build_transition_table()


def allowed_transitions(state: WorkflowState, role: Role) -> set[WorkflowState]:
    """Target states this role may move to from the given state."""
    return {
        target
        for (source, target), owner in TRANSITIONS.items()
        if source == state and owner == role
    }


@dataclass(frozen=True, slots=True)
class SignOff:
    role: Role
    actor: str
    at: str  # ISO-8601 UTC
    revision: int


@dataclass(frozen=True, slots=True)
class TransitionRecord:
    source: WorkflowState
    target: WorkflowState
    actor: str
    role: Role
    at: str
    reason: str = ""


@dataclass(frozen=True, slots=True)
class WorkflowRecord:
    state: WorkflowState = WorkflowState.DRAFT
    signoffs: tuple[SignOff, ...] = ()
    history: tuple[TransitionRecord, ...] = ()

    def __post_init__(self) -> None:
        cursor = WorkflowState.DRAFT
        for entry in self.history:
            if entry.source != cursor:
                raise SchemaError(
                    f"workflow history broken: expected step from {cursor.value}, "
                    f"found {entry.source.value} -> {entry.target.value}"
                )
            cursor = entry.target
        if cursor != self.state:
            raise SchemaError(
                f"workflow history replays to {cursor.value}, "
                f"record claims {self.state.value}"
            )

    def signoff_for(self, role: Role) -> SignOff | None:
        for signoff in self.signoffs:
            if signoff.role == role:
                return signoff
        return None


def now_utc() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def record_signoff(
    assessment: "Assessment",
    role: Role,
    actor: str,
    at: str | None = None,
) -> "Assessment":
    """Attach a role's attestation at the assessment's current revision.

    Only the change owner and change manager sign; leadership expresses its
    view through the Approved transition.  Re-signing replaces the earlier
    sign-off by the same role.
    """
    if role not in (Role.CHANGE_OWNER, Role.CHANGE_MANAGER):
        raise RoleNotPermitted(f"{role.value} does not record sign-offs")
    state = assessment.workflow.state
    if state not in SIGNOFF_STATES:
        raise IllegalTransition(
            f"sign-offs are collected in Submitted or UnderReview, not {state.value}"
        )
    signoff = SignOff(
        role=role,
        actor=actor,
        at=at or now_utc(),
        revision=assessment.revision,
    )
    kept = tuple(s for s in assessment.workflow.signoffs if s.role != role)
    record = replace(assessment.workflow, signoffs=kept + (signoff,))
    return assessment._with_workflow(
        record,
        event={
            "kind": "signoff",
            "role": role.value,
            "actor": actor,
            "at": signoff.at,
            "revision": signoff.revision,
        },
    )


def _check_approval_requirements(assessment: "Assessment") -> None:
    from .assessment import compute_scorecard, gate_passed

    scorecard = compute_scorecard(assessment)
    shortfalls: dict[str, list[tuple[str, int]]] = {}
    for region in scorecard.regions:
        if gate_passed(scorecard, region):
            continue
        shortfalls[region] = [
            (row.name, row.cells[region].score)
            for row in scorecard.categories
            if row.cells[region].score is not None
            and row.cells[region].score < 100
        ]
    if shortfalls:
        raise GateNotMet(shortfalls)
    for role in (Role.CHANGE_OWNER, Role.CHANGE_MANAGER):
        signoff = assessment.workflow.signoff_for(role)
        if signoff is None:
            raise StaleSignOff(f"no sign-off from {role.value} on record")
        if signoff.revision != assessment.revision:
            raise StaleSignOff(
                f"{role.value} signed revision {signoff.revision}, "
                f"assessment is at revision {assessment.revision}"
            )


def request_transition(
    assessment: "Assessment",
    target: WorkflowState,
    actor: str,
    role: Role,
    reason: str = "",
    at: str | None = None,
) -> "Assessment":
    """Move the workflow along one edge of the transition table.

    Raises IllegalTransition for a missing edge, RoleNotPermitted when the
    edge belongs to a different role, and for Approved enforces the readiness
    gate (GateNotMet) and fresh dual sign-offs (StaleSignOff).
    """
    state = assessment.workflow.state
    edge = (state, target)
    if edge not in TRANSITIONS:
        raise IllegalTransition(f"no transition {state.value} -> {target.value}")
    owner = TRANSITIONS[edge]
    if role != owner:
        raise RoleNotPermitted(
            f"{state.value} -> {target.value} belongs to {owner.value}, "
            f"requested as {role.value}"
        )
    if target == WorkflowState.APPROVED:
        _check_approval_requirements(assessment)
    entry = TransitionRecord(
        source=state,
        target=target,
        actor=actor,
        role=role,
        at=at or now_utc(),
        reason=reason,
    )
    record = replace(
        assessment.workflow,
        state=target,
        history=assessment.workflow.history + (entry,),
    )
    return assessment._with_workflow(
        record,
        event={
            "kind": "transition",
            "source": state.value,
            "target": target.value,
            "actor": actor,
            "role": role.value,
            "at": entry.at,
            "reason": reason,
        },
    )
