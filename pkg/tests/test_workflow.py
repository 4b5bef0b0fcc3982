from __future__ import annotations

import itertools
import time

import pytest

from orr.assessment import CheckpointStatus, new_assessment
from orr.errors import (
    GateNotMet,
    IllegalTransition,
    LockedState,
    RoleNotPermitted,
    SchemaError,
    StaleSignOff,
)
from orr.workflow import (
    EDITABLE_STATES,
    SIGNOFF_STATES,
    TERMINAL_STATES,
    TRANSITIONS,
    ReleaseKind,
    ReviewPolicy,
    Role,
    SignOff,
    WorkflowRecord,
    WorkflowState,
    allowed_transitions,
    applicability_policy,
    record_signoff,
    request_transition,
)

from conftest import answer, answer_everything, make_profile, make_template
from scenarios import run_gate_soundness, try_approve, walk_to_under_review

S = WorkflowState
R = Role

# The whole governance contract, restated by hand.  Each edge maps to the one
# role allowed to drive it.
EXPECTED_TABLE = {
    (S.DRAFT, S.SELF_ASSESSMENT): R.CHANGE_OWNER,
    (S.SELF_ASSESSMENT, S.SUBMITTED): R.CHANGE_OWNER,
    (S.SUBMITTED, S.UNDER_REVIEW): R.CHANGE_MANAGER,
    (S.UNDER_REVIEW, S.CHANGES_REQUESTED): R.CHANGE_MANAGER,
    (S.CHANGES_REQUESTED, S.SELF_ASSESSMENT): R.CHANGE_OWNER,
    (S.UNDER_REVIEW, S.APPROVED): R.LEADERSHIP_AUTHORIZER,
    (S.APPROVED, S.RELEASED): R.CHANGE_MANAGER,
    (S.DRAFT, S.WITHDRAWN): R.CHANGE_OWNER,
    (S.SELF_ASSESSMENT, S.WITHDRAWN): R.CHANGE_OWNER,
    (S.SUBMITTED, S.WITHDRAWN): R.CHANGE_OWNER,
    (S.UNDER_REVIEW, S.WITHDRAWN): R.CHANGE_OWNER,
    (S.CHANGES_REQUESTED, S.WITHDRAWN): R.CHANGE_OWNER,
    (S.APPROVED, S.WITHDRAWN): R.CHANGE_OWNER,
}


def test_transition_table_is_exactly_the_contract():
    assert TRANSITIONS == EXPECTED_TABLE


def test_terminal_states_have_no_exits():
    for state in TERMINAL_STATES:
        assert not [edge for edge in TRANSITIONS if edge[0] == state]
        for role in Role:
            assert allowed_transitions(state, role) == set()


def test_allowed_transitions_by_role():
    assert allowed_transitions(S.DRAFT, R.CHANGE_OWNER) == {
        S.SELF_ASSESSMENT,
        S.WITHDRAWN,
    }
    assert allowed_transitions(S.DRAFT, R.CHANGE_MANAGER) == set()
    assert allowed_transitions(S.UNDER_REVIEW, R.LEADERSHIP_AUTHORIZER) == {S.APPROVED}
    assert allowed_transitions(S.UNDER_REVIEW, R.CHANGE_MANAGER) == {
        S.CHANGES_REQUESTED
    }
    assert allowed_transitions(S.APPROVED, R.CHANGE_MANAGER) == {S.RELEASED}
    for state in S:
        assert allowed_transitions(state, R.OBSERVER) == set()


def _draft(regions=("r1",)):
    template = make_template([("c", "C", "true", ["a", "b"])])
    return new_assessment("wf", template, make_profile(regions=regions))


def _in_state(state: WorkflowState):
    """A minimal fully-compliant assessment parked in the given state."""
    assessment = answer_everything(_draft())
    path = {
        S.DRAFT: [],
        S.SELF_ASSESSMENT: [(S.SELF_ASSESSMENT, R.CHANGE_OWNER)],
        S.SUBMITTED: [
            (S.SELF_ASSESSMENT, R.CHANGE_OWNER),
            (S.SUBMITTED, R.CHANGE_OWNER),
        ],
        S.UNDER_REVIEW: [
            (S.SELF_ASSESSMENT, R.CHANGE_OWNER),
            (S.SUBMITTED, R.CHANGE_OWNER),
            (S.UNDER_REVIEW, R.CHANGE_MANAGER),
        ],
        S.CHANGES_REQUESTED: [
            (S.SELF_ASSESSMENT, R.CHANGE_OWNER),
            (S.SUBMITTED, R.CHANGE_OWNER),
            (S.UNDER_REVIEW, R.CHANGE_MANAGER),
            (S.CHANGES_REQUESTED, R.CHANGE_MANAGER),
        ],
        S.WITHDRAWN: [(S.WITHDRAWN, R.CHANGE_OWNER)],
    }
    if state in path:
        for target, role in path[state]:
            assessment = request_transition(assessment, target, "x", role)
        return assessment
    # Approved / Released need the full ceremony
    assessment, landed = try_approve(assessment)
    assert landed
    if state == S.RELEASED:
        assessment = request_transition(assessment, S.RELEASED, "x", R.CHANGE_MANAGER)
    return assessment


def test_exhaustive_edge_enforcement():
    """Every (state, target, role) combination behaves per the table: absent
    edges refuse outright, present edges refuse the wrong role."""
    for state in S:
        assessment = _in_state(state)
        assert assessment.workflow.state == state
        for target, role in itertools.product(S, Role):
            edge = (state, target)
            if edge in EXPECTED_TABLE and role == EXPECTED_TABLE[edge]:
                continue  # legal; positive paths covered elsewhere
            if edge in EXPECTED_TABLE:
                with pytest.raises(RoleNotPermitted):
                    request_transition(assessment, target, "x", role)
            else:
                with pytest.raises(IllegalTransition):
                    request_transition(assessment, target, "x", role)


def test_full_happy_path_to_released():
    assessment = answer_everything(_draft(regions=("r1", "r2")))
    assessment, landed = try_approve(assessment)
    assert landed and assessment.workflow.state == S.APPROVED
    assessment = request_transition(assessment, S.RELEASED, "mgr", R.CHANGE_MANAGER)
    assert assessment.workflow.state == S.RELEASED
    sources = [t.source for t in assessment.workflow.history]
    targets = [t.target for t in assessment.workflow.history]
    assert sources == [S.DRAFT, S.SELF_ASSESSMENT, S.SUBMITTED, S.UNDER_REVIEW, S.APPROVED]
    assert targets == [S.SELF_ASSESSMENT, S.SUBMITTED, S.UNDER_REVIEW, S.APPROVED, S.RELEASED]


def test_withdraw_from_every_non_terminal():
    for state in S:
        if state in TERMINAL_STATES:
            continue
        assessment = _in_state(state)
        withdrawn = request_transition(assessment, S.WITHDRAWN, "owner", R.CHANGE_OWNER)
        assert withdrawn.workflow.state == S.WITHDRAWN
        with pytest.raises(RoleNotPermitted):
            request_transition(assessment, S.WITHDRAWN, "mgr", R.CHANGE_MANAGER)


# --- sign-offs -------------------------------------------------------------------------

def test_signoff_roles_restricted():
    assessment = _in_state(S.SUBMITTED)
    for role in (R.LEADERSHIP_AUTHORIZER, R.OBSERVER):
        with pytest.raises(RoleNotPermitted):
            record_signoff(assessment, role, "x")


def test_signoff_states_restricted():
    for state in (S.DRAFT, S.SELF_ASSESSMENT, S.CHANGES_REQUESTED, S.APPROVED):
        assessment = _in_state(state)
        with pytest.raises(IllegalTransition):
            record_signoff(assessment, R.CHANGE_OWNER, "x")
    for state in SIGNOFF_STATES:
        assessment = record_signoff(_in_state(state), R.CHANGE_OWNER, "x")
        assert assessment.workflow.signoff_for(R.CHANGE_OWNER) is not None


def test_signoff_rebinds_same_role():
    assessment = _in_state(S.SUBMITTED)
    assessment = record_signoff(assessment, R.CHANGE_OWNER, "first")
    assessment = record_signoff(assessment, R.CHANGE_OWNER, "second")
    assert len(assessment.workflow.signoffs) == 1
    assert assessment.workflow.signoff_for(R.CHANGE_OWNER).actor == "second"


def test_signoff_does_not_bump_revision():
    assessment = _in_state(S.SUBMITTED)
    before = assessment.revision
    assessment = record_signoff(assessment, R.CHANGE_OWNER, "x")
    assert assessment.revision == before
    signoff = assessment.workflow.signoff_for(R.CHANGE_OWNER)
    assert signoff.revision == before


def test_answer_mutation_wipes_signoffs():
    assessment = _in_state(S.SUBMITTED)
    assessment = record_signoff(assessment, R.CHANGE_OWNER, "x")
    assessment = record_signoff(assessment, R.CHANGE_MANAGER, "y")
    assessment = request_transition(
        assessment, S.UNDER_REVIEW, "m", R.CHANGE_MANAGER
    )
    assessment = request_transition(
        assessment, S.CHANGES_REQUESTED, "m", R.CHANGE_MANAGER
    )
    assert len(assessment.workflow.signoffs) == 2  # transitions keep them
    reworked = answer(
        assessment, "c.a", "r1", status=CheckpointStatus.NON_COMPLIANT
    )
    assert reworked.workflow.signoffs == ()
    assert reworked.revision == assessment.revision + 1


def test_edits_locked_outside_editable_states():
    for state in S:
        assessment = _in_state(state)
        if state in EDITABLE_STATES:
            answer(assessment, "c.a", "r1", status=CheckpointStatus.IN_PROGRESS)
        else:
            with pytest.raises(LockedState):
                answer(assessment, "c.a", "r1", status=CheckpointStatus.IN_PROGRESS)


# --- the approval gate -------------------------------------------------------------------

def test_approval_blocked_below_100():
    assessment = _draft(regions=("r1", "r2"))
    assessment = answer_everything(assessment)
    assessment = answer(
        assessment, "c.b", "r2", status=CheckpointStatus.IN_PROGRESS
    )
    assessment = walk_to_under_review(assessment)
    with pytest.raises(GateNotMet) as err:
        request_transition(assessment, S.APPROVED, "la", R.LEADERSHIP_AUTHORIZER)
    assert set(err.value.shortfalls) == {"r2"}
    assert err.value.shortfalls["r2"] == [("C", 50)]


def test_approval_blocked_without_owner_signoff():
    assessment = answer_everything(_draft())
    assessment = request_transition(assessment, S.SELF_ASSESSMENT, "o", R.CHANGE_OWNER)
    assessment = request_transition(assessment, S.SUBMITTED, "o", R.CHANGE_OWNER)
    assessment = request_transition(assessment, S.UNDER_REVIEW, "m", R.CHANGE_MANAGER)
    assessment = record_signoff(assessment, R.CHANGE_MANAGER, "m")
    with pytest.raises(StaleSignOff, match="ChangeOwner"):
        request_transition(assessment, S.APPROVED, "la", R.LEADERSHIP_AUTHORIZER)


def test_approval_blocked_without_manager_signoff():
    assessment = answer_everything(_draft())
    assessment = request_transition(assessment, S.SELF_ASSESSMENT, "o", R.CHANGE_OWNER)
    assessment = request_transition(assessment, S.SUBMITTED, "o", R.CHANGE_OWNER)
    assessment = record_signoff(assessment, R.CHANGE_OWNER, "o")
    assessment = request_transition(assessment, S.UNDER_REVIEW, "m", R.CHANGE_MANAGER)
    with pytest.raises(StaleSignOff, match="ChangeManager"):
        request_transition(assessment, S.APPROVED, "la", R.LEADERSHIP_AUTHORIZER)


def test_rework_invalidates_earlier_signoffs_for_approval():
    """After changes are requested and an answer edited, the earlier
    attestations are gone and approval refuses until both are re-recorded."""
    assessment = answer_everything(_draft())
    assessment = walk_to_under_review(assessment)
    assessment = request_transition(
        assessment, S.CHANGES_REQUESTED, "m", R.CHANGE_MANAGER
    )
    assessment = answer(assessment, "c.a", "r1", status=CheckpointStatus.COMPLIANT)
    assessment = request_transition(
        assessment, S.SELF_ASSESSMENT, "o", R.CHANGE_OWNER
    )
    assessment = request_transition(assessment, S.SUBMITTED, "o", R.CHANGE_OWNER)
    assessment = request_transition(assessment, S.UNDER_REVIEW, "m", R.CHANGE_MANAGER)
    with pytest.raises(StaleSignOff):
        request_transition(assessment, S.APPROVED, "la", R.LEADERSHIP_AUTHORIZER)


def test_vacuous_gate_passes():
    """Zero applicable checkpoints: nothing to fail, so the gate holds."""
    template = make_template([("c", "C", "flag == true", ["a"])])
    assessment = new_assessment("v", template, make_profile(flag=False))
    assessment, landed = try_approve(assessment)
    assert landed and assessment.workflow.state == S.APPROVED


def test_gate_shortfalls_have_no_na_rows():
    template = make_template(
        [("on", "On", "true", ["a"]), ("off", "Off", "flag == false", ["b"])]
    )
    assessment = new_assessment("g", template, make_profile(flag=True))
    assessment = walk_to_under_review(assessment)
    with pytest.raises(GateNotMet) as err:
        request_transition(assessment, S.APPROVED, "la", R.LEADERSHIP_AUTHORIZER)
    assert err.value.shortfalls == {"r1": [("On", 0)]}


def test_gate_soundness_randomized_under_30s():
    started = time.monotonic()
    run_gate_soundness(1000, seed=20260814)
    assert time.monotonic() - started < 30


# --- policies and records -----------------------------------------------------------------

def test_review_policy_by_release_kind():
    expected = {
        ReleaseKind.MAJOR_IMPLEMENTATION: ReviewPolicy.REQUIRED,
        ReleaseKind.ONBOARDING: ReviewPolicy.REQUIRED,
        ReleaseKind.HOSTING_TRANSITION: ReviewPolicy.REQUIRED,
        ReleaseKind.SIGNIFICANT_CHANGE: ReviewPolicy.REQUIRED,
        ReleaseKind.MINOR_ENHANCEMENT: ReviewPolicy.OPTIONAL,
        ReleaseKind.HOTFIX: ReviewPolicy.OPTIONAL,
    }
    assert {kind: applicability_policy(kind) for kind in ReleaseKind} == expected


def test_workflow_record_rejects_inconsistent_history():
    from orr.workflow import TransitionRecord

    bogus = TransitionRecord(
        source=S.SUBMITTED,
        target=S.UNDER_REVIEW,
        actor="x",
        role=R.CHANGE_MANAGER,
        at="2026-01-01T00:00:00.000000Z",
        reason="",
    )
    with pytest.raises(SchemaError):
        WorkflowRecord(state=S.UNDER_REVIEW, signoffs=(), history=(bogus,))


def test_workflow_record_rejects_wrong_final_state():
    from orr.workflow import TransitionRecord

    step = TransitionRecord(
        source=S.DRAFT,
        target=S.SELF_ASSESSMENT,
        actor="x",
        role=R.CHANGE_OWNER,
        at="2026-01-01T00:00:00.000000Z",
        reason="",
    )
    with pytest.raises(SchemaError):
        WorkflowRecord(state=S.SUBMITTED, signoffs=(), history=(step,))


def test_signoff_record_shape():
    signoff = SignOff(
        role=R.CHANGE_OWNER, actor="a", at="2026-01-01T00:00:00.000000Z", revision=3
    )
    assert signoff.role == R.CHANGE_OWNER
    assert signoff.revision == 3
