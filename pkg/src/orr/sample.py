"""A fully-worked sample assessment over the stock template.

Five regions, mostly green with a handful of believable holes: the kind of
grid a programme reviews the week before go-live.  Demos, docs and golden
tests all build on this one so its numbers are fixed; change it and the
golden files move too.
"""

from __future__ import annotations

from .assessment import (
    Answer,
    Assessment,
    CheckpointStatus,
    new_assessment,
    new_evidence,
    record_answer,
)
from .builtin import builtin_template
from .template import ReleaseProfile, applicable_set
from .workflow import ReleaseKind

SAMPLE_ID = "sample-payments"
_STAMP = "2026-03-02T10:00:00.000000Z"

REGIONS = ("Region 1", "Region 2", "Region 3", "Region 4", "Region 5")

# Checkpoints deliberately left short of Compliant.  Everything else is green.
_GAPS: dict[str, tuple[CheckpointStatus | None, tuple[str, ...]]] = {
    # go / no-go still pending everywhere
    "preconditions.exit_criteria": (CheckpointStatus.NON_COMPLIANT, REGIONS),
    # load test still running everywhere
    "capacity.load_test": (CheckpointStatus.IN_PROGRESS, REGIONS),
    # firewall verification failed everywhere
    "network.firewall_rules": (CheckpointStatus.NON_COMPLIANT, REGIONS),
    # pen test simply not answered yet (None = leave unanswered)
    "infosec.pen_test": (None, REGIONS),
    # backpressure verification failed in the first region only
    "touchpoints.backpressure": (CheckpointStatus.NON_COMPLIANT, ("Region 1",)),
    # handover finished in the first region, open in the rest
    "support.handover_done": (
        CheckpointStatus.NON_COMPLIANT,
        ("Region 2", "Region 3", "Region 4", "Region 5"),
    ),
}


def sample_profile() -> ReleaseProfile:
    return ReleaseProfile(
        attributes={
            "has_batch": False,
            "has_streaming": False,
            "hosting": "datacenter",
        },
        regions=REGIONS,
        release_kind=ReleaseKind.MAJOR_IMPLEMENTATION,
        application="global-payments",
    )


def sample_assessment() -> Assessment:
    template = builtin_template()
    assessment = new_assessment(SAMPLE_ID, template, sample_profile(), created_at=_STAMP)
    applicable = applicable_set(template, assessment.profile)
    for checkpoint in template.checkpoints():
        if checkpoint.id not in applicable:
            continue
        for region in REGIONS:
            status = CheckpointStatus.COMPLIANT
            if checkpoint.id in _GAPS:
                gap_status, gap_regions = _GAPS[checkpoint.id]
                if region in gap_regions:
                    if gap_status is None:
                        continue
                    status = gap_status
            evidence = None
            content = None
            if status == CheckpointStatus.COMPLIANT and checkpoint.evidence_required:
                content = (
                    f"attestation for {checkpoint.id} in {region}: "
                    f"{checkpoint.prompt}\n"
                ).encode("utf-8")
                evidence = new_evidence(
                    content,
                    source="attestation",
                    description=f"sign-off note for {checkpoint.id}",
                    captured_at=_STAMP,
                )
            assessment = record_answer(
                assessment,
                Answer(
                    checkpoint_id=checkpoint.id,
                    region=region,
                    status=status,
                    evidence=evidence,
                    answered_by="sample.loader",
                    answered_at=_STAMP,
                ),
                evidence_content=content,
            )
    return assessment
