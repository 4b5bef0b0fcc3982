from __future__ import annotations

from pathlib import Path

import pytest

from orr.assessment import (
    Answer,
    Assessment,
    CheckpointStatus,
    new_assessment,
    new_evidence,
    record_answer,
)
from orr.template import (
    AttributeSpec,
    Category,
    Checkpoint,
    ChecklistTemplate,
    ColorThresholds,
    ProfileSchema,
    ReleaseProfile,
)
from orr.workflow import ReleaseKind


def make_template(
    categories,
    attributes=(("flag", "boolean", ()),),
    name="tpl",
    version="1.0.0",
    thresholds=None,
):
    """Shorthand template builder.

    ``categories`` is a list of (key, name, applicability, checkpoint specs);
    each checkpoint spec is a slug string or a (slug, options) pair where
    options may set evidence_required / probe / applicability.
    """
    specs = tuple(
        AttributeSpec(name=n, kind=k, values=tuple(v)) for n, k, v in attributes
    )
    built = []
    for key, cat_name, applicability, checkpoints in categories:
        cps = []
        for spec in checkpoints:
            if isinstance(spec, str):
                slug, options = spec, {}
            else:
                slug, options = spec
            cps.append(
                Checkpoint(
                    id=f"{key}.{slug}",
                    prompt=options.get("prompt", f"{slug} done?"),
                    applicability=options.get("applicability", applicability),
                    evidence_required=options.get("evidence_required", False),
                    guidance=options.get("guidance", ""),
                    probe=options.get("probe"),
                )
            )
        built.append(Category(key=key, name=cat_name, checkpoints=tuple(cps)))
    return ChecklistTemplate(
        name=name,
        version=version,
        profile_schema=ProfileSchema(attributes=specs),
        thresholds=thresholds or ColorThresholds(),
        categories=tuple(built),
    )


def make_profile(regions=("r1",), release_kind=ReleaseKind.MAJOR_IMPLEMENTATION, **attrs):
    if not attrs:
        attrs = {"flag": True}
    return ReleaseProfile(
        attributes=attrs,
        regions=tuple(regions),
        release_kind=release_kind,
        application="test-app",
    )


@pytest.fixture
def golden_dir():
    return Path(__file__).parent / "golden"


@pytest.fixture
def tiny_template():
    return make_template(
        [
            ("base", "Base", "true", ["one", "two"]),
            ("extra", "Extra", "flag == true", ["three"]),
        ]
    )


@pytest.fixture
def tiny_assessment(tiny_template):
    return new_assessment("a-1", tiny_template, make_profile(regions=("r1", "r2")))


def answer(
    assessment: Assessment,
    checkpoint_id: str,
    region: str,
    status=CheckpointStatus.COMPLIANT,
    note="",
    by="tester",
    with_evidence=False,
) -> Assessment:
    evidence = None
    content = None
    if with_evidence:
        content = f"evidence for {checkpoint_id}".encode()
        evidence = new_evidence(content, "attestation", f"note for {checkpoint_id}")
    return record_answer(
        assessment,
        Answer(
            checkpoint_id=checkpoint_id,
            region=region,
            status=status,
            note=note,
            evidence=evidence,
            answered_by=by,
        ),
        evidence_content=content,
    )


def answer_everything(assessment: Assessment, status=CheckpointStatus.COMPLIANT):
    from orr.template import applicable_set

    live = applicable_set(assessment.template, assessment.profile)
    for checkpoint in assessment.template.checkpoints():
        if checkpoint.id not in live:
            continue
        for region in assessment.profile.regions:
            assessment = answer(
                assessment,
                checkpoint.id,
                region,
                status=status,
                with_evidence=checkpoint.evidence_required
                and status == CheckpointStatus.COMPLIANT,
            )
    return assessment
