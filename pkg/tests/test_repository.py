from __future__ import annotations

import json
import random

import pytest

import orr.repository as repository_module
from orr.assessment import (
    CheckpointStatus,
    migrate_answers,
    new_assessment,
)
from orr.builtin import builtin_template
from orr.errors import (
    NotFound,
    RevisionConflict,
    SchemaError,
    VersionExists,
)
from orr.repository import MUTATING_EVENT_KINDS, Repository
from orr.template import applicable_set, serialize_template
from orr.workflow import Role, WorkflowState, record_signoff, request_transition

from conftest import answer, make_profile, make_template


@pytest.fixture()
def repo(tmp_path):
    return Repository(tmp_path / "store")


@pytest.fixture()
def bare_repo(tmp_path):
    return Repository(tmp_path / "bare", seed=False)


def stored_template(repo, **kwargs):
    template = make_template(
        [("base", "Base", "true", ["one", "two"])],
        **kwargs,
    )
    repo.put_template(template)
    return template


# --- seeding -------------------------------------------------------------------------

def test_fresh_repository_is_usable_out_of_the_box(repo):
    names = {name for name, _ in repo.list_templates()}
    assert "global-orr" in names
    assert "google-2016" in repo.list_references()
    assert "sample-payments" in repo.list_assessments()
    # the seeded sample holds the full worked example
    sample = repo.load_assessment("sample-payments")
    assert len(sample.profile.regions) == 5


def test_seeding_is_idempotent(tmp_path):
    first = Repository(tmp_path / "store")
    sample_before = (
        first._snapshot_path("sample-payments").read_bytes()
    )
    again = Repository(tmp_path / "store")
    assert again.list_assessments() == first.list_assessments()
    assert again._snapshot_path("sample-payments").read_bytes() == sample_before


def test_unseeded_repository_starts_empty(bare_repo):
    assert bare_repo.list_templates() == []
    assert bare_repo.list_assessments() == []
    assert bare_repo.list_references() == []


# --- templates ------------------------------------------------------------------------

def test_template_versions_are_immutable(bare_repo):
    template = stored_template(bare_repo)
    with pytest.raises(VersionExists, match="immutable"):
        bare_repo.put_template(template)
    # even a different body under the same ref is refused
    reworded = make_template(
        [("base", "Base", "true", ["one", "two", "three"])],
    )
    with pytest.raises(VersionExists):
        bare_repo.put_template(reworded)


def test_invalid_template_ingest_stores_nothing(bare_repo):
    bad = {"name": "x", "version": "1.0.0"}  # no categories, schema incomplete
    with pytest.raises((SchemaError, Exception)):
        bare_repo.ingest_template(json.dumps(bad).encode())
    assert bare_repo.list_templates() == []


def test_template_with_validation_errors_refused(bare_repo):
    template = make_template(
        [("base", "Base", "ghost == true", ["one"])],  # ghost is undeclared
    )
    with pytest.raises(SchemaError, match="validate"):
        bare_repo.put_template(template)
    assert bare_repo.list_templates() == []


def test_ingest_round_trips_bytes(bare_repo):
    template = make_template([("base", "Base", "true", ["one"])])
    stored = bare_repo.ingest_template(serialize_template(template))
    assert stored == template
    assert bare_repo.get_template("tpl", "1.0.0") == template


def test_latest_version_uses_numeric_order(bare_repo):
    for version in ("0.9.0", "0.10.0", "1.0.0"):
        stored_template(bare_repo, version=version)
    assert bare_repo.latest_version("tpl") == "1.0.0"
    assert [v for _, v in bare_repo.list_templates()] == [
        "0.9.0",
        "0.10.0",
        "1.0.0",
    ]
    assert bare_repo.resolve_template("tpl").version == "1.0.0"
    assert bare_repo.resolve_template("tpl@0.9.0").version == "0.9.0"


def test_missing_template_lookup(bare_repo):
    with pytest.raises(NotFound):
        bare_repo.get_template("nope", "1.0.0")
    with pytest.raises(NotFound):
        bare_repo.latest_version("nope")


# --- assessments ----------------------------------------------------------------------

def test_create_save_load_round_trip(bare_repo):
    template = stored_template(bare_repo)
    created = bare_repo.create_assessment(
        template, make_profile(regions=("r1", "r2")), "round-trip"
    )
    assert created.events_pending == ()  # drained after persisting
    mutated = answer(created, "base.one", "r1")
    saved = bare_repo.save_assessment(mutated, expected_revision=created.revision)
    loaded = bare_repo.load_assessment("round-trip")
    assert loaded == saved
    assert loaded.revision == 2
    assert loaded.answer_for("base.one", "r1").status == CheckpointStatus.COMPLIANT


def test_create_requires_the_stored_template(bare_repo):
    stored_template(bare_repo)
    lookalike = make_template(
        [("base", "Base", "true", ["one", "two", "different"])],
    )
    with pytest.raises(SchemaError, match="differs"):
        bare_repo.create_assessment(lookalike, make_profile())


def test_unsafe_identifiers_never_touch_the_filesystem(bare_repo):
    template = stored_template(bare_repo)
    for bad_id in ("../evil", ".hidden", "a b", "a/b"):
        with pytest.raises(SchemaError, match="safe identifier"):
            bare_repo.create_assessment(template, make_profile(), bad_id)
    assert bare_repo.list_assessments() == []


def test_omitted_id_gets_generated(bare_repo):
    template = stored_template(bare_repo)
    created = bare_repo.create_assessment(template, make_profile())
    assert created.id.startswith("orr-")
    assert bare_repo.list_assessments() == [created.id]


def test_missing_assessment(bare_repo):
    with pytest.raises(NotFound):
        bare_repo.load_assessment("ghost")
    with pytest.raises(NotFound):
        bare_repo.events("ghost")


def test_two_writers_one_wins(bare_repo):
    template = stored_template(bare_repo)
    base = bare_repo.create_assessment(template, make_profile(), "race")
    left = answer(base, "base.one", "r1")
    right = answer(base, "base.two", "r1")
    bare_repo.save_assessment(left, expected_revision=base.revision)
    with pytest.raises(RevisionConflict) as info:
        bare_repo.save_assessment(right, expected_revision=base.revision)
    assert info.value.expected == 1
    assert info.value.actual == 2
    # the losing write changed nothing
    current = bare_repo.load_assessment("race")
    assert current.answer_for("base.two", "r1") is None


def test_create_over_existing_id_conflicts(bare_repo):
    template = stored_template(bare_repo)
    bare_repo.create_assessment(template, make_profile(), "dup")
    with pytest.raises(RevisionConflict):
        bare_repo.create_assessment(template, make_profile(), "dup")


# --- crash consistency -------------------------------------------------------------------

def test_torn_snapshot_write_leaves_the_store_recoverable(bare_repo, monkeypatch):
    template = stored_template(bare_repo)
    created = bare_repo.create_assessment(template, make_profile(), "torn")
    snapshot_before = bare_repo._snapshot_path("torn").read_bytes()

    real_replace = repository_module.os.replace

    def explode(src, dst):
        raise OSError("simulated power cut")

    mutated = answer(created, "base.one", "r1")
    monkeypatch.setattr(repository_module.os, "replace", explode)
    with pytest.raises(OSError):
        bare_repo.save_assessment(mutated, expected_revision=created.revision)
    monkeypatch.setattr(repository_module.os, "replace", real_replace)

    # snapshot is untouched and parses; the log ran exactly one step ahead
    assert bare_repo._snapshot_path("torn").read_bytes() == snapshot_before
    stale = bare_repo.load_assessment("torn")
    assert stale.revision == 1
    replayed = bare_repo.replay_assessment("torn")
    assert replayed.revision == 2
    assert replayed.answer_for("base.one", "r1") is not None
    # recovery: persist the replayed state over the stale snapshot
    bare_repo.save_assessment(replayed, expected_revision=stale.revision)
    assert bare_repo.load_assessment("torn") == replayed
    assert bare_repo.verify_assessment("torn")


def test_no_temp_litter_after_torn_write(bare_repo, monkeypatch):
    template = stored_template(bare_repo)
    created = bare_repo.create_assessment(template, make_profile(), "tidy")

    def explode(src, dst):
        raise OSError("simulated power cut")

    monkeypatch.setattr(repository_module.os, "replace", explode)
    with pytest.raises(OSError):
        bare_repo.save_assessment(
            answer(created, "base.one", "r1"), expected_revision=1
        )
    monkeypatch.undo()
    leftovers = list(bare_repo._assessment_dir("tidy").glob("*.tmp.*"))
    assert leftovers == []


# --- event log and replay -------------------------------------------------------------------

def test_replay_matches_snapshot_after_a_realistic_history(bare_repo):
    template = stored_template(bare_repo)
    assessment = bare_repo.create_assessment(
        template, make_profile(regions=("r1",)), "story"
    )
    assessment = answer(assessment, "base.one", "r1")
    assessment = answer(assessment, "base.two", "r1")
    assessment = request_transition(
        assessment, WorkflowState.SELF_ASSESSMENT, "olivia", Role.CHANGE_OWNER
    )
    assessment = request_transition(
        assessment, WorkflowState.SUBMITTED, "olivia", Role.CHANGE_OWNER
    )
    assessment = record_signoff(assessment, Role.CHANGE_OWNER, "olivia")
    assessment = bare_repo.save_assessment(assessment, expected_revision=1)

    assert bare_repo.verify_assessment("story")
    assert bare_repo.replay_assessment("story") == bare_repo.load_assessment("story")


def test_replay_covers_migration(bare_repo):
    old = stored_template(bare_repo)
    new = make_template(
        [("base", "Base", "true", ["one", "three"])], version="1.1.0"
    )
    bare_repo.put_template(new)
    assessment = bare_repo.create_assessment(old, make_profile(), "moving")
    assessment = answer(assessment, "base.one", "r1")
    assessment, _report = migrate_answers(assessment, new)
    bare_repo.save_assessment(assessment, expected_revision=1)

    assert bare_repo.verify_assessment("moving")
    replayed = bare_repo.replay_assessment("moving")
    assert replayed.template.version == "1.1.0"
    assert [a.checkpoint_id for a in replayed.archived_answers] == []
    assert replayed.answer_for("base.one", "r1") is not None


def test_revision_counts_mutating_events_only(bare_repo):
    template = stored_template(bare_repo)
    assessment = bare_repo.create_assessment(template, make_profile(), "counted")
    assessment = answer(assessment, "base.one", "r1")
    assessment = answer(assessment, "base.one", "r1", status=CheckpointStatus.IN_PROGRESS)
    assessment = request_transition(
        assessment, WorkflowState.SELF_ASSESSMENT, "o", Role.CHANGE_OWNER
    )
    bare_repo.save_assessment(assessment, expected_revision=1)
    events = bare_repo.events("counted")
    mutations = sum(1 for e in events if e["kind"] in MUTATING_EVENT_KINDS)
    assert mutations == 2
    assert bare_repo.load_assessment("counted").revision == 1 + mutations
    kinds = [e["kind"] for e in events]
    assert kinds[0] == "created"
    assert kinds.count("transition") == 1


def test_replay_refuses_a_log_missing_creation(bare_repo):
    template = stored_template(bare_repo)
    bare_repo.create_assessment(template, make_profile(), "hollow")
    log = bare_repo._events_path("hollow")
    log.write_text('{"kind": "answer"}\n')
    with pytest.raises(SchemaError, match="creation"):
        bare_repo.replay_assessment("hollow")


def test_replay_refuses_unknown_event_kinds(bare_repo):
    template = stored_template(bare_repo)
    bare_repo.create_assessment(template, make_profile(), "odd")
    with open(bare_repo._events_path("odd"), "a") as handle:
        handle.write('{"kind": "mystery"}\n')
    with pytest.raises(SchemaError, match="mystery"):
        bare_repo.replay_assessment("odd")


# --- randomized histories --------------------------------------------------------------------

def _random_walk(repo, rng, walk_id):
    """Drive one assessment through a random but legal sequence of writes."""
    template = repo.resolve_template("walk-tpl")
    regions = ("east", "west")
    assessment = repo.create_assessment(
        template, make_profile(regions=regions), walk_id
    )
    expected = assessment.revision
    live = sorted(applicable_set(template, assessment.profile))
    statuses = list(CheckpointStatus)

    for _ in range(rng.randint(1, 10)):
        move = rng.random()
        if move < 0.6:
            assessment = answer(
                assessment,
                rng.choice(live),
                rng.choice(regions),
                status=rng.choice(statuses),
            )
        elif move < 0.8 and assessment.workflow.state == WorkflowState.DRAFT:
            assessment = request_transition(
                assessment,
                WorkflowState.SELF_ASSESSMENT,
                "owner",
                Role.CHANGE_OWNER,
            )
        elif assessment.workflow.state == WorkflowState.SELF_ASSESSMENT:
            assessment = request_transition(
                assessment, WorkflowState.SUBMITTED, "owner", Role.CHANGE_OWNER
            )
            assessment = record_signoff(assessment, Role.CHANGE_OWNER, "owner")
            break  # answers are frozen from here on
        if rng.random() < 0.4:
            assessment = repo.save_assessment(assessment, expected_revision=expected)
            expected = assessment.revision
    if assessment.events_pending:
        repo.save_assessment(assessment, expected_revision=expected)


def test_a_hundred_random_histories_replay_exactly(bare_repo):
    bare_repo.put_template(
        make_template(
            [
                ("base", "Base", "true", ["one", "two"]),
                ("extra", "Extra", "flag == true", ["three"]),
            ],
            name="walk-tpl",
        )
    )
    rng = random.Random(20260814)
    for index in range(100):
        walk_id = f"walk-{index:03d}"
        _random_walk(bare_repo, rng, walk_id)
        assert bare_repo.verify_assessment(walk_id), walk_id


# --- evidence --------------------------------------------------------------------------------

def test_evidence_blobs_land_beside_the_answers(bare_repo):
    template = make_template(
        [("base", "Base", "true", [("one", {"evidence_required": True})])],
        name="ev-tpl",
    )
    bare_repo.put_template(template)
    assessment = bare_repo.create_assessment(template, make_profile(), "ev")
    assessment = answer(assessment, "base.one", "r1", with_evidence=True)
    stored = assessment.answer_for("base.one", "r1")
    bare_repo.save_assessment(assessment, expected_revision=1)

    blob = bare_repo.read_evidence("ev", stored.evidence.id)
    import hashlib

    assert hashlib.sha256(blob).hexdigest() == stored.evidence.digest


def test_missing_evidence_lookup(bare_repo):
    with pytest.raises(NotFound):
        bare_repo.read_evidence("nope", "deadbeef")
    with pytest.raises(SchemaError):
        bare_repo.read_evidence("nope", "../escape")


def test_evidence_ids_are_checked_on_write(bare_repo):
    with pytest.raises(SchemaError):
        bare_repo.store_evidence("a", "../up", b"x")


# --- references ------------------------------------------------------------------------------

def test_reference_round_trip_through_store(bare_repo):
    from orr.comparator import google_2016_reference

    framework = google_2016_reference()
    bare_repo.put_reference(framework)
    assert bare_repo.get_reference(framework.name) == framework
    assert bare_repo.list_references() == [framework.name]
    with pytest.raises(NotFound):
        bare_repo.get_reference("missing")


def test_corrupt_reference_is_reported(bare_repo):
    bad = bare_repo.root / "references" / "junk.json"
    bad.write_text("{nope")
    with pytest.raises(SchemaError, match="JSON"):
        bare_repo.get_reference("junk")


def test_corrupt_snapshot_is_reported(bare_repo):
    template = stored_template(bare_repo)
    bare_repo.create_assessment(template, make_profile(), "mangled")
    bare_repo._snapshot_path("mangled").write_text("{truncated")
    with pytest.raises(SchemaError, match="corrupt"):
        bare_repo.load_assessment("mangled")


def test_list_assessments_skips_stray_directories(bare_repo):
    (bare_repo.root / "assessments" / "not-one").mkdir()
    assert bare_repo.list_assessments() == []
