"""Operational readiness reviews: branching checklists, scoring, governance."""

from .assessment import (
    Answer,
    Assessment,
    CellColor,
    CheckpointStatus,
    ScoreCard,
    compute_scorecard,
    density_report,
    gate_passed,
    migrate_answers,
    new_assessment,
    new_evidence,
    record_answer,
    run_all_probes,
    run_checkpoint_probe,
    scorecard_to_csv,
    score_percent,
)
from .builtin import builtin_template
from .comparator import compare, google_2016_reference, render_matrix
from .dashboard import build_dashboard, portfolio_rollup, render_dashboard
from .dsl import evaluate, parse_predicate, referenced_attributes, to_source
from .errors import (
    EvidenceMissing,
    GateNotMet,
    IllegalTransition,
    LockedState,
    NotApplicable,
    NotFound,
    OrrError,
    PredicateSyntaxError,
    RevisionConflict,
    RoleNotPermitted,
    SchemaError,
    StaleSignOff,
    TemplateMismatch,
    TemplateSyntaxError,
    UnknownAttribute,
    UnknownCheckpoint,
    UnknownRegion,
    UnsupportedFormat,
    VersionExists,
)
from .probes import ProbeKind, ProbeOutcome, ProbeResult, ProbeSpec, run_probe
from .repository import Repository
from .template import (
    ChecklistTemplate,
    Checkpoint,
    ReleaseProfile,
    applicable_set,
    diff_templates,
    parse_template,
    serialize_template,
    validate_profile,
    validate_template,
)
from .workflow import (
    ReleaseKind,
    ReviewPolicy,
    Role,
    WorkflowState,
    allowed_transitions,
    record_signoff,
    request_transition,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Assessment",
    "CellColor",
    "ChecklistTemplate",
    "Checkpoint",
    "CheckpointStatus",
    "EvidenceMissing",
    "GateNotMet",
    "IllegalTransition",
    "LockedState",
    "NotApplicable",
    "NotFound",
    "OrrError",
    "PredicateSyntaxError",
    "ProbeKind",
    "ProbeOutcome",
    "ProbeResult",
    "ProbeSpec",
    "ReleaseKind",
    "ReleaseProfile",
    "Repository",
    "ReviewPolicy",
    "RevisionConflict",
    "Role",
    "RoleNotPermitted",
    "SchemaError",
    "ScoreCard",
    "StaleSignOff",
    "TemplateMismatch",
    "TemplateSyntaxError",
    "UnknownAttribute",
    "UnknownCheckpoint",
    "UnknownRegion",
    "UnsupportedFormat",
    "VersionExists",
    "WorkflowState",
    "allowed_transitions",
    "applicable_set",
    "build_dashboard",
    "builtin_template",
    "compare",
    "compute_scorecard",
    "density_report",
    "diff_templates",
    "evaluate",
    "gate_passed",
    "google_2016_reference",
    "migrate_answers",
    "new_assessment",
    "new_evidence",
    "parse_predicate",
    "parse_template",
    "portfolio_rollup",
    "record_answer",
    "record_signoff",
    "referenced_attributes",
    "render_dashboard",
    "render_matrix",
    "request_transition",
    "run_all_probes",
    "run_checkpoint_probe",
    "run_probe",
    "score_percent",
    "scorecard_to_csv",
    "serialize_template",
    "to_source",
    "validate_profile",
    "validate_template",
    "__version__",
]
