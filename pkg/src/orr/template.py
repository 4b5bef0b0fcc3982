"""Checklist templates: the versioned heart of a readiness review.

A template is a named, immutable, semver-versioned tree: categories holding
checkpoints, a schema for the release-profile attributes the branching rules
may reference, and the color thresholds used when scoring.  Structural rules
are enforced at construction so a template object in hand is always sound;
referential soundness of the branching rules (do they only mention declared
attributes, with type-correct literals) is reported by validate_template so
an author sees every problem in one pass.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from . import dsl
from .errors import SchemaError, TemplateSyntaxError
from .probes import ProbeSpec
from .workflow import ReleaseKind

_NAME_RE = re.compile(r"^[a-z0-9_.-]+$")
_VERSION_RE = re.compile(r"^\d+\.\d+\.\d+$")
_ATTRIBUTE_KINDS = ("boolean", "enum", "integer")


def version_key(version: str) -> tuple[int, int, int]:
    if not _VERSION_RE.match(version):
        raise SchemaError(f"version must look like MAJOR.MINOR.PATCH, got {version!r}")
    major, minor, patch = version.split(".")
    return int(major), int(minor), int(patch)


@dataclass(frozen=True, slots=True)
class AttributeSpec:
    name: str
    kind: str  # boolean / enum / integer
    values: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise SchemaError(f"bad attribute name {self.name!r}")
        if self.kind not in _ATTRIBUTE_KINDS:
            raise SchemaError(
                f"attribute {self.name!r} kind must be one of {_ATTRIBUTE_KINDS}"
            )
        if self.kind == "enum":
            if not self.values:
                raise SchemaError(f"enum attribute {self.name!r} needs values")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"enum attribute {self.name!r} repeats values")
        elif self.values:
            raise SchemaError(
                f"attribute {self.name!r} is {self.kind}, values make no sense"
            )

    def accepts(self, value: object) -> bool:
        if self.kind == "boolean":
            return isinstance(value, bool)
        if self.kind == "integer":
            return isinstance(value, int) and not isinstance(value, bool)
        return isinstance(value, str) and value in self.values


@dataclass(frozen=True, slots=True)
class ProfileSchema:
    attributes: tuple[AttributeSpec, ...] = ()

    def __post_init__(self) -> None:
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise SchemaError("profile schema repeats attribute names")

    def get(self, name: str) -> AttributeSpec | None:
        for attr in self.attributes:
            if attr.name == name:
                return attr
        return None


@dataclass(frozen=True, slots=True)
class ColorThresholds:
    green_min: int = 100
    yellow_min: int = 80

    def __post_init__(self) -> None:
        if not (0 < self.yellow_min <= self.green_min <= 100):
            raise SchemaError(
                "thresholds must satisfy 0 < yellow_min <= green_min <= 100, "
                f"got yellow_min={self.yellow_min} green_min={self.green_min}"
            )


@dataclass(frozen=True, slots=True)
class Checkpoint:
    id: str
    prompt: str
    applicability: str | None = None
    evidence_required: bool = False
    guidance: str = ""
    probe: ProbeSpec | None = None
    predicate: dsl.Predicate | None = field(
        init=False, compare=False, repr=False, default=None
    )

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.id):
            raise SchemaError(f"bad checkpoint id {self.id!r}")
        if not self.prompt.strip():
            raise SchemaError(f"checkpoint {self.id!r} has an empty prompt")
        if self.applicability is not None:
            # PredicateSyntaxError propagates with its offset intact.
            object.__setattr__(
                self, "predicate", dsl.parse_predicate(self.applicability)
            )


@dataclass(frozen=True, slots=True)
class Category:
    key: str
    name: str
    checkpoints: tuple[Checkpoint, ...] = ()

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.key):
            raise SchemaError(f"bad category key {self.key!r}")
        if not self.name.strip():
            raise SchemaError(f"category {self.key!r} has an empty name")


@dataclass(frozen=True, slots=True)
class ChecklistTemplate:
    name: str
    version: str
    profile_schema: ProfileSchema
    thresholds: ColorThresholds
    categories: tuple[Category, ...]

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise SchemaError(f"bad template name {self.name!r}")
        version_key(self.version)
        if not self.categories:
            raise SchemaError("template needs at least one category")
        keys = [c.key for c in self.categories]
        if len(set(keys)) != len(keys):
            raise SchemaError("category keys repeat")
        seen: set[str] = set()
        for checkpoint in self.checkpoints():
            if checkpoint.id in seen:
                raise SchemaError(f"checkpoint id {checkpoint.id!r} repeats")
            seen.add(checkpoint.id)

    def checkpoints(self) -> tuple[Checkpoint, ...]:
        return tuple(
            cp for category in self.categories for cp in category.checkpoints
        )

    def checkpoint(self, checkpoint_id: str) -> Checkpoint | None:
        for cp in self.checkpoints():
            if cp.id == checkpoint_id:
                return cp
        return None

    def category_of(self, checkpoint_id: str) -> Category | None:
        for category in self.categories:
            for cp in category.checkpoints:
                if cp.id == checkpoint_id:
                    return category
        return None

    @property
    def ref(self) -> str:
        return f"{self.name}@{self.version}"


@dataclass(frozen=True, slots=True)
class ReleaseProfile:
    attributes: Mapping[str, dsl.Value]
    regions: tuple[str, ...]
    release_kind: ReleaseKind
    application: str = ""

    def __post_init__(self) -> None:
        if not self.regions:
            raise SchemaError("profile needs at least one region")
        if len(set(self.regions)) != len(self.regions):
            raise SchemaError("profile repeats region names")
        for region in self.regions:
            if not region.strip():
                raise SchemaError("profile has a blank region name")

    def to_doc(self) -> dict[str, Any]:
        return {
            "attributes": dict(self.attributes),
            "regions": list(self.regions),
            "release_kind": self.release_kind.value,
            "application": self.application,
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "ReleaseProfile":
        try:
            kind = ReleaseKind(doc["release_kind"])
        except (KeyError, ValueError):
            raise SchemaError(
                "profile needs a release_kind out of "
                + ", ".join(k.value for k in ReleaseKind)
            ) from None
        attributes = doc.get("attributes", {})
        if not isinstance(attributes, dict):
            raise SchemaError("profile attributes must be an object")
        for name, value in attributes.items():
            if not isinstance(value, (bool, int, str)):
                raise SchemaError(
                    f"profile attribute {name!r} must be boolean, integer or string"
                )
        regions = doc.get("regions", [])
        if not isinstance(regions, list) or not all(
            isinstance(r, str) for r in regions
        ):
            raise SchemaError("profile regions must be a list of strings")
        return cls(
            attributes=dict(attributes),
            regions=tuple(regions),
            release_kind=kind,
            application=str(doc.get("application", "")),
        )


def validate_profile(
    schema: "ProfileSchema | ChecklistTemplate", profile: ReleaseProfile
) -> None:
    """Check a profile supplies exactly the declared attributes, well-typed."""
    if isinstance(schema, ChecklistTemplate):
        schema = schema.profile_schema
    declared = {a.name for a in schema.attributes}
    supplied = set(profile.attributes)
    missing = declared - supplied
    if missing:
        raise SchemaError(f"profile missing attributes: {sorted(missing)}")
    stray = supplied - declared
    if stray:
        raise SchemaError(f"profile has undeclared attributes: {sorted(stray)}")
    for attr in schema.attributes:
        value = profile.attributes[attr.name]
        if not attr.accepts(value):
            raise SchemaError(
                f"attribute {attr.name!r} expects {attr.kind}"
                + (f" out of {list(attr.values)}" if attr.kind == "enum" else "")
                + f", got {value!r}"
            )


def applicable_set(template: ChecklistTemplate, profile: ReleaseProfile) -> set[str]:
    """Checkpoint ids that apply to this release, per the branching rules.

    Applicability is profile-level: the same set holds for every region of
    the assessment.  Evaluation is strict, so an undeclared attribute in a
    predicate surfaces as UnknownAttribute rather than a silently absent
    checkpoint.
    """
    out: set[str] = set()
    for checkpoint in template.checkpoints():
        if checkpoint.predicate is None or dsl.evaluate(
            checkpoint.predicate, profile.attributes
        ):
            out.add(checkpoint.id)
    return out


# --- validation ------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ValidationIssue:
    severity: str  # "error" or "warning"
    where: str
    message: str


def _literal_issue(attr: AttributeSpec, value: dsl.Value) -> str | None:
    if attr.kind == "boolean" and not isinstance(value, bool):
        return f"compares boolean attribute {attr.name!r} to {value!r}"
    if attr.kind == "integer" and (
        isinstance(value, bool) or not isinstance(value, int)
    ):
        return f"compares integer attribute {attr.name!r} to {value!r}"
    if attr.kind == "enum":
        if not isinstance(value, str):
            return f"compares enum attribute {attr.name!r} to {value!r}"
        if value not in attr.values:
            return (
                f"enum attribute {attr.name!r} has no value {value!r} "
                f"(declared: {list(attr.values)})"
            )
    return None


def _predicate_literals(pred: dsl.Predicate) -> list[tuple[str, dsl.Value]]:
    if isinstance(pred, dsl.Compare):
        return [(pred.attribute, pred.value)]
    if isinstance(pred, dsl.InSet):
        return [(pred.attribute, v) for v in pred.values]
    if isinstance(pred, dsl.Not):
        return _predicate_literals(pred.child)
    if isinstance(pred, (dsl.And, dsl.Or)):
        out: list[tuple[str, dsl.Value]] = []
        for part in pred.parts:
            out.extend(_predicate_literals(part))
        return out
    return []


def validate_template(template: ChecklistTemplate) -> list[ValidationIssue]:
    """Report referential problems and style nits the constructors let pass."""
    issues: list[ValidationIssue] = []
    for category in template.categories:
        if not category.checkpoints:
            issues.append(
                ValidationIssue(
                    "warning", f"category {category.key}", "category has no checkpoints"
                )
            )
        for checkpoint in category.checkpoints:
            if checkpoint.predicate is None:
                continue
            where = f"checkpoint {checkpoint.id}"
            for name in sorted(dsl.referenced_attributes(checkpoint.predicate)):
                if template.profile_schema.get(name) is None:
                    issues.append(
                        ValidationIssue(
                            "error",
                            where,
                            f"branching rule references undeclared attribute {name!r}",
                        )
                    )
            for attr_name, value in _predicate_literals(checkpoint.predicate):
                attr = template.profile_schema.get(attr_name)
                if attr is None:
                    continue  # already reported above
                problem = _literal_issue(attr, value)
                if problem:
                    issues.append(ValidationIssue("error", where, problem))
    return issues


# --- document parsing / serialization ----------------------------------------------

def _require_keys(doc: Mapping[str, Any], allowed: set[str], what: str) -> None:
    stray = set(doc) - allowed
    if stray:
        raise SchemaError(f"{what} has unknown fields: {sorted(stray)}")


def _str_field(doc: Mapping[str, Any], key: str, what: str) -> str:
    value = doc.get(key)
    if not isinstance(value, str):
        raise SchemaError(f"{what} needs a string {key!r}")
    return value


def parse_template(document: bytes | str | Mapping[str, Any]) -> ChecklistTemplate:
    """Turn a template document (JSON text or decoded object) into a template.

    TemplateSyntaxError covers undecodable or non-object input; SchemaError
    covers shape violations; PredicateSyntaxError bubbles up from bad
    branching rules with its offset.
    """
    if isinstance(document, (bytes, str)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TemplateSyntaxError(f"template is not valid JSON: {exc}") from exc
    if not isinstance(document, Mapping):
        raise TemplateSyntaxError("template document must be a JSON object")

    _require_keys(
        document,
        {"name", "version", "profile_schema", "thresholds", "categories"},
        "template",
    )
    name = _str_field(document, "name", "template")
    version = _str_field(document, "version", "template")

    schema_doc = document.get("profile_schema")
    if not isinstance(schema_doc, Mapping):
        raise SchemaError("template needs a profile_schema object")
    _require_keys(schema_doc, {"attributes"}, "profile_schema")
    attr_docs = schema_doc.get("attributes", [])
    if not isinstance(attr_docs, list):
        raise SchemaError("profile_schema.attributes must be a list")
    attributes = []
    for attr_doc in attr_docs:
        if not isinstance(attr_doc, Mapping):
            raise SchemaError("each profile attribute must be an object")
        _require_keys(attr_doc, {"name", "kind", "values"}, "profile attribute")
        values = attr_doc.get("values", [])
        if not isinstance(values, list) or not all(
            isinstance(v, str) for v in values
        ):
            raise SchemaError("attribute values must be a list of strings")
        attributes.append(
            AttributeSpec(
                name=_str_field(attr_doc, "name", "profile attribute"),
                kind=_str_field(attr_doc, "kind", "profile attribute"),
                values=tuple(values),
            )
        )

    thresholds_doc = document.get("thresholds")
    if not isinstance(thresholds_doc, Mapping):
        raise SchemaError("template needs a thresholds object")
    _require_keys(thresholds_doc, {"green_min", "yellow_min"}, "thresholds")
    try:
        thresholds = ColorThresholds(
            green_min=int(thresholds_doc.get("green_min", 100)),
            yellow_min=int(thresholds_doc.get("yellow_min", 80)),
        )
    except (TypeError, ValueError):
        raise SchemaError("thresholds must be integers") from None

    category_docs = document.get("categories")
    if not isinstance(category_docs, list):
        raise SchemaError("template categories must be a list")
    categories = []
    for category_doc in category_docs:
        if not isinstance(category_doc, Mapping):
            raise SchemaError("each category must be an object")
        _require_keys(category_doc, {"key", "name", "checkpoints"}, "category")
        checkpoint_docs = category_doc.get("checkpoints", [])
        if not isinstance(checkpoint_docs, list):
            raise SchemaError("category checkpoints must be a list")
        checkpoints = []
        for cp_doc in checkpoint_docs:
            if not isinstance(cp_doc, Mapping):
                raise SchemaError("each checkpoint must be an object")
            _require_keys(
                cp_doc,
                {
                    "id",
                    "prompt",
                    "applicability",
                    "evidence_required",
                    "guidance",
                    "probe",
                },
                "checkpoint",
            )
            applicability = cp_doc.get("applicability")
            if applicability is not None and not isinstance(applicability, str):
                raise SchemaError("checkpoint applicability must be a string or null")
            probe_doc = cp_doc.get("probe")
            probe = None
            if probe_doc is not None:
                if not isinstance(probe_doc, Mapping):
                    raise SchemaError("checkpoint probe must be an object or null")
                probe = ProbeSpec.from_doc(dict(probe_doc))
            evidence_required = cp_doc.get("evidence_required", False)
            if not isinstance(evidence_required, bool):
                raise SchemaError("checkpoint evidence_required must be a boolean")
            checkpoints.append(
                Checkpoint(
                    id=_str_field(cp_doc, "id", "checkpoint"),
                    prompt=_str_field(cp_doc, "prompt", "checkpoint"),
                    applicability=applicability,
                    evidence_required=evidence_required,
                    guidance=str(cp_doc.get("guidance", "")),
                    probe=probe,
                )
            )
        categories.append(
            Category(
                key=_str_field(category_doc, "key", "category"),
                name=_str_field(category_doc, "name", "category"),
                checkpoints=tuple(checkpoints),
            )
        )

    return ChecklistTemplate(
        name=name,
        version=version,
        profile_schema=ProfileSchema(attributes=tuple(attributes)),
        thresholds=thresholds,
        categories=tuple(categories),
    )


def template_to_doc(template: ChecklistTemplate) -> dict[str, Any]:
    return {
        "name": template.name,
        "version": template.version,
        "profile_schema": {
            "attributes": [
                {"name": a.name, "kind": a.kind}
                | ({"values": list(a.values)} if a.kind == "enum" else {})
                for a in template.profile_schema.attributes
            ]
        },
        "thresholds": {
            "green_min": template.thresholds.green_min,
            "yellow_min": template.thresholds.yellow_min,
        },
        "categories": [
            {
                "key": c.key,
                "name": c.name,
                "checkpoints": [
                    {
                        "id": cp.id,
                        "prompt": cp.prompt,
                        "applicability": cp.applicability,
                        "evidence_required": cp.evidence_required,
                        "guidance": cp.guidance,
                        "probe": cp.probe.to_doc() if cp.probe else None,
                    }
                    for cp in c.checkpoints
                ],
            }
            for c in template.categories
        ],
    }


def serialize_template(template: ChecklistTemplate) -> bytes:
    """Canonical byte form: fixed key order, two-space indent, one trailing
    newline.  Serializing the same template twice is byte-identical."""
    doc = template_to_doc(template)
    return (json.dumps(doc, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


# --- diffing ----------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class TemplateDiff:
    added: frozenset[str]
    removed: frozenset[str]
    changed: frozenset[str]

    @property
    def empty(self) -> bool:
        return not (self.added or self.removed or self.changed)


def diff_templates(old: ChecklistTemplate, new: ChecklistTemplate) -> TemplateDiff:
    """Checkpoint-level difference between two template versions."""
    old_by_id = {cp.id: cp for cp in old.checkpoints()}
    new_by_id = {cp.id: cp for cp in new.checkpoints()}
    added = frozenset(new_by_id) - frozenset(old_by_id)
    removed = frozenset(old_by_id) - frozenset(new_by_id)
    changed = frozenset(
        cp_id
        for cp_id in frozenset(old_by_id) & frozenset(new_by_id)
        if old_by_id[cp_id] != new_by_id[cp_id]
    )
    return TemplateDiff(added=added, removed=frozenset(removed), changed=changed)
