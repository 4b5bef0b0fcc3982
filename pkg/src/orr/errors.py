"""Exception types shared across the engine.

Every error that callers are expected to branch on gets its own class so the
CLI and HTTP layers can map them to exit codes / status codes without string
matching.  All of them derive from OrrError.
"""

from __future__ import annotations


class OrrError(Exception):
    """Base class for everything raised deliberately by this package."""


# --- template / document problems -------------------------------------------

class TemplateSyntaxError(OrrError):
    """The template document is not well-formed (bad JSON, wrong shapes)."""


class SchemaError(OrrError):
    """The document parsed but violates a structural rule (duplicate ids,
    unknown attribute kinds, bad thresholds, and so on)."""


class TemplateMismatch(OrrError):
    """An operation tried to pair an assessment with an incompatible template
    (different name, or a version that migration cannot target)."""


class VersionExists(OrrError):
    """A template upload collided with an already-stored immutable version."""


# --- predicate language -------------------------------------------------------

class PredicateSyntaxError(OrrError):
    """Raised when predicate source text cannot be parsed.

    Carries the byte offset of the failure and a hint naming what the parser
    expected there, so tooling can point at the exact spot.
    """

    def __init__(self, message: str, offset: int, expected: str) -> None:
        super().__init__(f"{message} at offset {offset} (expected {expected})")
        self.offset = offset
        self.expected = expected


class UnknownAttribute(OrrError):
    """A predicate referenced an attribute the profile does not define.

    Evaluation is strict: this is an error, never silently false.
    """

    def __init__(self, name: str) -> None:
        super().__init__(f"predicate references undefined attribute {name!r}")
        self.name = name


# --- answering / scoring ------------------------------------------------------

class UnknownCheckpoint(OrrError):
    """An answer named a checkpoint id that the template does not contain."""


class UnknownRegion(OrrError):
    """An operation named a region the assessment profile does not list."""


class NotApplicable(OrrError):
    """An answer targeted a checkpoint excluded by the branching rules for
    this assessment's profile."""


class EvidenceMissing(OrrError):
    """A Compliant answer to an evidence-required checkpoint arrived without
    an evidence reference."""


class LockedState(OrrError):
    """Answers cannot change in the assessment's current workflow state."""


# --- governance ----------------------------------------------------------------

class IllegalTransition(OrrError):
    """The requested state change is not an edge in the workflow."""


class RoleNotPermitted(OrrError):
    """The acting role may not perform this transition or sign-off."""


class GateNotMet(OrrError):
    """Approval was requested while some region is below 100%.

    ``shortfalls`` maps region name to a list of ``(category name, score)``
    pairs for every non-grey cell under 100, so callers can render exactly
    what is blocking the release.
    """

    def __init__(self, shortfalls: dict[str, list[tuple[str, int]]]) -> None:
        regions = ", ".join(sorted(shortfalls)) or "no region data"
        super().__init__(f"readiness gate not met in: {regions}")
        self.shortfalls = shortfalls


class StaleSignOff(OrrError):
    """A sign-off's recorded revision no longer matches the assessment."""


# --- probes ---------------------------------------------------------------------

class NoProbeBinding(OrrError):
    """A probe run was requested for a checkpoint with no probe attached."""


# --- persistence ----------------------------------------------------------------

class RevisionConflict(OrrError):
    """Optimistic concurrency failure: the stored revision moved on."""

    def __init__(self, expected: int, actual: int) -> None:
        super().__init__(
            f"stale write: expected revision {expected}, store holds {actual}"
        )
        self.expected = expected
        self.actual = actual


class NotFound(OrrError):
    """A named template, assessment or reference does not exist in the store."""


class UnsupportedFormat(OrrError):
    """An output format name is not one this renderer supports."""
