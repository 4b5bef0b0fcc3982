"""Coverage comparison between a checklist template and reference checklists.

Different organisations slice the same operational ground differently, so
rows are matched through a category alias table (case-folded, trimmed) before
comparison.  A template "covers" a canonical category when at least one of
its categories maps there and holds at least one checkpoint.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass
from enum import Enum
from typing import Any, Mapping, Sequence

from .builtin import GOOGLE_2016_LABEL, GOOGLE_2016_NAME, GOOGLE_2016_ROWS
from .errors import SchemaError, UnsupportedFormat
from .template import ChecklistTemplate


class CoverageLevel(str, Enum):
    YES = "Y"
    NO = "N"
    PARTIAL = "Partial"
    INDIRECT = "Indirectly"


@dataclass(frozen=True, slots=True)
class ReferenceFramework:
    name: str
    label: str
    rows: tuple[tuple[str, CoverageLevel], ...]

    def to_doc(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "label": self.label,
            "rows": [
                {"category": category, "level": level.value}
                for category, level in self.rows
            ],
        }

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "ReferenceFramework":
        try:
            rows = tuple(
                (str(row["category"]), CoverageLevel(row["level"]))
                for row in doc["rows"]
            )
            return cls(name=str(doc["name"]), label=str(doc["label"]), rows=rows)
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad reference framework document: {exc}") from exc


def serialize_reference(framework: ReferenceFramework) -> bytes:
    return (json.dumps(framework.to_doc(), indent=2, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def google_2016_reference() -> ReferenceFramework:
    return ReferenceFramework(
        name=GOOGLE_2016_NAME,
        label=GOOGLE_2016_LABEL,
        rows=tuple(
            (category, CoverageLevel(level)) for category, level in GOOGLE_2016_ROWS
        ),
    )


# Alias table: spelling variants seen in the wild, keyed to a canonical slug.
# Cloud hosting and data streaming fold into the broader hosting / database
# rows because reference checklists rarely break them out.
_ALIASES: dict[str, Sequence[str]] = {
    "prerequisites": ("pre-requisites", "prerequisites", "pre-conditions to orr"),
    "capacity": ("capacity", "capacity planning readiness"),
    "performance": ("performance", "performances readiness"),
    "batch": ("batch", "batch applications"),
    "application": ("application", "application touchpoints"),
    "third_party": (
        "third-party",
        "third party",
        "3rd party",
        "3rd party (commercial off-the-shelf)",
    ),
    "backup": ("backup", "backup / recovery", "backup/recovery"),
    "support": ("support", "production support"),
    "network": ("network", "networks & firewalls", "networks and firewalls"),
    "security": ("security", "infosec & malware", "infosec and malware"),
    "storage": ("storage",),
    "hosting": ("hosting", "servers & hosts", "servers and hosts", "cloud servers"),
    "database": ("database", "data streaming"),
    "monitoring": ("monitoring", "monitoring tools"),
    "dr": ("dr", "disaster recovery"),
    "process": ("process",),
    "failure_scenarios": ("failure scenarios",),
    "automation": ("automation",),
}

_ALIAS_LOOKUP = {
    alias: canonical for canonical, aliases in _ALIASES.items() for alias in aliases
}


def canonical_category(name: str) -> str:
    folded = re.sub(r"\s+", " ", name.strip().casefold())
    return _ALIAS_LOOKUP.get(folded, folded)


@dataclass(frozen=True, slots=True)
class GapRow:
    category: str
    levels: tuple[CoverageLevel, ...]  # one per matrix column


@dataclass(frozen=True, slots=True)
class GapMatrix:
    columns: tuple[str, ...]
    rows: tuple[GapRow, ...]

    @property
    def gaps(self) -> tuple[str, ...]:
        """Categories where coverage is split: some side fully covers, some
        side does not."""
        out = []
        for row in self.rows:
            yes = sum(1 for level in row.levels if level == CoverageLevel.YES)
            if 0 < yes < len(row.levels):
                out.append(row.category)
        return tuple(out)

    @property
    def summary(self) -> dict[str, dict[str, int]]:
        """Per column, how many rows land on each coverage level."""
        out: dict[str, dict[str, int]] = {
            column: {level.value: 0 for level in CoverageLevel}
            for column in self.columns
        }
        for row in self.rows:
            for column, level in zip(self.columns, row.levels):
                out[column][level.value] += 1
        return out

    def to_doc(self) -> dict[str, Any]:
        return {
            "columns": list(self.columns),
            "rows": [
                {
                    "category": row.category,
                    "levels": {
                        column: level.value
                        for column, level in zip(self.columns, row.levels)
                    },
                }
                for row in self.rows
            ],
            "summary": self.summary,
            "gaps": list(self.gaps),
        }


def compare(
    template: ChecklistTemplate,
    frameworks: Sequence[ReferenceFramework],
) -> GapMatrix:
    """Line the template up against reference checklists, one row per
    canonical category across all of them.

    Row order follows the first framework's published order, then any
    template-only categories in template order.  A framework that simply
    does not mention a category reads as N.
    """
    template_coverage: dict[str, bool] = {}
    for category in template.categories:
        slug = canonical_category(category.name)
        covered = template_coverage.get(slug, False)
        template_coverage[slug] = covered or bool(category.checkpoints)

    order: list[str] = []
    labels: dict[str, str] = {}

    def admit(slug: str, display: str) -> None:
        if slug not in order:
            order.append(slug)
            labels[slug] = display

    for framework in frameworks:
        for category_name, _level in framework.rows:
            admit(canonical_category(category_name), category_name)
    for category in template.categories:
        admit(canonical_category(category.name), category.name)

    framework_levels: list[dict[str, CoverageLevel]] = []
    for framework in frameworks:
        by_slug: dict[str, CoverageLevel] = {}
        for category_name, level in framework.rows:
            slug = canonical_category(category_name)
            # If two rows fold together, the stronger claim stands.
            if by_slug.get(slug) != CoverageLevel.YES:
                by_slug[slug] = level
        framework_levels.append(by_slug)

    rows = []
    for slug in order:
        levels = [
            by_slug.get(slug, CoverageLevel.NO) for by_slug in framework_levels
        ]
        levels.append(
            CoverageLevel.YES
            if template_coverage.get(slug, False)
            else CoverageLevel.NO
        )
        rows.append(GapRow(category=labels[slug], levels=tuple(levels)))

    columns = tuple(f.label for f in frameworks) + (template.name,)
    return GapMatrix(columns=columns, rows=tuple(rows))


def render_matrix(matrix: GapMatrix, fmt: str = "tty") -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["category", *matrix.columns])
        for row in matrix.rows:
            writer.writerow([row.category, *(level.value for level in row.levels)])
        return buffer.getvalue()
    if fmt == "tty":
        header = ["category", *matrix.columns]
        table = [header] + [
            [row.category, *(level.value for level in row.levels)]
            for row in matrix.rows
        ]
        widths = [
            max(len(line[col]) for line in table) for col in range(len(header))
        ]
        lines = []
        for index, line in enumerate(table):
            lines.append(
                "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
            )
            if index == 0:
                lines.append("  ".join("-" * width for width in widths))
        gaps = ", ".join(matrix.gaps) or "none"
        lines.append("")
        lines.append(f"coverage gaps: {gaps}")
        return "\n".join(lines) + "\n"
    raise UnsupportedFormat(f"no such matrix format {fmt!r} (use tty or csv)")
