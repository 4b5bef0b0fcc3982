"""Executive dashboard: one grid, categories down, regions across.

The dashboard is a projection of a scorecard with presentation niceties
(labels, colors, a data-density footer) in three forms: an ANSI terminal
grid, CSV identical byte-for-byte to the scorecard export, and a
self-contained HTML page with zero external assets.  Rendering is pure:
same model in, same bytes out.
"""

from __future__ import annotations

import csv
import html
import io
import os
from dataclasses import dataclass
from typing import Any, Iterable

from .assessment import (
    Assessment,
    CellColor,
    ScoreCard,
    compute_scorecard,
    density_report,
    gate_passed,
)
from .errors import UnsupportedFormat
from .workflow import now_utc


@dataclass(frozen=True, slots=True)
class DashboardCell:
    text: str  # "96%" or "N/A"
    color: CellColor


@dataclass(frozen=True, slots=True)
class DashboardRow:
    label: str
    cells: tuple[DashboardCell, ...]  # one per region, in region order


@dataclass(frozen=True, slots=True)
class DashboardModel:
    assessment_id: str
    application: str
    template_ref: str
    state: str
    generated_at: str
    regions: tuple[str, ...]
    rows: tuple[DashboardRow, ...]  # first row is Overall
    density_total: int
    gate: dict[str, bool]


def _cell_text(score: int | None) -> str:
    return "N/A" if score is None else f"{score}%"


def build_dashboard(
    assessment: Assessment, generated_at: str | None = None
) -> DashboardModel:
    scorecard = compute_scorecard(assessment)
    return dashboard_from_scorecard(
        scorecard,
        application=assessment.application,
        state=assessment.workflow.state.value,
        generated_at=generated_at,
    )


def dashboard_from_scorecard(
    scorecard: ScoreCard,
    application: str = "",
    state: str = "",
    generated_at: str | None = None,
) -> DashboardModel:
    rows = [
        DashboardRow(
            label="Overall",
            cells=tuple(
                DashboardCell(
                    text=_cell_text(scorecard.overall[region].score),
                    color=scorecard.overall[region].color,
                )
                for region in scorecard.regions
            ),
        )
    ]
    for category in scorecard.categories:
        rows.append(
            DashboardRow(
                label=category.name,
                cells=tuple(
                    DashboardCell(
                        text=_cell_text(category.cells[region].score),
                        color=category.cells[region].color,
                    )
                    for region in scorecard.regions
                ),
            )
        )
    return DashboardModel(
        assessment_id=scorecard.assessment_id,
        application=application or scorecard.assessment_id,
        template_ref=f"{scorecard.template_name}@{scorecard.template_version}",
        state=state,
        generated_at=generated_at or now_utc(),
        regions=scorecard.regions,
        rows=tuple(rows),
        density_total=density_report(scorecard).total,
        gate={region: gate_passed(scorecard, region) for region in scorecard.regions},
    )


# --- renderers ----------------------------------------------------------------------

_ANSI = {
    CellColor.GREEN: "\x1b[42;30m",
    CellColor.YELLOW: "\x1b[43;30m",
    CellColor.RED: "\x1b[41;97m",
    CellColor.GREY: "\x1b[2m",
}
_RESET = "\x1b[0m"


def _want_color(use_color: bool | None) -> bool:
    if use_color is not None:
        return use_color
    return not os.environ.get("NO_COLOR")


def _render_tty(model: DashboardModel, use_color: bool | None) -> str:
    colored = _want_color(use_color)
    label_width = max(len(row.label) for row in model.rows)
    label_width = max(label_width, len("category"))
    cell_width = max(
        [len(region) for region in model.regions]
        + [len(cell.text) for row in model.rows for cell in row.cells]
    )
    lines = [
        f"{model.application}  ({model.template_ref}, {model.state})",
        "category".ljust(label_width)
        + "  "
        + "  ".join(region.rjust(cell_width) for region in model.regions),
    ]
    lines.append("-" * len(lines[-1]))
    for row in model.rows:
        cells = []
        for cell in row.cells:
            text = cell.text.rjust(cell_width)
            if colored:
                text = _ANSI[cell.color] + text + _RESET
            cells.append(text)
        lines.append(row.label.ljust(label_width) + "  " + "  ".join(cells))
    lines.append("")
    lines.append(
        f"generated {model.generated_at} - {model.density_total} data points"
    )
    return "\n".join(lines) + "\n"


def _render_csv(model: DashboardModel) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["category", *model.regions])
    for row in model.rows:
        writer.writerow([row.label, *(cell.text for cell in row.cells)])
    return buffer.getvalue()


_PAGE_STYLE = """
body { font-family: system-ui, sans-serif; margin: 2rem; color: #1c2733; }
table { border-collapse: collapse; }
th, td { border: 1px solid #9aa7b2; padding: 0.35rem 0.8rem; text-align: center; }
th.category, td.category { text-align: left; }
tr.overall { font-weight: 700; }
td.green { background: #2e9e4f; color: #ffffff; }
td.yellow { background: #f3c614; color: #332a00; }
td.red { background: #cc3a2f; color: #ffffff; }
td.na { background: #d5dade; color: #5a6570; }
footer { margin-top: 1rem; font-size: 0.85rem; color: #5a6570; }
""".strip()


def _html_class(color: CellColor) -> str:
    # the page talks in terms of what the viewer sees, so grey cells are "na"
    return "na" if color == CellColor.GREY else color.value


def _render_html(model: DashboardModel) -> str:
    head_cells = "".join(
        f"<th>{html.escape(region)}</th>" for region in model.regions
    )
    body_rows = []
    for index, row in enumerate(model.rows):
        cells = "".join(
            f'<td class="{_html_class(cell.color)}">{html.escape(cell.text)}</td>'
            for cell in row.cells
        )
        css = ' class="overall"' if index == 0 else ""
        body_rows.append(
            f'<tr{css}><td class="category">{html.escape(row.label)}</td>{cells}</tr>'
        )
    rows_html = "\n".join(body_rows)
    return f"""<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>Readiness: {html.escape(model.application)}</title>
<style>
{_PAGE_STYLE}
</style>
</head>
<body>
<h1>Operational readiness: {html.escape(model.application)}</h1>
<p>State: {html.escape(model.state)}</p>
<table>
<thead><tr><th class="category">category</th>{head_cells}</tr></thead>
<tbody>
{rows_html}
</tbody>
</table>
<footer>assessment {html.escape(model.assessment_id)} &middot; template {html.escape(model.template_ref)} &middot; generated {html.escape(model.generated_at)} &middot; {model.density_total} data points</footer>
</body>
</html>
"""


def render_dashboard(
    model: DashboardModel, fmt: str = "tty", use_color: bool | None = None
) -> str:
    if fmt == "tty":
        return _render_tty(model, use_color)
    if fmt == "csv":
        return _render_csv(model)
    if fmt == "html":
        return _render_html(model)
    raise UnsupportedFormat(f"no such dashboard format {fmt!r} (use tty, csv or html)")


# --- portfolio -----------------------------------------------------------------------

_SEVERITY = {
    CellColor.RED: 0,
    CellColor.YELLOW: 1,
    CellColor.GREEN: 2,
    CellColor.GREY: 3,
}


@dataclass(frozen=True, slots=True)
class PortfolioRow:
    assessment_id: str
    application: str
    state: str
    min_overall: int | None
    worst_color: CellColor

    def to_doc(self) -> dict[str, Any]:
        return {
            "assessment_id": self.assessment_id,
            "application": self.application,
            "state": self.state,
            "min_overall": self.min_overall,
            "worst_color": self.worst_color.value,
        }


@dataclass(frozen=True, slots=True)
class PortfolioView:
    rows: tuple[PortfolioRow, ...]

    def to_doc(self) -> dict[str, Any]:
        return {"rows": [row.to_doc() for row in self.rows]}


def portfolio_rollup(assessments: Iterable[Assessment]) -> PortfolioView:
    """One line per assessment, worst news first.

    Ordering: anything red outranks yellow outranks green (grey means no
    applicable data and sinks to the bottom), ties broken by the lowest
    regional overall, then id for stability.
    """
    rows = []
    for assessment in assessments:
        scorecard = compute_scorecard(assessment)
        overall_cells = [scorecard.overall[region] for region in scorecard.regions]
        scores = [cell.score for cell in overall_cells if cell.score is not None]
        worst = min(
            (cell.color for cell in overall_cells),
            key=lambda color: _SEVERITY[color],
            default=CellColor.GREY,
        )
        rows.append(
            PortfolioRow(
                assessment_id=assessment.id,
                application=assessment.application,
                state=assessment.workflow.state.value,
                min_overall=min(scores) if scores else None,
                worst_color=worst,
            )
        )
    rows.sort(
        key=lambda row: (
            _SEVERITY[row.worst_color],
            row.min_overall if row.min_overall is not None else 101,
            row.assessment_id,
        )
    )
    return PortfolioView(rows=tuple(rows))


def render_portfolio(view: PortfolioView, fmt: str = "tty") -> str:
    if fmt == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(
            ["assessment", "application", "state", "min_overall", "worst_color"]
        )
        for row in view.rows:
            writer.writerow(
                [
                    row.assessment_id,
                    row.application,
                    row.state,
                    "N/A" if row.min_overall is None else str(row.min_overall),
                    row.worst_color.value,
                ]
            )
        return buffer.getvalue()
    if fmt == "tty":
        header = ["assessment", "application", "state", "overall", "color"]
        table = [header] + [
            [
                row.assessment_id,
                row.application,
                row.state,
                "N/A" if row.min_overall is None else f"{row.min_overall}%",
                row.worst_color.value,
            ]
            for row in view.rows
        ]
        widths = [max(len(line[i]) for line in table) for i in range(len(header))]
        lines = []
        for index, line in enumerate(table):
            lines.append(
                "  ".join(cell.ljust(width) for cell, width in zip(line, widths)).rstrip()
            )
            if index == 0:
                lines.append("  ".join("-" * width for width in widths))
        return "\n".join(lines) + "\n"
    raise UnsupportedFormat(f"no such portfolio format {fmt!r} (use tty or csv)")
