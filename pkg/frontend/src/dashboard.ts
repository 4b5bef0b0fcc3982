import { ApiClient, ApiError } from "./api.js";
import { attr, esc } from "./html.js";
import type { CellDoc, GateShortfalls, UiSession } from "./types.js";

function cellTd(cell: CellDoc | undefined): string {
  if (!cell) {
    return `<td class="na"></td>`;
  }
  const text = cell.score === null ? "N/A" : `${cell.score}%`;
  const klass = cell.color === "grey" ? "na" : cell.color;
  return `<td class=${attr(klass)}>${esc(text)}</td>`;
}

function actionButtons(session: UiSession): string {
  const buttons: string[] = [];
  if (session.role === "ChangeOwner" || session.role === "ChangeManager") {
    buttons.push(`<button data-action="signoff">Sign off</button>`);
  }
  if (session.role === "ChangeManager") {
    buttons.push(`<button data-action="request-changes">Request changes</button>`);
  }
  if (session.role === "LeadershipAuthorizer") {
    buttons.push(`<button data-action="approve">Approve</button>`);
  }
  return buttons.join(" ");
}

export function renderShortfalls(shortfalls: GateShortfalls): string {
  const parts = [`<div class="shortfalls"><p>readiness gate not met:</p><ul>`];
  for (const region of Object.keys(shortfalls).sort()) {
    for (const [category, score] of shortfalls[region] ?? []) {
      parts.push(`<li>${esc(region)}: ${esc(category)} at ${esc(score)}%</li>`);
    }
  }
  parts.push(`</ul></div>`);
  return parts.join("\n");
}

/** The executive grid plus whatever actions the asserted role may take.
 * Every cell is the server's verdict verbatim; the Overall row leads. */
export function renderDashboard(session: UiSession): string {
  const scorecard = session.scorecard;
  const assessment = session.assessment;
  if (!scorecard || !assessment) {
    return `<p class="empty">no scorecard loaded</p>`;
  }
  const parts: string[] = [];
  if (session.banner) {
    parts.push(`<div class="banner">${esc(session.banner)}</div>`);
  }
  parts.push(
    `<h1>${esc(assessment.profile.application)} ` +
      `<span class=${attr(`chip state-${assessment.workflow.state}`)}>${esc(assessment.workflow.state)}</span></h1>`,
  );
  parts.push(`<table class="grid"><thead><tr><th>category</th>`);
  for (const region of scorecard.regions) {
    parts.push(`<th>${esc(region)}</th>`);
  }
  parts.push(`</tr></thead><tbody>`);
  parts.push(`<tr class="overall"><td>Overall</td>`);
  for (const region of scorecard.regions) {
    parts.push(cellTd(scorecard.overall[region]));
  }
  parts.push(`</tr>`);
  for (const row of scorecard.categories) {
    parts.push(`<tr><td>${esc(row.name)}</td>`);
    for (const region of scorecard.regions) {
      parts.push(cellTd(row.cells[region]));
    }
    parts.push(`</tr>`);
  }
  parts.push(`</tbody></table>`);
  if (assessment.workflow.signoffs.length > 0) {
    parts.push(`<ul class="signoffs">`);
    for (const signoff of assessment.workflow.signoffs) {
      parts.push(
        `<li>${esc(signoff.role)}: ${esc(signoff.actor)} at revision ${esc(signoff.revision)}</li>`,
      );
    }
    parts.push(`</ul>`);
  }
  parts.push(`<div class="actions">${actionButtons(session)}</div>`);
  if (session.shortfalls) {
    parts.push(renderShortfalls(session.shortfalls));
  }
  return parts.join("\n");
}

/** POST the sign-off and swap in the returned assessment. */
export async function signoff(api: ApiClient, session: UiSession): Promise<UiSession> {
  const assessment = session.assessment;
  if (!assessment) {
    throw new Error("no assessment loaded");
  }
  try {
    const updated = await api.recordSignoff(assessment.id, session.role, session.actor);
    return { ...session, assessment: updated, banner: null };
  } catch (error) {
    if (error instanceof ApiError) {
      return { ...session, banner: error.message };
    }
    throw error;
  }
}

/** Ask the server to move the workflow. A refused approval comes back as a
 * shortfall panel, anything else refused as a banner; state is only swapped
 * on success. */
export async function transition(
  api: ApiClient,
  session: UiSession,
  to: string,
  reason = "",
): Promise<UiSession> {
  const assessment = session.assessment;
  if (!assessment) {
    throw new Error("no assessment loaded");
  }
  try {
    const updated = await api.requestTransition(
      assessment.id,
      to,
      session.role,
      session.actor,
      reason,
    );
    return { ...session, assessment: updated, banner: null, shortfalls: null };
  } catch (error) {
    if (error instanceof ApiError && error.body.error === "GateNotMet") {
      return { ...session, shortfalls: error.body.shortfalls ?? {} };
    }
    if (error instanceof ApiError) {
      return { ...session, banner: error.message };
    }
    throw error;
  }
}
