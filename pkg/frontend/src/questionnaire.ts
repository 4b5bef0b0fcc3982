import { ApiClient, ApiError } from "./api.js";
import { attr, esc } from "./html.js";
import type {
  AnswerDoc,
  AnswerEdit,
  CellDoc,
  TemplateDoc,
  UiSession,
} from "./types.js";

const STATUS_CHOICES = ["Compliant", "NonCompliant", "InProgress"] as const;

function answerFor(
  session: UiSession,
  checkpointId: string,
  region: string,
): AnswerDoc | undefined {
  return session.assessment?.answers.find(
    (a) => a.checkpoint_id === checkpointId && a.region === region,
  );
}

function badge(cell: CellDoc | undefined): string {
  if (!cell) {
    return "";
  }
  const label = cell.score === null ? "N/A" : `${cell.score}%`;
  return `<span class=${attr(`badge ${cell.color}`)}>${esc(label)} (${cell.compliant}/${cell.applicable})</span>`;
}

/** The branching questionnaire for one region.
 *
 * Grouping and prompts come from the template; which checkpoints exist at
 * all comes from the server's applicable set, so a profile without batch
 * work simply never sees a Batch section. Counters and colors are read off
 * the cached scorecard. */
export function renderQuestionnaire(
  session: UiSession,
  template: TemplateDoc,
  region: string,
): string {
  const assessment = session.assessment;
  if (!assessment) {
    return `<p class="empty">no assessment loaded</p>`;
  }
  const applicable = new Set(assessment.applicable_checkpoints);
  const parts: string[] = [];
  if (session.banner) {
    parts.push(`<div class="banner">${esc(session.banner)}</div>`);
  }
  if (session.readOnly) {
    parts.push(`<div class="locked">answers are frozen in ${esc(assessment.workflow.state)}; read-only</div>`);
  }
  if (!session.readOnly) {
    parts.push(
      `<button data-action="run-probes" data-region=${attr(region)}>Run probes</button>`,
    );
  }
  for (const category of template.categories) {
    const live = category.checkpoints.filter((c) => applicable.has(c.id));
    if (live.length === 0) {
      continue;
    }
    const row = session.scorecard?.categories.find((r) => r.key === category.key);
    parts.push(`<section class="category" data-category=${attr(category.key)}>`);
    parts.push(`<h2>${esc(category.name)} ${badge(row?.cells[region])}</h2>`);
    for (const checkpoint of live) {
      const current = answerFor(session, checkpoint.id, region);
      const status = current?.status ?? "Unanswered";
      parts.push(`<div class="checkpoint" data-checkpoint=${attr(checkpoint.id)}>`);
      parts.push(`<p class="prompt">${esc(checkpoint.prompt)}</p>`);
      if (checkpoint.guidance) {
        parts.push(`<p class="guidance">${esc(checkpoint.guidance)}</p>`);
      }
      parts.push(`<span class="status">${esc(status)}</span>`);
      if (!session.readOnly) {
        for (const choice of STATUS_CHOICES) {
          parts.push(
            `<button data-action="answer" data-checkpoint=${attr(checkpoint.id)} ` +
              `data-region=${attr(region)} data-status=${attr(choice)}>${esc(choice)}</button>`,
          );
        }
        if (checkpoint.evidence_required) {
          parts.push(
            `<input type="text" data-evidence-for=${attr(checkpoint.id)} ` +
              `placeholder="evidence note (required for Compliant)">`,
          );
        }
      }
      parts.push(`</div>`);
    }
    parts.push(`</section>`);
  }
  return parts.join("\n");
}

/** One answer round-trip: PUT with the revision we last saw, then refresh
 * both documents so the remaining checkpoints and badges reshape.
 *
 * A concurrent edit elsewhere surfaces as a banner and nothing is
 * overwritten; a frozen workflow state flips the view read-only. */
export async function saveAnswer(
  api: ApiClient,
  session: UiSession,
  edit: AnswerEdit,
): Promise<UiSession> {
  const assessment = session.assessment;
  if (!assessment) {
    throw new Error("no assessment loaded");
  }
  if (session.readOnly) {
    return session;
  }
  try {
    await api.putAnswers(assessment.id, assessment.revision, [edit], session.actor);
  } catch (error) {
    if (error instanceof ApiError && error.body.error === "RevisionConflict") {
      return {
        ...session,
        banner:
          `someone else saved revision ${error.body.actual} while you were on ` +
          `${error.body.expected}; reload to pick up their changes and retry`,
      };
    }
    if (error instanceof ApiError && error.body.error === "LockedState") {
      return { ...session, readOnly: true, banner: error.body.detail };
    }
    throw error;
  }
  return refresh(api, { ...session, banner: null });
}

export async function refresh(api: ApiClient, session: UiSession): Promise<UiSession> {
  const id = session.assessment?.id;
  if (!id) {
    return session;
  }
  const [assessment, scorecard] = await Promise.all([
    api.getAssessment(id),
    api.getScorecard(id),
  ]);
  return { ...session, assessment, scorecard };
}

/** Sweep the region's probe-bound checkpoints; answers land server-side, so
 * just refresh afterwards. */
export async function runProbes(
  api: ApiClient,
  session: UiSession,
  region: string,
): Promise<UiSession> {
  const assessment = session.assessment;
  if (!assessment) {
    throw new Error("no assessment loaded");
  }
  try {
    await api.runProbes(assessment.id, { region });
  } catch (error) {
    if (error instanceof ApiError) {
      return { ...session, banner: error.message };
    }
    throw error;
  }
  return refresh(api, { ...session, banner: null });
}
