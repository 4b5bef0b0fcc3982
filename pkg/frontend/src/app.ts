import { ApiClient } from "./api.js";
import { renderDashboard, signoff, transition } from "./dashboard.js";
import {
  refresh,
  renderQuestionnaire,
  runProbes,
  saveAnswer,
} from "./questionnaire.js";
import type { RoleName, TemplateDoc, UiSession } from "./types.js";

/** DOM shell: holds the session, delegates clicks to the controllers and
 * swaps rendered strings into #view. All decisions live server-side or in
 * the view modules; this file is wiring only. */

const api = new ApiClient(window.location.origin);

let session: UiSession = {
  baseUrl: window.location.origin,
  role: "ChangeOwner",
  actor: "webui",
  assessment: null,
  scorecard: null,
  banner: null,
  readOnly: false,
  shortfalls: null,
};
let template: TemplateDoc | null = null;
let region = "";
let tab: "questionnaire" | "dashboard" = "questionnaire";

function viewRoot(): HTMLElement {
  const node = document.getElementById("view");
  if (!node) {
    throw new Error("missing #view element");
  }
  return node;
}

function render(): void {
  if (!session.assessment || !template) {
    viewRoot().innerHTML = `<p class="empty">open an assessment to begin</p>`;
    return;
  }
  viewRoot().innerHTML =
    tab === "questionnaire"
      ? renderQuestionnaire(session, template, region)
      : renderDashboard(session);
}

async function open(assessmentId: string): Promise<void> {
  const assessment = await api.getAssessment(assessmentId);
  session = { ...session, assessment, banner: null, readOnly: false, shortfalls: null };
  session = await refresh(api, session);
  template = await api.getTemplate(assessment.template.name, assessment.template.version);
  region = assessment.profile.regions[0] ?? "";
  render();
}

async function onAction(target: HTMLElement): Promise<void> {
  switch (target.dataset.action) {
    case "answer": {
      const checkpoint = target.dataset.checkpoint ?? "";
      const evidenceInput = document.querySelector<HTMLInputElement>(
        `[data-evidence-for="${checkpoint}"]`,
      );
      session = await saveAnswer(api, session, {
        checkpoint_id: checkpoint,
        region: target.dataset.region ?? region,
        status: (target.dataset.status ?? "Compliant") as never,
        ...(evidenceInput?.value
          ? {
              evidence: {
                description: evidenceInput.value,
                content_base64: btoa(evidenceInput.value),
              },
            }
          : {}),
      });
      break;
    }
    case "run-probes":
      session = await runProbes(api, session, target.dataset.region ?? region);
      break;
    case "signoff":
      session = await signoff(api, session);
      break;
    case "approve":
      session = await transition(api, session, "Approved");
      break;
    case "request-changes":
      session = await transition(api, session, "ChangesRequested", "see review notes");
      break;
    default:
      return;
  }
  render();
}

function wire(): void {
  viewRoot().addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.action) {
      void onAction(target);
    }
  });
  const form = document.getElementById("open-form") as HTMLFormElement | null;
  form?.addEventListener("submit", (event) => {
    event.preventDefault();
    const data = new FormData(form);
    session = {
      ...session,
      role: String(data.get("role") || "ChangeOwner") as RoleName,
      actor: String(data.get("actor") || "webui"),
    };
    void open(String(data.get("assessment") || ""));
  });
  const tabs = document.getElementById("tabs");
  tabs?.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    if (target.dataset.tab === "questionnaire" || target.dataset.tab === "dashboard") {
      tab = target.dataset.tab;
      render();
    }
  });
  const regionPick = document.getElementById("region") as HTMLSelectElement | null;
  regionPick?.addEventListener("change", () => {
    region = regionPick.value;
    render();
  });
}

wire();
render();
