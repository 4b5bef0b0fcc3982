import { describe, expect, test } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderDashboard, signoff, transition } from "../src/dashboard.js";
import { refresh } from "../src/questionnaire.js";
import type { ProfileDoc, UiSession } from "../src/types.js";
import { StubServer, fixture, profileWithoutBatch, type StubFixture } from "./stub.js";

function freshSession(): UiSession {
  return {
    baseUrl: "http://stub",
    role: "LeadershipAuthorizer",
    actor: "lee",
    assessment: null,
    scorecard: null,
    banner: null,
    readOnly: false,
    shortfalls: null,
  };
}

/** One twenty-checkpoint category so a single miss scores exactly 95%. */
function wideFixture(): StubFixture {
  return {
    template: {
      name: "wide",
      version: "1.0.0",
      profile_schema: { attributes: [] },
      thresholds: { green_min: 100, yellow_min: 80 },
      categories: [
        {
          key: "core",
          name: "Core Readiness",
          checkpoints: Array.from({ length: 20 }, (_, i) => ({
            id: `core.cp${String(i).padStart(2, "0")}`,
            prompt: `check ${i}?`,
            applicability: "true",
            evidence_required: false,
            guidance: "",
            probe: null,
          })),
        },
      ],
    },
    rules: {},
    probeBound: [],
  };
}

const oneRegion: ProfileDoc = {
  attributes: {},
  regions: ["emea"],
  release_kind: "MajorImplementation",
  application: "ledger",
};

async function openedWide(answered: number, id: string) {
  const stub = new StubServer(wideFixture());
  const api = new ApiClient("http://stub", stub.fetch);
  await api.uploadTemplate(JSON.stringify(wideFixture().template));
  const created = await api.createAssessment("wide@1.0.0", oneRegion, id);
  let session = { ...freshSession(), assessment: created };
  const edits = Array.from({ length: answered }, (_, i) => ({
    checkpoint_id: `core.cp${String(i).padStart(2, "0")}`,
    region: "emea",
    status: "Compliant" as const,
  }));
  await api.putAnswers(id, 1, edits, "lee");
  session = await refresh(api, session);
  return { api, session };
}

describe("dashboard", () => {
  test("approve at 95% renders the refusal with every shortfall", async () => {
    const { api, session } = await openedWide(19, "d-1");
    expect(session.scorecard?.overall["emea"]?.score).toBe(95);

    const refused = await transition(api, session, "Approved");
    expect(refused.shortfalls).toEqual({ emea: [["Core Readiness", 95]] });
    expect(refused.assessment?.workflow.state).toBe("Draft");

    const html = renderDashboard(refused);
    expect(html).toContain("readiness gate not met");
    expect(html).toContain("emea: Core Readiness at 95%");
  });

  test("approve with the gate met lands and the chip follows", async () => {
    const { api, session } = await openedWide(20, "d-2");
    const approved = await transition(api, session, "Approved");
    expect(approved.shortfalls).toBeNull();
    expect(renderDashboard(approved)).toContain(">Approved</span>");
  });

  test("the grid leads with Overall and shows server colors verbatim", async () => {
    const { session } = await openedWide(19, "d-3");
    const html = renderDashboard(session);
    const firstRow = html.indexOf("<tr class=\"overall\">");
    const categoryRow = html.indexOf("Core Readiness");
    expect(firstRow).toBeGreaterThan(-1);
    expect(firstRow).toBeLessThan(categoryRow);
    expect(html).toContain('<td class="yellow">95%</td>');
  });

  test("inapplicable categories render as N/A cells", async () => {
    const stub = new StubServer(fixture());
    const api = new ApiClient("http://stub", stub.fetch);
    await api.uploadTemplate(JSON.stringify(fixture().template));
    const created = await api.createAssessment(
      "edge@1.0.0",
      profileWithoutBatch(),
      "d-4",
    );
    const session = await refresh(api, { ...freshSession(), assessment: created });
    const html = renderDashboard(session);
    expect(html).toContain("Batch Applications");
    expect(html).toContain('<td class="na">N/A</td>');
  });

  test("actions follow the asserted role", async () => {
    const { session } = await openedWide(20, "d-5");
    expect(renderDashboard(session)).toContain('data-action="approve"');
    expect(renderDashboard(session)).not.toContain('data-action="signoff"');

    const owner = { ...session, role: "ChangeOwner" as const };
    expect(renderDashboard(owner)).toContain('data-action="signoff"');
    expect(renderDashboard(owner)).not.toContain('data-action="approve"');

    const manager = { ...session, role: "ChangeManager" as const };
    expect(renderDashboard(manager)).toContain('data-action="request-changes"');

    const observer = { ...session, role: "Observer" as const };
    const html = renderDashboard(observer);
    expect(html).not.toContain("data-action=");
  });

  test("sign-offs list the role, actor and revision they bind to", async () => {
    const { api, session } = await openedWide(20, "d-6");
    const owner = { ...session, role: "ChangeOwner" as const, actor: "sam" };
    const signed = await signoff(api, owner);
    const html = renderDashboard(signed);
    expect(html).toContain("ChangeOwner: sam at revision 21");
  });

  test("a refused non-approval surfaces as a banner, state untouched", async () => {
    const stub = new StubServer(wideFixture());
    const api = new ApiClient("http://stub", {
      // wrap to make the stub refuse this one
      async apply(url: string, init?: RequestInit) {
        if (init?.method === "POST" && url.includes("/transition")) {
          return new Response(
            JSON.stringify({
              error: "RoleNotPermitted",
              detail: "Draft -> Released belongs to ChangeManager",
            }),
            { status: 403, headers: { "content-type": "application/json" } },
          );
        }
        return stub.fetch(url, init);
      },
    }.apply);
    await api.uploadTemplate(JSON.stringify(wideFixture().template));
    const created = await api.createAssessment("wide@1.0.0", oneRegion, "d-7");
    let session = await refresh(api, { ...freshSession(), assessment: created });
    session = await transition(api, session, "Released");
    expect(session.banner).toContain("RoleNotPermitted");
    expect(session.assessment?.workflow.state).toBe("Draft");
  });
});
