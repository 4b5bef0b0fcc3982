import type {
  AnswerEdit,
  ApiErrorBody,
  AssessmentDoc,
  ProbeResultDoc,
  ProfileDoc,
  RoleName,
  ScorecardDoc,
  TemplateDoc,
  TemplateRef,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** A service refusal, carried whole so views can render the details
 * (shortfalls, revision numbers) instead of a generic failure. */
export class ApiError extends Error {
  readonly status: number;
  readonly body: ApiErrorBody;

  constructor(status: number, body: ApiErrorBody) {
    super(`${body.error}: ${body.detail}`);
    this.status = status;
    this.body = body;
  }
}

async function unwrap<T>(response: Response): Promise<T> {
  if (response.ok) {
    return (await response.json()) as T;
  }
  let body: ApiErrorBody;
  try {
    body = (await response.json()) as ApiErrorBody;
  } catch {
    body = { error: `HTTP${response.status}`, detail: response.statusText };
  }
  throw new ApiError(response.status, body);
}

/** Thin typed wrapper over /api/v1. One method per endpoint, no caching,
 * no retries; the views decide what a refusal means. */
export class ApiClient {
  private readonly base: string;
  private readonly fetcher: FetchLike;

  constructor(baseUrl: string, fetcher: FetchLike = fetch) {
    this.base = baseUrl.replace(/\/$/, "");
    this.fetcher = fetcher;
  }

  private url(path: string): string {
    return `${this.base}/api/v1${path}`;
  }

  async listTemplates(): Promise<{ templates: TemplateRef[] }> {
    return unwrap(await this.fetcher(this.url("/templates")));
  }

  async getTemplate(name: string, version: string): Promise<TemplateDoc> {
    return unwrap(await this.fetcher(this.url(`/templates/${name}/${version}`)));
  }

  async uploadTemplate(document: string): Promise<TemplateRef> {
    return unwrap(
      await this.fetcher(this.url("/templates"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: document,
      }),
    );
  }

  async createAssessment(
    template: string,
    profile: ProfileDoc,
    id?: string,
  ): Promise<AssessmentDoc> {
    return unwrap(
      await this.fetcher(this.url("/assessments"), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ template, profile, id: id ?? null }),
      }),
    );
  }

  async getAssessment(id: string): Promise<AssessmentDoc> {
    return unwrap(await this.fetcher(this.url(`/assessments/${id}`)));
  }

  async putAnswers(
    id: string,
    expectedRevision: number,
    answers: AnswerEdit[],
    actor: string,
  ): Promise<{ revision: number }> {
    return unwrap(
      await this.fetcher(this.url(`/assessments/${id}/answers`), {
        method: "PUT",
        headers: { "Content-Type": "application/json", "X-ORR-Actor": actor },
        body: JSON.stringify({ expected_revision: expectedRevision, answers }),
      }),
    );
  }

  async getScorecard(id: string): Promise<ScorecardDoc> {
    return unwrap(await this.fetcher(this.url(`/assessments/${id}/scorecard`)));
  }

  async recordSignoff(
    id: string,
    role: RoleName,
    actor: string,
  ): Promise<AssessmentDoc> {
    return unwrap(
      await this.fetcher(this.url(`/assessments/${id}/signoffs`), {
        method: "POST",
        headers: { "X-ORR-Role": role, "X-ORR-Actor": actor },
      }),
    );
  }

  async requestTransition(
    id: string,
    to: string,
    role: RoleName,
    actor: string,
    reason = "",
  ): Promise<AssessmentDoc> {
    return unwrap(
      await this.fetcher(this.url(`/assessments/${id}/transition`), {
        method: "POST",
        headers: {
          "Content-Type": "application/json",
          "X-ORR-Role": role,
          "X-ORR-Actor": actor,
        },
        body: JSON.stringify({ to, reason }),
      }),
    );
  }

  async runProbes(
    id: string,
    options: { checkpoint_id?: string; region?: string } = {},
  ): Promise<{ revision: number; results: ProbeResultDoc[] }> {
    return unwrap(
      await this.fetcher(this.url(`/assessments/${id}/probes/run`), {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({
          checkpoint_id: options.checkpoint_id ?? null,
          region: options.region ?? null,
        }),
      }),
    );
  }
}
