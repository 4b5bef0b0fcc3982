/** Wire documents as the service emits them. The client treats these as
 * read-only facts; applicability, scores and colors are always the server's
 * word, never recomputed here. */

export type CheckpointStatusName =
  | "Unanswered"
  | "InProgress"
  | "Compliant"
  | "NonCompliant";

export type RoleName =
  | "ChangeOwner"
  | "ChangeManager"
  | "LeadershipAuthorizer"
  | "Observer";

export interface TemplateRef {
  name: string;
  version: string;
}

export interface CheckpointDoc {
  id: string;
  prompt: string;
  applicability: string;
  evidence_required: boolean;
  guidance: string;
  probe: Record<string, unknown> | null;
}

export interface CategoryDoc {
  key: string;
  name: string;
  checkpoints: CheckpointDoc[];
}

export interface TemplateDoc {
  name: string;
  version: string;
  profile_schema: { attributes: { name: string; kind: string; values?: string[] }[] };
  thresholds: Record<string, number>;
  categories: CategoryDoc[];
}

export interface ProfileDoc {
  attributes: Record<string, boolean | number | string>;
  regions: string[];
  release_kind: string;
  application: string;
}

export interface EvidenceDoc {
  description: string;
  kind: string;
  digest: string;
}

export interface AnswerDoc {
  checkpoint_id: string;
  region: string;
  status: CheckpointStatusName;
  note: string;
  evidence: EvidenceDoc | null;
  answered_by: string;
  answered_at: string;
}

export interface SignoffDoc {
  role: RoleName;
  actor: string;
  revision: number;
  signed_at: string;
}

export interface WorkflowDoc {
  state: string;
  signoffs: SignoffDoc[];
  history: { from: string; to: string; actor: string; at: string }[];
}

export interface AssessmentDoc {
  id: string;
  template: TemplateRef;
  profile: ProfileDoc;
  answers: AnswerDoc[];
  archived_answers: AnswerDoc[];
  workflow: WorkflowDoc;
  revision: number;
  created_at: string;
  /** Server-decided; the questionnaire never shows a checkpoint outside it. */
  applicable_checkpoints: string[];
}

export interface CellDoc {
  compliant: number;
  applicable: number;
  score: number | null;
  color: "green" | "yellow" | "red" | "grey";
}

export interface ScorecardDoc {
  assessment_id: string;
  template: TemplateRef;
  regions: string[];
  thresholds: Record<string, number>;
  categories: { key: string; name: string; cells: Record<string, CellDoc> }[];
  overall: Record<string, CellDoc>;
  gate_passed: Record<string, boolean>;
}

export interface ProbeResultDoc {
  checkpoint_id: string;
  outcome: "Pass" | "Fail" | "Error";
  observed: string;
  attempts: number;
  duration_ms: number;
}

/** 409 body for a refused approval: region -> [category name, score] rows. */
export interface GateShortfalls {
  [region: string]: [string, number][];
}

export interface ApiErrorBody {
  error: string;
  detail: string;
  shortfalls?: GateShortfalls;
  expected?: number;
  actual?: number;
}

export interface AnswerEdit {
  checkpoint_id: string;
  region: string;
  status: CheckpointStatusName;
  note?: string;
  evidence?: { description: string; content_base64: string };
}

/** One browser tab's working state. */
export interface UiSession {
  baseUrl: string;
  role: RoleName;
  actor: string;
  assessment: AssessmentDoc | null;
  scorecard: ScorecardDoc | null;
  /** Set when the server refused an edit; cleared by reload. */
  banner: string | null;
  /** True once the server said LockedState: render everything read-only. */
  readOnly: boolean;
  /** The last refused approval, for the shortfall panel. */
  shortfalls: GateShortfalls | null;
}
