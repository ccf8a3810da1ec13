/** Payload types for the case service API (see ../docs/api.md). */

export type AssessmentValue = 'TRUE' | 'FALSE' | 'UNSUPPORTED';

export type NodeKind =
  | 'claim'
  | 'assumption'
  | 'residual'
  | 'evidence'
  | 'block'
  | 'defeater'
  | 'subcase';

export type BlockKindName =
  | 'decomposition'
  | 'substitution'
  | 'concretion'
  | 'calculation'
  | 'incorporation';

export type DefeaterStatus =
  | 'doubt'
  | 'investigating'
  | 'sustained'
  | 'refuted'
  | 'addressed'
  | 'residual';

export type LevelName =
  | 'certain'
  | 'very_confident'
  | 'confident'
  | 'neutral'
  | 'surprised'
  | 'very_surprised';

export type ElicitKey = 'prior' | 'posterior' | 'likelihood' | 'likelihood_not' | 'marginal';

export interface CaseNode {
  kind: NodeKind;
  id: string;
  text?: string;
  justification?: string;
  prob?: number;
  likelihood?: number;
  consequence?: number;
  class?: string;
  description?: string;
  assembly?: string;
  posterior?: number;
  accepted?: boolean;
  elicit?: Partial<Record<ElicitKey, number | LevelName>>;
  block?: BlockKindName;
  parent?: string;
  mode?: 'conjunctive' | 'disjunctive';
  side?: string;
  sub?: string[];
  targets?: string;
  exactness?: 'exploratory' | 'exact';
  status?: DefeaterStatus;
  claim?: string;
  narrative?: string;
  external?: string;
  assessed?: 'true' | 'false' | 'unsupported';
}

export interface CaseDoc {
  title: string;
  top?: string;
  nodes: CaseNode[];
}

export interface CaseResponse {
  case: CaseDoc;
  revision: number;
}

export interface StructuralFinding {
  code: string;
  node: string | null;
  message: string;
  blocking: boolean;
}

export interface AssessmentPayload {
  values: Record<string, AssessmentValue>;
  causes: Record<string, string>;
  bypassed: string[];
  warnings: string[];
}

export interface ActiveDefeater {
  defeater: string;
  affected: string;
  assessment: AssessmentValue;
  diagnosis: string;
}

export interface ValidityResponse {
  revision: number;
  structural_findings: StructuralFinding[];
  assessment: AssessmentPayload | null;
  active_defeaters: ActiveDefeater[];
  soundness: 'sound' | 'not-sound';
  soundness_reasons: string[];
}

export interface ConfidenceResponse {
  revision: number;
  method: 'product' | 'sum-of-doubts';
  values: Record<string, number>;
  provenance: Record<string, string>;
  lints: string[];
  caveat: string;
}

export type MeasureValue = number | '+inf' | '-inf';

export interface MeasureEntry {
  measure: 'keynes' | 'l_keynes' | 'good' | 'carnap';
  value: MeasureValue;
  base: number | null;
}

export interface ConsistencyFinding {
  code: string;
  message: string;
  delta: MeasureValue;
}

export interface MeasuresResponse {
  revision: number;
  node: string;
  base: number;
  measures: MeasureEntry[];
  findings: ConsistencyFinding[];
}

export interface RiskEntry {
  node: string;
  likelihood: number;
  consequence: number;
  class: string;
  risk: number;
  category: 'Significant' | 'Minor' | 'Manageable' | 'Negligible';
}

export interface RisksResponse {
  revision: number;
  thresholds: { individual: number; class: number; negligible: number };
  entries: RiskEntry[];
  classes: Record<string, { total_risk: number; manageable: boolean; entries: string[] }>;
  gate: { acceptable: boolean; offenders: string[] } | null;
  pending: string[];
}

export interface ApiErrorBody {
  code: string;
  message: string;
  span?: { file: string; line: number; column: number; length: number };
}
