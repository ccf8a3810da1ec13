/** Pure models for the two side panels: judgment elicitation (with live
 * measure gauges) and defeater controls (status toggles + what-if). */

import type {
  CaseNode,
  ConsistencyFinding,
  DefeaterStatus,
  ElicitKey,
  LevelName,
  MeasureValue,
  MeasuresResponse,
} from './types.js';

export const LEVELS: LevelName[] = [
  'certain',
  'very_confident',
  'confident',
  'neutral',
  'surprised',
  'very_surprised',
];

export const ELICIT_KEYS: ElicitKey[] = [
  'prior',
  'posterior',
  'likelihood',
  'likelihood_not',
  'marginal',
];

export const DEFEATER_STATUSES: DefeaterStatus[] = [
  'doubt',
  'investigating',
  'sustained',
  'refuted',
  'addressed',
  'residual',
];

/** Gauge text: finite values round to two decimals (0.2553 reads 0.26). */
export function measureDisplay(value: MeasureValue): string {
  if (value === '+inf' || value === '-inf') return value;
  return value.toFixed(2);
}

export interface GaugeReading {
  measure: string;
  value: MeasureValue;
  display: string;
}

export interface ElicitationField {
  name: ElicitKey;
  value: number | LevelName | null;
  source: 'numeric' | 'level' | 'empty';
}

export interface ElicitationPanelModel {
  node: string;
  kind: 'evidence' | 'assumption';
  readOnly: boolean;
  note?: string;
  assumedProb?: number;
  fields: ElicitationField[];
  levels: LevelName[];
  gauges: GaugeReading[];
  findings: ConsistencyFinding[];
}

export function buildElicitationPanel(
  node: CaseNode,
  measures: MeasuresResponse | null,
): ElicitationPanelModel {
  if (node.kind !== 'evidence' && node.kind !== 'assumption') {
    throw new Error(`elicitation panel needs evidence or an assumption, got ${node.kind}`);
  }
  if (node.kind === 'assumption') {
    return {
      node: node.id,
      kind: 'assumption',
      readOnly: true,
      note: 'assumption probabilities live in the case file',
      assumedProb: node.prob,
      fields: [],
      levels: LEVELS,
      gauges: [],
      findings: [],
    };
  }
  const elicit = node.elicit ?? {};
  const fields: ElicitationField[] = ELICIT_KEYS.map((name) => {
    const value = elicit[name];
    if (value === undefined) return { name, value: null, source: 'empty' };
    if (typeof value === 'number') return { name, value, source: 'numeric' };
    return { name, value, source: 'level' };
  });
  const gauges: GaugeReading[] = (measures?.measures ?? [])
    .filter((m) => m.measure === 'keynes' || m.measure === 'l_keynes' || m.measure === 'good')
    .map((m) => ({ measure: m.measure, value: m.value, display: measureDisplay(m.value) }));
  return {
    node: node.id,
    kind: 'evidence',
    readOnly: false,
    fields,
    levels: LEVELS,
    gauges,
    findings: measures?.findings ?? [],
  };
}

export type EntryValidation =
  | { ok: true; value: number | LevelName | null }
  | { ok: false; error: string };

/** Field-level validation: empty clears, a level name selects the level,
 * anything else must parse as a probability in [0,1]. */
export function validateEntry(raw: string): EntryValidation {
  const trimmed = raw.trim();
  if (trimmed === '') return { ok: true, value: null };
  if ((LEVELS as string[]).includes(trimmed)) {
    return { ok: true, value: trimmed as LevelName };
  }
  const value = Number(trimmed);
  if (!Number.isFinite(value)) {
    return { ok: false, error: `not a probability or level name: ${trimmed}` };
  }
  if (value < 0 || value > 1) {
    return { ok: false, error: `probability must lie in [0,1], got ${trimmed}` };
  }
  return { ok: true, value };
}

export interface DefeaterControlsModel {
  defeater: string;
  target?: string;
  claim?: string;
  exactness: 'exploratory' | 'exact';
  statuses: DefeaterStatus[];
  current: DefeaterStatus;
  whatIf: boolean;
  previewBanner?: string;
}

export function buildDefeaterControls(node: CaseNode, whatIf = false): DefeaterControlsModel {
  if (node.kind !== 'defeater') {
    throw new Error(`defeater controls need a defeater, got ${node.kind}`);
  }
  return {
    defeater: node.id,
    target: node.targets,
    claim: node.claim,
    exactness: node.exactness ?? 'exploratory',
    statuses: DEFEATER_STATUSES,
    current: node.status ?? 'doubt',
    whatIf,
    previewBanner: whatIf ? 'preview - not saved' : undefined,
  };
}
