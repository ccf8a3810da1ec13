/** Fixed visual vocabulary, mirroring docs/style-table.md. */

import type { AssessmentValue, CaseNode, NodeKind } from './types.js';

export type Shape = 'box' | 'diamond' | 'note' | 'octagon' | 'folder';

export const NODE_SHAPES: Record<NodeKind, Shape> = {
  claim: 'box',
  assumption: 'box',
  residual: 'box',
  block: 'diamond',
  evidence: 'note',
  defeater: 'octagon',
  subcase: 'folder',
};

export const ASSESSMENT_COLORS: Record<AssessmentValue, string> = {
  TRUE: 'palegreen',
  FALSE: 'lightcoral',
  UNSUPPORTED: 'lightgray',
};

export const NO_ASSESSMENT_COLOR = 'white';

export function nodeShape(node: CaseNode): Shape {
  return NODE_SHAPES[node.kind];
}

export function assessmentColor(value: AssessmentValue | undefined): string {
  return value === undefined ? NO_ASSESSMENT_COLOR : ASSESSMENT_COLORS[value];
}

/** Dashed outline: residual doubts and addressed defeaters. */
export function nodeDashed(node: CaseNode): boolean {
  if (node.kind === 'residual') return true;
  return node.kind === 'defeater' && node.status === 'addressed';
}

export function nodeRounded(node: CaseNode): boolean {
  return node.kind === 'assumption';
}
