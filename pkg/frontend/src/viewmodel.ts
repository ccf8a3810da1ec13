/** View model: one glyph per node, styled purely from service responses.
 *
 * The UI computes nothing itself: every badge, color, and label is read
 * off the validity/confidence payloads for one revision.  A view model
 * therefore always reflects a single service revision; the app marks the
 * whole view stale when the session has moved past it.
 */

import { canvasSize, layout } from './layout.js';
import { assessmentColor, nodeDashed, nodeRounded, nodeShape, Shape } from './style.js';
import type {
  AssessmentValue,
  CaseDoc,
  CaseNode,
  ConfidenceResponse,
  ValidityResponse,
} from './types.js';

export class ViewError extends Error {}

export interface NodeGlyph {
  id: string;
  kind: CaseNode['kind'];
  shape: Shape;
  color: string;
  dashed: boolean;
  rounded: boolean;
  label: string;
  assessment?: AssessmentValue;
  cause?: string;
  bypassed: boolean;
  confidence?: number;
  confidenceLabel?: string; // shown on hover
  x: number;
  y: number;
  selected: boolean;
}

export interface EdgeGlyph {
  from: string;
  to: string;
  kind: 'support' | 'sub' | 'side' | 'target';
  exact: boolean;
  dashed: boolean;
  label?: string;
}

export interface ViewModel {
  title: string;
  revision: number;
  stale: boolean;
  soundness?: 'sound' | 'not-sound';
  nodes: NodeGlyph[];
  edges: EdgeGlyph[];
  warnings: string[];
  width: number;
  height: number;
}

function shortText(node: CaseNode): string {
  const text =
    node.text ?? node.description ?? node.claim ?? node.narrative ?? node.block ?? '';
  const s = typeof text === 'string' ? text : '';
  return s.length > 34 ? `${s.slice(0, 31)}...` : s;
}

function checkCaseDoc(doc: CaseDoc): void {
  if (!doc || !Array.isArray(doc.nodes)) {
    throw new ViewError('malformed case payload: missing nodes');
  }
  const seen = new Set<string>();
  for (const n of doc.nodes) {
    if (typeof n.id !== 'string' || typeof n.kind !== 'string') {
      throw new ViewError('malformed case payload: node without id/kind');
    }
    if (seen.has(n.id)) throw new ViewError(`malformed case payload: duplicate node ${n.id}`);
    seen.add(n.id);
  }
}

export function buildViewModel(
  doc: CaseDoc,
  validity: ValidityResponse | null,
  confidence: ConfidenceResponse | null,
  revision: number,
  options?: { selection?: string | null; stale?: boolean },
): ViewModel {
  checkCaseDoc(doc);
  if (validity && validity.revision !== revision) {
    throw new ViewError(
      `validity payload is for revision ${validity.revision}, expected ${revision}`,
    );
  }
  if (confidence && confidence.revision !== revision) {
    throw new ViewError(
      `confidence payload is for revision ${confidence.revision}, expected ${revision}`,
    );
  }

  const placements = layout(doc);
  const values = validity?.assessment?.values ?? {};
  const causes = validity?.assessment?.causes ?? {};
  const bypassed = new Set(validity?.assessment?.bypassed ?? []);

  const nodes: NodeGlyph[] = doc.nodes
    .slice()
    .sort((a, b) => a.id.localeCompare(b.id))
    .map((n) => {
      const place = placements.get(n.id)!;
      const assessment = values[n.id];
      const conf = confidence?.values[n.id];
      return {
        id: n.id,
        kind: n.kind,
        shape: nodeShape(n),
        color: assessmentColor(assessment),
        dashed: nodeDashed(n) || bypassed.has(n.id),
        rounded: nodeRounded(n),
        label: shortText(n),
        assessment,
        cause: causes[n.id],
        bypassed: bypassed.has(n.id),
        confidence: conf,
        confidenceLabel: conf === undefined ? undefined : `conf=${formatConfidence(conf)}`,
        x: place.x,
        y: place.y,
        selected: options?.selection === n.id,
      };
    });

  const edges: EdgeGlyph[] = [];
  for (const n of doc.nodes) {
    if (n.kind === 'block' && n.parent) {
      edges.push({ from: n.parent, to: n.id, kind: 'support', exact: false, dashed: false });
      for (const sub of n.sub ?? []) {
        edges.push({ from: n.id, to: sub, kind: 'sub', exact: false, dashed: false });
      }
      if (n.side) {
        edges.push({ from: n.id, to: n.side, kind: 'side', exact: false, dashed: false, label: 'side' });
      }
    } else if (n.kind === 'defeater' && n.targets) {
      const exact = n.exactness === 'exact';
      edges.push({
        from: n.id,
        to: n.targets,
        kind: 'target',
        exact,
        dashed: n.status === 'addressed',
        label: exact ? 'exact' : undefined,
      });
    }
  }
  edges.sort((a, b) => (a.from + a.to).localeCompare(b.from + b.to));

  const { width, height } = canvasSize(placements);
  return {
    title: doc.title,
    revision,
    stale: options?.stale ?? false,
    soundness: validity?.soundness,
    nodes,
    edges,
    warnings: validity?.assessment?.warnings ?? [],
    width,
    height,
  };
}

export function formatConfidence(v: number): string {
  return Number(v.toPrecision(3)).toString();
}
