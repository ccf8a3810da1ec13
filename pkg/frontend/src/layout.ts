/** Layered top-down layout: top claim at depth 0, support below it,
 * defeaters (and their subcases) offset laterally at their target's depth. */

import type { CaseDoc, CaseNode } from './types.js';

export interface Placement {
  x: number;
  y: number;
  depth: number;
  lateral: boolean; // true for defeaters and nodes inside defeater subcases
}

export const COLUMN_WIDTH = 150;
export const ROW_HEIGHT = 110;
export const MARGIN_X = 90;
export const MARGIN_Y = 60;
export const LATERAL_GAP = 1; // empty columns between argument and defeater zone

function indexNodes(doc: CaseDoc): Map<string, CaseNode> {
  return new Map(doc.nodes.map((n) => [n.id, n]));
}

function supportChildren(node: CaseNode): string[] {
  if (node.kind !== 'block') return [];
  const out: string[] = [];
  if (node.side) out.push(node.side);
  for (const sub of node.sub ?? []) out.push(sub);
  return out;
}

export function layout(doc: CaseDoc): Map<string, Placement> {
  const nodes = indexNodes(doc);
  const blocksByParent = new Map<string, string[]>();
  for (const n of doc.nodes) {
    if (n.kind === 'block' && n.parent) {
      const list = blocksByParent.get(n.parent) ?? [];
      list.push(n.id);
      blocksByParent.set(n.parent, list);
    }
  }

  const depth = new Map<string, number>();
  const lateral = new Set<string>();

  const descend = (rootId: string, rootDepth: number, markLateral: boolean): void => {
    const queue: Array<[string, number]> = [[rootId, rootDepth]];
    while (queue.length) {
      const [id, d] = queue.shift()!;
      const known = depth.get(id);
      if (known !== undefined && known <= d) continue;
      depth.set(id, d);
      if (markLateral) lateral.add(id);
      const node = nodes.get(id);
      if (!node) continue;
      for (const blockId of blocksByParent.get(id) ?? []) {
        queue.push([blockId, d + 1]);
      }
      if (node.kind === 'block') {
        for (const child of supportChildren(node)) queue.push([child, d + 1]);
      }
    }
  };

  if (doc.top && nodes.has(doc.top)) descend(doc.top, 0, false);

  // attach defeaters next to what they challenge, repeating for chains
  for (let pass = 0; pass < doc.nodes.length; pass += 1) {
    let placed = false;
    for (const n of doc.nodes) {
      if (n.kind !== 'defeater' || depth.has(n.id)) continue;
      const targetDepth = n.targets ? depth.get(n.targets) : undefined;
      if (targetDepth === undefined) continue;
      descend(n.id, targetDepth, true);
      depth.set(n.id, targetDepth);
      placed = true;
    }
    if (!placed) break;
  }

  // anything still unplaced (malformed or detached) parks at the bottom
  const maxDepth = Math.max(0, ...depth.values());
  for (const n of doc.nodes) {
    if (!depth.has(n.id)) {
      depth.set(n.id, maxDepth + 1);
      lateral.add(n.id);
    }
  }

  // column assignment: main argument left, lateral zone right, stable order
  const layers = new Map<number, { main: string[]; side: string[] }>();
  const order = [...doc.nodes].sort((a, b) => a.id.localeCompare(b.id));
  for (const n of order) {
    const d = depth.get(n.id)!;
    const layer = layers.get(d) ?? { main: [], side: [] };
    (lateral.has(n.id) ? layer.side : layer.main).push(n.id);
    layers.set(d, layer);
  }
  const widest = Math.max(...[...layers.values()].map((l) => l.main.length), 1);

  const placements = new Map<string, Placement>();
  for (const [d, layer] of layers) {
    layer.main.forEach((id, i) => {
      placements.set(id, {
        x: MARGIN_X + i * COLUMN_WIDTH,
        y: MARGIN_Y + d * ROW_HEIGHT,
        depth: d,
        lateral: false,
      });
    });
    layer.side.forEach((id, i) => {
      placements.set(id, {
        x: MARGIN_X + (widest + LATERAL_GAP + i) * COLUMN_WIDTH,
        y: MARGIN_Y + d * ROW_HEIGHT,
        depth: d,
        lateral: true,
      });
    });
  }
  return placements;
}

export function canvasSize(placements: Map<string, Placement>): { width: number; height: number } {
  let width = 2 * MARGIN_X;
  let height = 2 * MARGIN_Y;
  for (const p of placements.values()) {
    width = Math.max(width, p.x + MARGIN_X);
    height = Math.max(height, p.y + MARGIN_Y);
  }
  return { width, height };
}
