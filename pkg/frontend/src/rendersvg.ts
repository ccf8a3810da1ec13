/** Pure SVG rendering of a view model (the interactive canvas body).
 * Node glyphs carry data-node attributes for event wiring and <title>
 * tooltips exposing confidence and cause on hover. */

import type { EdgeGlyph, NodeGlyph, ViewModel } from './viewmodel.js';

const NODE_W = 120;
const NODE_H = 54;

function esc(s: string): string {
  return s
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

function shapePath(node: NodeGlyph): string {
  const { x, y } = node;
  const w = NODE_W / 2;
  const h = NODE_H / 2;
  const stroke = node.selected ? 'stroke="black" stroke-width="3"' : 'stroke="gray" stroke-width="1.5"';
  const dash = node.dashed ? 'stroke-dasharray="6 3"' : '';
  const fill = `fill="${node.color}"`;
  const common = `${fill} ${stroke} ${dash}`;
  switch (node.shape) {
    case 'diamond':
      return `<polygon points="${x},${y - h} ${x + w},${y} ${x},${y + h} ${x - w},${y}" ${common}/>`;
    case 'octagon': {
      const k = 14;
      const points = [
        [x - w + k, y - h], [x + w - k, y - h], [x + w, y - h + k], [x + w, y + h - k],
        [x + w - k, y + h], [x - w + k, y + h], [x - w, y + h - k], [x - w, y - h + k],
      ].map((p) => p.join(',')).join(' ');
      return `<polygon points="${points}" ${common}/>`;
    }
    case 'note': {
      const f = 12;
      const points = [
        [x - w, y - h], [x + w - f, y - h], [x + w, y - h + f], [x + w, y + h], [x - w, y + h],
      ].map((p) => p.join(',')).join(' ');
      const fold = `<polyline points="${x + w - f},${y - h} ${x + w - f},${y - h + f} ${x + w},${y - h + f}" fill="none" stroke="gray"/>`;
      return `<polygon points="${points}" ${common}/>${fold}`;
    }
    case 'folder': {
      const tab = `<rect x="${x - w}" y="${y - h - 8}" width="42" height="10" ${common}/>`;
      return `${tab}<rect x="${x - w}" y="${y - h}" width="${NODE_W}" height="${NODE_H}" ${common}/>`;
    }
    default: {
      const radius = node.rounded ? 'rx="12" ry="12"' : '';
      return `<rect x="${x - w}" y="${y - h}" width="${NODE_W}" height="${NODE_H}" ${radius} ${common}/>`;
    }
  }
}

function nodeSvg(node: NodeGlyph): string {
  const badge = node.assessment
    ? `<text x="${node.x}" y="${node.y + 18}" text-anchor="middle" font-size="9" fill="#444">${esc(
        node.assessment + (node.bypassed ? ' (bypassed)' : ''),
      )}</text>`
    : '';
  const tooltip: string[] = [node.id];
  if (node.confidenceLabel) tooltip.push(node.confidenceLabel);
  if (node.cause) tooltip.push(node.cause);
  return [
    `<g class="node" data-node="${esc(node.id)}" cursor="pointer">`,
    shapePath(node),
    `<title>${esc(tooltip.join('\n'))}</title>`,
    `<text x="${node.x}" y="${node.y - 8}" text-anchor="middle" font-size="11" font-weight="bold">${esc(node.id)}</text>`,
    `<text x="${node.x}" y="${node.y + 5}" text-anchor="middle" font-size="8.5">${esc(node.label)}</text>`,
    badge,
    '</g>',
  ].join('');
}

function edgeSvg(edge: EdgeGlyph, nodes: Map<string, NodeGlyph>): string {
  const from = nodes.get(edge.from);
  const to = nodes.get(edge.to);
  if (!from || !to) return '';
  const color = edge.kind === 'target' ? 'firebrick' : '#555';
  const marker =
    edge.kind === 'target' ? (edge.exact ? 'url(#exact)' : 'url(#challenge)') : 'url(#arrow)';
  const dash = edge.dashed ? 'stroke-dasharray="6 3"' : edge.kind === 'side' ? 'stroke-dasharray="2 3"' : '';
  const midX = (from.x + to.x) / 2;
  const midY = (from.y + to.y) / 2;
  const label = edge.label
    ? `<text x="${midX + 6}" y="${midY - 4}" font-size="9" fill="${color}">${esc(edge.label)}</text>`
    : '';
  return (
    `<line x1="${from.x}" y1="${from.y + NODE_H / 2}" x2="${to.x}" y2="${to.y - NODE_H / 2}" ` +
    `stroke="${color}" stroke-width="1.4" ${dash} marker-end="${marker}"/>` + label
  );
}

const DEFS = `
<defs>
  <marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse">
    <path d="M 0 0 L 10 5 L 0 10 z" fill="#555"/>
  </marker>
  <marker id="challenge" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="8" markerHeight="8" orient="auto-start-reverse">
    <path d="M 0 0 L 10 5 L 0 10 z" fill="none" stroke="firebrick"/>
  </marker>
  <marker id="exact" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="8" markerHeight="8" orient="auto-start-reverse">
    <rect x="1" y="1" width="8" height="8" fill="firebrick"/>
  </marker>
</defs>`;

export function renderSvg(vm: ViewModel): string {
  const byId = new Map(vm.nodes.map((n) => [n.id, n]));
  const edges = vm.edges.map((e) => edgeSvg(e, byId)).join('\n');
  const nodes = vm.nodes.map(nodeSvg).join('\n');
  const stale = vm.stale
    ? `<text x="${vm.width / 2}" y="20" text-anchor="middle" fill="darkorange" font-size="13">stale view - refreshing</text>`
    : '';
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${vm.width} ${vm.height}" ` +
    `width="${vm.width}" height="${vm.height}" font-family="sans-serif" data-revision="${vm.revision}">` +
    `${DEFS}\n${stale}\n${edges}\n${nodes}\n</svg>`
  );
}
