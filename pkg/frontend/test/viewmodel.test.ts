import { describe, expect, it } from 'vitest';

import { ASSESSMENT_COLORS, NODE_SHAPES } from '../src/style.js';
import type { CaseResponse, ValidityResponse } from '../src/types.js';
import { buildViewModel, formatConfidence, ViewError } from '../src/viewmodel.js';
import { renderSvg } from '../src/rendersvg.js';
import bundleJson from './fixtures.json';

const bundle = bundleJson as {
  scenarios: Record<string, Record<string, unknown>>;
};

function scenario(name: string) {
  const sc = bundle.scenarios[name];
  const caseResponse = sc.case as CaseResponse;
  const validity = sc.validity as ValidityResponse;
  return { sc, doc: caseResponse.case, validity, revision: validity.revision };
}

describe('buildViewModel', () => {
  for (const name of ['sound', 'doubt', 'exoneration', 'eliminative', 'residuals']) {
    it(`colors every node from the service assessment (${name})`, () => {
      const { doc, validity, revision } = scenario(name);
      const vm = buildViewModel(doc, validity, null, revision);
      expect(vm.nodes).toHaveLength(doc.nodes.length);
      const values = validity.assessment!.values;
      for (const glyph of vm.nodes) {
        expect(glyph.assessment).toBe(values[glyph.id]);
        expect(glyph.color).toBe(ASSESSMENT_COLORS[values[glyph.id]]);
      }
    });
  }

  it('shapes nodes by kind per the style table', () => {
    const { doc, validity, revision } = scenario('eliminative');
    const vm = buildViewModel(doc, validity, null, revision);
    const byId = new Map(vm.nodes.map((n) => [n.id, n]));
    expect(byId.get('P')!.shape).toBe(NODE_SHAPES.claim);
    expect(byId.get('X')!.shape).toBe('octagon');
    expect(byId.get('HAZ')!.shape).toBe('diamond');
    expect(byId.get('EH1')!.shape).toBe('note');
    expect(byId.get('HW')!.rounded).toBe(true);
  });

  it('labels confidence from the service response only', () => {
    const { sc, doc, validity, revision } = scenario('sound');
    const confidence = sc.confidence_product as never;
    const vm = buildViewModel(doc, validity, confidence, revision);
    const values = (confidence as { values: Record<string, number> }).values;
    for (const glyph of vm.nodes) {
      if (glyph.id in values) {
        expect(glyph.confidence).toBe(values[glyph.id]);
        expect(glyph.confidenceLabel).toBe(`conf=${formatConfidence(values[glyph.id])}`);
      } else {
        expect(glyph.confidenceLabel).toBeUndefined();
      }
    }
  });

  it('marks exact defeater edges distinctly', () => {
    const { doc, validity, revision } = scenario('eliminative');
    const vm = buildViewModel(doc, validity, null, revision);
    const exact = vm.edges.filter((e) => e.exact);
    expect(exact.map((e) => `${e.from}->${e.to}`)).toContain('X->P');
    for (const e of exact) expect(e.label).toBe('exact');
  });

  it('keeps the top claim at the top and defeaters lateral', () => {
    const { doc, validity, revision } = scenario('doubt');
    const vm = buildViewModel(doc, validity, null, revision);
    const byId = new Map(vm.nodes.map((n) => [n.id, n]));
    const top = byId.get('TC')!;
    for (const glyph of vm.nodes) expect(top.y).toBeLessThanOrEqual(glyph.y);
    const defeater = byId.get('D1')!;
    const sameRowMain = vm.nodes.filter((n) => n.y === defeater.y && n.kind !== 'defeater');
    for (const other of sameRowMain) expect(defeater.x).toBeGreaterThan(other.x);
  });

  it('marks bypassed residual doubts', () => {
    const { doc, validity, revision } = scenario('residuals');
    const vm = buildViewModel(doc, validity, null, revision);
    const r1 = vm.nodes.find((n) => n.id === 'R01')!;
    expect(r1.bypassed).toBe(true);
    expect(r1.dashed).toBe(true);
  });

  it('rejects payloads from another revision', () => {
    const { doc, validity } = scenario('sound');
    expect(() => buildViewModel(doc, validity, null, validity.revision + 1)).toThrow(ViewError);
  });

  it('rejects malformed case payloads', () => {
    const { validity, revision } = scenario('sound');
    expect(() =>
      buildViewModel({ title: 'x', nodes: [{ id: 'a' } as never] }, validity, null, revision),
    ).toThrow(ViewError);
    expect(() =>
      buildViewModel(
        { title: 'x', nodes: 'nope' as never },
        validity,
        null,
        revision,
      ),
    ).toThrow(ViewError);
  });
});

describe('renderSvg', () => {
  it('renders one glyph per node with tooltips and badges', () => {
    const { sc, doc, validity, revision } = scenario('sound');
    const vm = buildViewModel(doc, validity, sc.confidence_product as never, revision);
    const svg = renderSvg(vm);
    for (const n of vm.nodes) {
      expect(svg).toContain(`data-node="${n.id}"`);
    }
    expect(svg.match(/data-node=/g)!.length).toBe(doc.nodes.length);
    expect(svg).toContain('conf=');
    expect(svg).toContain(`data-revision="${revision}"`);
  });

  it('shows the stale watermark when flagged', () => {
    const { doc, validity, revision } = scenario('sound');
    const vm = buildViewModel(doc, validity, null, revision, { stale: true });
    expect(renderSvg(vm)).toContain('stale view');
  });
});
