/** In-memory service double implementing the published API schema.
 *
 * Serves responses recorded from the real service by
 * scripts/gen_fixtures.py, so anything the UI renders from this mock is
 * byte-for-byte a genuine service payload (with the revision counter
 * maintained by the mock, as the real session would).  Mutations move
 * between recorded scenarios: sound --add doubt--> doubt --refute-->
 * exoneration, and the minimal scenario records the elicitation flow.
 */

import type { FetchLike } from '../src/api.js';
import type { CaseDoc, CaseResponse } from '../src/types.js';

type Json = Record<string, unknown>;

export interface ScenarioBundle {
  scenarios: Record<string, Record<string, unknown>>;
}

interface Reply {
  status: number;
  body: unknown;
}

const LEVEL_NAMES = new Set([
  'certain',
  'very_confident',
  'confident',
  'neutral',
  'surprised',
  'very_surprised',
]);
const ELICIT_KEYS = new Set(['prior', 'posterior', 'likelihood', 'likelihood_not', 'marginal']);
const STATUSES = new Set([
  'doubt',
  'investigating',
  'sustained',
  'refuted',
  'addressed',
  'residual',
]);

function canonical(value: unknown): string {
  return JSON.stringify(value, Object.keys((value as Json) ?? {}).sort());
}

export class MockService {
  revision = 1;
  scenario: string;
  private elicited = false;

  constructor(
    private readonly bundle: ScenarioBundle,
    scenario: string,
  ) {
    if (!bundle.scenarios[scenario]) throw new Error(`no recorded scenario ${scenario}`);
    this.scenario = scenario;
  }

  private sc(key: string): unknown {
    const current = this.bundle.scenarios[this.scenario];
    return current ? current[key] : undefined;
  }

  private caseDoc(): CaseDoc {
    const key = this.scenario === 'minimal' && this.elicited ? 'case_after' : 'case';
    return (this.sc(key) as CaseResponse).case;
  }

  private withRevision(payload: unknown): Json {
    return { ...(payload as Json), revision: this.revision };
  }

  /** Drop-in fetch replacement for ApiClient. */
  fetch: FetchLike = async (url, init) => {
    const reply = this.dispatch(url, init);
    return {
      status: reply.status,
      json: async () => reply.body,
      text: async () => JSON.stringify(reply.body),
    };
  };

  private error(status: number, code: string, message: string): Reply {
    return { status, body: { code, message } };
  }

  private dispatch(
    url: string,
    init?: { method?: string; headers?: Record<string, string>; body?: string },
  ): Reply {
    const method = init?.method ?? 'GET';
    const [path, queryString] = url.split('?', 2);
    const query = new Map<string, string>();
    for (const pair of (queryString ?? '').split('&')) {
      if (!pair) continue;
      const [k, v] = pair.split('=', 2);
      query.set(decodeURIComponent(k), decodeURIComponent(v ?? ''));
    }

    let body: Json | undefined;
    if (init?.body !== undefined) {
      if ((init.headers?.['Content-Type'] ?? '') !== 'application/json') {
        return this.error(400, 'bad-content-type', 'request bodies must be application/json');
      }
      try {
        body = JSON.parse(init.body) as Json;
      } catch {
        return this.error(400, 'malformed-body', 'bad JSON');
      }
    }

    const mutating = method !== 'GET';
    const ifMatch = init?.headers?.['If-Match'];
    if (mutating && ifMatch !== undefined && Number(ifMatch) !== this.revision) {
      return this.error(
        409,
        'revision-conflict',
        `expected revision ${ifMatch} but the session is at revision ${this.revision}`,
      );
    }

    if (method === 'GET' && path === '/api/case') {
      return { status: 200, body: { case: this.caseDoc(), revision: this.revision } };
    }

    if (method === 'GET' && path === '/api/assessment/validity') {
      const ignore = query.get('ignore');
      if (ignore) {
        const preview = this.sc(`validity_ignore_${ignore.replace(',', '_')}`);
        if (!preview) return this.error(404, 'unknown-node', `no defeater named ${ignore}`);
        return { status: 200, body: this.withRevision(preview) };
      }
      return { status: 200, body: this.withRevision(this.sc('validity')) };
    }

    if (method === 'GET' && path === '/api/assessment/confidence') {
      const methodName = query.get('method') ?? 'product';
      if (methodName !== 'product' && methodName !== 'doubts') {
        return this.error(422, 'bad-method', `method must be 'product' or 'doubts'`);
      }
      const exploratory = query.get('exploratory') === '1';
      const plain = this.sc(`confidence_${methodName}`);
      if (plain) return { status: 200, body: this.withRevision(plain) };
      const acknowledged = this.sc(`confidence_${methodName}_exploratory`);
      if (acknowledged && exploratory) {
        return { status: 200, body: this.withRevision(acknowledged) };
      }
      return this.error(422, 'precondition', 'case is not sound; pass exploratory=1');
    }

    const measuresMatch = path.match(/^\/api\/nodes\/([^/]+)\/measures$/);
    if (method === 'GET' && measuresMatch) {
      const nodeId = measuresMatch[1];
      const node = this.caseDoc().nodes.find((n) => n.id === nodeId);
      if (!node) return this.error(404, 'unknown-node', `no node named ${nodeId}`);
      if (node.kind !== 'evidence') {
        return this.error(422, 'not-evidence', `${nodeId} is a ${node.kind}, not evidence`);
      }
      if (this.scenario === 'minimal' && nodeId === 'E1') {
        const key = this.elicited ? 'measures_after' : 'measures_before';
        return { status: 200, body: this.withRevision(this.sc(key)) };
      }
      const table = (this.sc('measures') as Record<string, unknown>) ?? {};
      if (table[nodeId]) return { status: 200, body: this.withRevision(table[nodeId]) };
      return this.error(404, 'unknown-node', `mock has no measures recorded for ${nodeId}`);
    }

    const elicitMatch = path.match(/^\/api\/nodes\/([^/]+)\/elicitation$/);
    if (method === 'PATCH' && elicitMatch) {
      const nodeId = elicitMatch[1];
      const node = this.caseDoc().nodes.find((n) => n.id === nodeId);
      if (!node) return this.error(404, 'unknown-node', `no node named ${nodeId}`);
      if (node.kind !== 'evidence') {
        return this.error(422, 'not-evidence', `${nodeId} is a ${node.kind}, not evidence`);
      }
      for (const [key, value] of Object.entries(body ?? {})) {
        if (!ELICIT_KEYS.has(key)) {
          return this.error(422, 'bad-elicitation', `unknown elicitation entry '${key}'`);
        }
        if (typeof value === 'string' && !LEVEL_NAMES.has(value)) {
          return this.error(422, 'bad-elicitation', `unknown qualitative level '${value}'`);
        }
        if (typeof value === 'number' && (value < 0 || value > 1)) {
          return this.error(422, 'bad-elicitation', `${key} must lie in [0,1]`);
        }
      }
      if (this.scenario === 'minimal' && canonical(body) === canonical(this.sc('elicit_patch'))) {
        this.elicited = true;
        this.revision += 1;
        return { status: 200, body: this.withRevision(this.sc('elicit_response')) };
      }
      return this.error(422, 'precondition', 'mock only records the neutral->confident judgment');
    }

    const defeaterMatch = path.match(/^\/api\/defeaters\/([^/]+)$/);
    if (method === 'PATCH' && defeaterMatch) {
      const defeaterId = defeaterMatch[1];
      const node = this.caseDoc().nodes.find((n) => n.id === defeaterId);
      if (!node || node.kind !== 'defeater') {
        return this.error(404, 'unknown-node', `no defeater named ${defeaterId}`);
      }
      const status = body?.status;
      if (typeof status !== 'string' || !STATUSES.has(status)) {
        return this.error(422, 'bad-status', `unknown status '${String(status)}'`);
      }
      if (this.scenario === 'doubt' && status === 'refuted') this.scenario = 'exoneration';
      else if (this.scenario === 'exoneration' && status === 'doubt') this.scenario = 'doubt';
      else return this.error(422, 'precondition', 'mock: transition not recorded');
      this.revision += 1;
      return { status: 200, body: { revision: this.revision, defeater: defeaterId, status } };
    }

    if (method === 'POST' && path === '/api/defeaters') {
      const target = body?.targets;
      if (typeof target !== 'string') {
        return this.error(422, 'bad-target', `body must carry a 'targets' node id`);
      }
      if (!this.caseDoc().nodes.some((n) => n.id === target)) {
        return this.error(422, 'invalid-case', `unknown target ${target}`);
      }
      if (this.scenario === 'sound' && target === 'SUBR') {
        this.scenario = 'doubt';
        this.revision += 1;
        return { status: 200, body: { revision: this.revision, defeater: 'D1' } };
      }
      return this.error(422, 'precondition', 'mock: transition not recorded');
    }

    if (method === 'DELETE' && defeaterMatch) {
      const defeaterId = defeaterMatch[1];
      if ((this.scenario === 'doubt' || this.scenario === 'exoneration') && defeaterId === 'D1') {
        this.scenario = 'sound';
        this.revision += 1;
        return { status: 200, body: { revision: this.revision, removed: [defeaterId] } };
      }
      return this.error(404, 'unknown-node', `no defeater named ${defeaterId}`);
    }

    if (method === 'GET' && path === '/api/risks') {
      const risks = this.sc('risks') ?? this.bundle.scenarios['sound']['risks'];
      return { status: 200, body: this.withRevision(risks) };
    }

    return this.error(404, 'unknown-endpoint', `no such endpoint: ${method} ${path}`);
  }
}
