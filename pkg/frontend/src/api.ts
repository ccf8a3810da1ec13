/** Thin typed client for the case service; all evaluation stays remote. */

import type {
  ApiErrorBody,
  CaseResponse,
  ConfidenceResponse,
  DefeaterStatus,
  ElicitKey,
  LevelName,
  MeasuresResponse,
  RisksResponse,
  ValidityResponse,
} from './types.js';

/** Minimal fetch-shaped transport so the mock service can stand in. */
export interface FetchLike {
  (url: string, init?: { method?: string; headers?: Record<string, string>; body?: string }):
    Promise<{ status: number; json(): Promise<unknown>; text(): Promise<string> }>;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${status}: ${body.message}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    ifMatch?: number,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    let payload: string | undefined;
    if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
      payload = JSON.stringify(body);
    }
    if (ifMatch !== undefined) headers['If-Match'] = String(ifMatch);
    const response = await this.fetchImpl(this.base + path, { method, headers, body: payload });
    if (response.status === 200) {
      return (await response.json()) as T;
    }
    let errorBody: ApiErrorBody;
    try {
      errorBody = (await response.json()) as ApiErrorBody;
    } catch {
      errorBody = { code: 'unknown', message: `unexpected response ${response.status}` };
    }
    throw new ApiError(response.status, errorBody);
  }

  getCase(): Promise<CaseResponse> {
    return this.request('GET', '/api/case');
  }

  putCase(dsl: string): Promise<{ revision: number; nodes: number }> {
    return this.request('PUT', '/api/case', { dsl });
  }

  /** `ignore` asks for a what-if evaluation with those defeaters absent. */
  validity(options?: { ignore?: string[] }): Promise<ValidityResponse> {
    const ignore = options?.ignore?.length
      ? `?ignore=${encodeURIComponent(options.ignore.join(','))}`
      : '';
    return this.request('GET', `/api/assessment/validity${ignore}`);
  }

  confidence(
    method: 'product' | 'doubts',
    exploratory = false,
  ): Promise<ConfidenceResponse> {
    const flag = exploratory ? '&exploratory=1' : '';
    return this.request('GET', `/api/assessment/confidence?method=${method}${flag}`);
  }

  measures(nodeId: string, base?: number): Promise<MeasuresResponse> {
    const query = base === undefined ? '' : `?base=${base}`;
    return this.request('GET', `/api/nodes/${encodeURIComponent(nodeId)}/measures${query}`);
  }

  patchElicitation(
    nodeId: string,
    entries: Partial<Record<ElicitKey, number | LevelName | null>>,
    ifMatch?: number,
  ): Promise<{ revision: number; node: string }> {
    return this.request(
      'PATCH',
      `/api/nodes/${encodeURIComponent(nodeId)}/elicitation`,
      entries,
      ifMatch,
    );
  }

  patchOverride(
    nodeId: string,
    value: number | null,
    ifMatch?: number,
  ): Promise<{ revision: number }> {
    return this.request(
      'PATCH',
      `/api/nodes/${encodeURIComponent(nodeId)}/override`,
      { value },
      ifMatch,
    );
  }

  patchDefeater(
    defeaterId: string,
    changes: { status?: DefeaterStatus; exactness?: 'exploratory' | 'exact'; target?: string },
    ifMatch?: number,
  ): Promise<{ revision: number }> {
    return this.request(
      'PATCH',
      `/api/defeaters/${encodeURIComponent(defeaterId)}`,
      changes,
      ifMatch,
    );
  }

  postDefeater(body: {
    targets: string;
    id?: string;
    claim?: string;
    exactness?: 'exploratory' | 'exact';
    status?: DefeaterStatus;
  }): Promise<{ revision: number; defeater: string }> {
    return this.request('POST', '/api/defeaters', body);
  }

  deleteDefeater(defeaterId: string): Promise<{ revision: number }> {
    return this.request('DELETE', `/api/defeaters/${encodeURIComponent(defeaterId)}`);
  }

  risks(): Promise<RisksResponse> {
    return this.request('GET', '/api/risks');
  }
}
