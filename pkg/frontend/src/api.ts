/** Typed client for the assessment service. All numbers shown anywhere in
 * the UI come from these responses; the client never computes scores. */

import type {
  AnswerWire,
  CatalogDoc,
  ModeToken,
  NextResponse,
  RadarDoc,
  ReportDoc,
  SessionDoc,
  SessionSummary,
  WhatIfResponse,
} from './types.js';

export class ApiRequestError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiRequestError';
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const response = await fetch(url, init);
  if (!response.ok) {
    let code = 'http-error';
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body && body.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the status line
    }
    throw new ApiRequestError(response.status, code, message);
  }
  if (response.status === 204) {
    return undefined as T;
  }
  return (await response.json()) as T;
}

export interface ReportParams {
  mode?: ModeToken;
  weights?: string;
  gaps?: number;
}

export class ApiClient {
  constructor(public readonly baseUrl: string = '') {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  getCatalog(): Promise<CatalogDoc> {
    return request(this.url('/api/catalog'));
  }

  getProfile(): Promise<unknown> {
    return request(this.url('/api/profile'));
  }

  createSession(): Promise<SessionDoc> {
    return request(this.url('/api/sessions'), { method: 'POST' });
  }

  listSessions(): Promise<SessionSummary[]> {
    return request(this.url('/api/sessions'));
  }

  getSession(id: string): Promise<SessionDoc> {
    return request(this.url(`/api/sessions/${id}`));
  }

  putAnswer(sessionId: string, questionId: string, value: AnswerWire, note?: string): Promise<unknown> {
    const body: Record<string, unknown> = { value };
    if (note !== undefined && note !== '') {
      body.note = note;
    }
    return request(this.url(`/api/sessions/${sessionId}/answers/${questionId}`), {
      method: 'PUT',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  deleteAnswer(sessionId: string, questionId: string): Promise<void> {
    return request(this.url(`/api/sessions/${sessionId}/answers/${questionId}`), {
      method: 'DELETE',
    });
  }

  getNext(sessionId: string): Promise<NextResponse> {
    return request(this.url(`/api/sessions/${sessionId}/next`));
  }

  getReport(sessionId: string, params: ReportParams = {}): Promise<ReportDoc> {
    const query = new URLSearchParams();
    if (params.mode) query.set('mode', params.mode);
    if (params.weights) query.set('weights', params.weights);
    if (params.gaps !== undefined) query.set('gaps', String(params.gaps));
    const suffix = query.toString() ? `?${query.toString()}` : '';
    return request(this.url(`/api/sessions/${sessionId}/report${suffix}`));
  }

  postWhatIf(sessionId: string, overrides: Record<string, AnswerWire>, mode?: ModeToken): Promise<WhatIfResponse> {
    const body: Record<string, unknown> = { overrides };
    if (mode) body.mode = mode;
    return request(this.url(`/api/sessions/${sessionId}/whatif`), {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getRadar(sessionId: string, mode?: ModeToken): Promise<RadarDoc> {
    const suffix = mode ? `?mode=${mode}` : '';
    return request(this.url(`/api/sessions/${sessionId}/radar${suffix}`));
  }
}
