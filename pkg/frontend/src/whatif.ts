/** What-if panel logic: maintain a hypothetical override set, fetch deltas
 * from the service, and optionally commit the overrides as real answers.
 * Every displayed number is lifted straight from the API response. */

import type { ApiClient } from './api.js';
import type { AnswerWire, SessionDoc, WhatIfResponse } from './types.js';
import { escapeHtml, formatDelta, formatScore, answerLabel } from './render.js';

/** Hypothetical answers keyed by question id; setting a question twice
 * replaces the earlier override (last write wins). */
export class OverrideSet {
  private readonly entries = new Map<string, AnswerWire>();

  set(questionId: string, value: AnswerWire): void {
    this.entries.delete(questionId);
    this.entries.set(questionId, value);
  }

  remove(questionId: string): void {
    this.entries.delete(questionId);
  }

  clear(): void {
    this.entries.clear();
  }

  get size(): number {
    return this.entries.size;
  }

  toJSON(): Record<string, AnswerWire> {
    return Object.fromEntries(this.entries);
  }
}

export interface DomainDeltaRow {
  domain: string;
  before: number | null;
  after: number | null;
  delta: number;
}

export interface WhatIfView {
  /** The API's delta_overall, unchanged. */
  delta: number;
  deltaLabel: string;
  beforeOverall: number | null;
  afterOverall: number | null;
  rows: DomainDeltaRow[];
}

export function buildWhatIfView(response: WhatIfResponse): WhatIfView {
  const beforeByDomain = new Map(response.before.domains.map((d) => [d.name, d.score]));
  const afterByDomain = new Map(response.after.domains.map((d) => [d.name, d.score]));
  const rows: DomainDeltaRow[] = Object.entries(response.delta_per_domain).map(
    ([domain, delta]) => ({
      domain,
      before: beforeByDomain.get(domain) ?? null,
      after: afterByDomain.get(domain) ?? null,
      delta,
    }),
  );
  return {
    delta: response.delta_overall,
    deltaLabel: formatDelta(response.delta_overall),
    beforeOverall: response.before.overall.score,
    afterOverall: response.after.overall.score,
    rows,
  };
}

export function renderWhatIfView(view: WhatIfView, overrides: Record<string, AnswerWire>): string {
  const overrideItems = Object.entries(overrides).map(
    ([qid, value]) => `
    <li data-question-id="${escapeHtml(qid)}">
      <code>${escapeHtml(qid)}</code> &rarr; ${escapeHtml(answerLabel(value))}
      <button type="button" class="remove-override" data-question-id="${escapeHtml(qid)}">remove</button>
    </li>`,
  );
  const domainRows = view.rows.map(
    (row) => `
    <tr data-domain="${escapeHtml(row.domain)}">
      <td>${escapeHtml(row.domain)}</td>
      <td>${formatScore(row.before)}</td>
      <td>${formatScore(row.after)}</td>
      <td class="${row.delta > 0 ? 'gain' : row.delta < 0 ? 'loss' : ''}">${formatDelta(row.delta)}</td>
    </tr>`,
  );
  return `
<section class="whatif-result">
  <ul class="override-list">${overrideItems.join('')}</ul>
  <p class="overall-delta">
    Overall: ${formatScore(view.beforeOverall)} &rarr; ${formatScore(view.afterOverall)}
    (<span id="delta-overall" data-delta="${view.delta}">${view.deltaLabel}</span>)
  </p>
  <table class="delta-table">
    <thead><tr><th>Domain</th><th>Before</th><th>After</th><th>Delta</th></tr></thead>
    <tbody>${domainRows.join('')}</tbody>
  </table>
</section>`;
}

/** Commit the overrides as real answers through the answers endpoint.
 * Returns how many of them were previously unanswered. */
export async function applyOverrides(
  api: ApiClient,
  sessionId: string,
  overrides: Record<string, AnswerWire>,
): Promise<number> {
  const before: SessionDoc = await api.getSession(sessionId);
  const answered = new Set(before.answers.map((answer) => answer.question_id));
  let newlyAnswered = 0;
  for (const [questionId, value] of Object.entries(overrides)) {
    await api.putAnswer(sessionId, questionId, value);
    if (!answered.has(questionId)) {
      newlyAnswered += 1;
    }
  }
  return newlyAnswered;
}
