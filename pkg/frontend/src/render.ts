/** Pure HTML/SVG renderers. No DOM access and no score arithmetic here, so
 * everything is unit-testable as strings; controllers inject the results and
 * wire events. */

import type {
  AnswerWire,
  CatalogDoc,
  Completeness,
  GapEntry,
  NextQuestion,
  RadarDoc,
} from './types.js';

export const LEVEL_LABELS = ['None', 'Initial', 'Partial', 'Defined', 'Full'] as const;

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export function formatScore(score: number | null): string {
  return score === null ? '-' : score.toFixed(3);
}

export function formatDelta(delta: number): string {
  const sign = delta > 0 ? '+' : '';
  return `${sign}${delta.toFixed(4)}`;
}

/** Answer buttons for one question: a yes/no toggle for binary questions,
 * a five-step selector for level questions. */
export function renderAnswerControl(question: Pick<NextQuestion, 'answer_kind'>): string {
  if (question.answer_kind === 'binary') {
    return [
      '<div class="answer-control" data-kind="binary">',
      '<button type="button" class="choice" data-choice="yes">Yes</button>',
      '<button type="button" class="choice" data-choice="no">No</button>',
      '</div>',
    ].join('\n');
  }
  const buttons = LEVEL_LABELS.map(
    (label, level) =>
      `<button type="button" class="choice" data-choice="${level}">${level} &middot; ${label}</button>`,
  );
  return ['<div class="answer-control" data-kind="level">', ...buttons, '</div>'].join('\n');
}

export function renderWizardCard(question: NextQuestion): string {
  return `
<article class="wizard-card" data-question-id="${escapeHtml(question.id)}">
  <header>
    <span class="crumb">${escapeHtml(question.domain)} / ${escapeHtml(question.control_id)} ${escapeHtml(question.control_title)}</span>
    <span class="issue">${escapeHtml(question.issue)}</span>
  </header>
  <blockquote class="statement">${escapeHtml(question.control_statement)}</blockquote>
  <p class="question-text">${escapeHtml(question.text)} <span class="status-tag">${escapeHtml(question.status)}</span></p>
  ${renderAnswerControl(question)}
  <label class="note-row">Evidence note <input type="text" id="note-input" placeholder="optional"></label>
</article>`;
}

export function renderCompleteness(done: Completeness): string {
  const rows = Object.entries(done.per_domain).map(([name, counts]) => {
    const pct = counts.total ? Math.round((100 * counts.answered) / counts.total) : 0;
    return `
  <div class="domain-progress" data-domain="${escapeHtml(name)}">
    <span class="label">${escapeHtml(name)}</span>
    <progress max="${counts.total}" value="${counts.answered}"></progress>
    <span class="count">${counts.answered}/${counts.total} (${pct}%)</span>
  </div>`;
  });
  return `<div class="completeness" data-answered="${done.answered}" data-total="${done.total}">${rows.join('')}</div>`;
}

/** Five-axis radar. Axes whose domain is absent from the catalog render
 * greyed out rather than hidden; scored axes carry the polygon. */
export function renderRadarSvg(radar: RadarDoc, activeAxes: Set<string>): string {
  const size = 320;
  const center = size / 2;
  const radius = 120;
  const parts: string[] = [
    `<svg viewBox="0 0 ${size} ${size}" class="radar" role="img" aria-label="domain scores">`,
  ];
  for (const ring of [0.25, 0.5, 0.75, 1.0]) {
    const ringPoints = radar.axes
      .map((_, i) => pointAt(center, radius * ring, i, radar.axes.length))
      .map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`)
      .join(' ');
    parts.push(`<polygon class="ring" points="${ringPoints}"></polygon>`);
  }
  radar.axes.forEach((axis, i) => {
    const [x, y] = pointAt(center, radius, i, radar.axes.length);
    const active = activeAxes.has(axis);
    const cls = active ? 'axis active' : 'axis inactive';
    parts.push(
      `<line class="${cls}" data-axis="${escapeHtml(axis)}" x1="${center}" y1="${center}" x2="${x.toFixed(1)}" y2="${y.toFixed(1)}"></line>`,
    );
    const [lx, ly] = pointAt(center, radius + 24, i, radar.axes.length);
    parts.push(
      `<text class="${active ? 'axis-label active' : 'axis-label inactive'}" x="${lx.toFixed(1)}" y="${ly.toFixed(1)}" text-anchor="middle">${escapeHtml(axis)}</text>`,
    );
  });
  const scored = radar.axes
    .map((axis, i) => ({ axis, i, value: radar.values[i] ?? null }))
    .filter((entry): entry is { axis: string; i: number; value: number } => entry.value !== null);
  if (scored.length > 0) {
    const polygon = scored
      .map(({ i, value }) => pointAt(center, radius * value, i, radar.axes.length))
      .map(([x, y]) => `${x.toFixed(1)},${y.toFixed(1)}`)
      .join(' ');
    parts.push(`<polygon class="scores" points="${polygon}"></polygon>`);
    for (const { axis, i, value } of scored) {
      const [x, y] = pointAt(center, radius * value, i, radar.axes.length);
      parts.push(
        `<circle class="score-dot" data-axis="${escapeHtml(axis)}" data-value="${value}" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="4"></circle>`,
      );
    }
  }
  parts.push('</svg>');
  return parts.join('\n');
}

function pointAt(center: number, r: number, index: number, count: number): [number, number] {
  const angle = -Math.PI / 2 + (2 * Math.PI * index) / count;
  return [center + r * Math.cos(angle), center + r * Math.sin(angle)];
}

export function renderGapTable(gaps: GapEntry[]): string {
  if (gaps.length === 0) {
    return '<p class="empty">No gaps to show.</p>';
  }
  const rows = gaps.map(
    (gap) => `
    <tr data-question-id="${escapeHtml(gap.question_id)}" data-rank="${gap.rank}">
      <td>${gap.rank}</td>
      <td><a href="#" class="gap-link" data-question-id="${escapeHtml(gap.question_id)}">${escapeHtml(gap.question_id)}</a></td>
      <td>${formatScore(gap.current)}</td>
      <td>${formatDelta(gap.potential_gain)}</td>
    </tr>`,
  );
  return `
<table class="gap-table">
  <thead><tr><th>Rank</th><th>Question</th><th>Current</th><th>Potential gain</th></tr></thead>
  <tbody>${rows.join('')}</tbody>
</table>`;
}

export function activeDomains(catalog: CatalogDoc): Set<string> {
  return new Set(catalog.domains.map((domain) => domain.name));
}

export function answerLabel(value: AnswerWire): string {
  if (value === 'yes' || value === 'no') {
    return value;
  }
  return `${value} (${LEVEL_LABELS[value] ?? '?'})`;
}
