/** What-if panel controller: build an override set question by question,
 * preview the deltas from the service, and apply the overrides for real. */

import type { ApiClient } from './api.js';
import type { AnswerWire, CatalogDoc, CatalogQuestion } from './types.js';
import { escapeHtml, renderAnswerControl } from './render.js';
import { OverrideSet, applyOverrides, buildWhatIfView, renderWhatIfView } from './whatif.js';

export class WhatIfPanelController {
  private readonly overrides = new OverrideSet();

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly sessionId: string,
  ) {}

  async start(): Promise<void> {
    const catalog = await this.api.getCatalog();
    const options = allQuestions(catalog)
      .map(
        (q) =>
          `<option value="${escapeHtml(q.id)}" data-kind="${q.answer_kind}">${escapeHtml(q.id)} ${escapeHtml(shorten(q.text))}</option>`,
      )
      .join('');
    this.root.innerHTML = `
      <div class="whatif-builder">
        <label>Question <select id="whatif-question">${options}</select></label>
        <div id="whatif-answer-slot"></div>
        <div class="whatif-actions">
          <button type="button" id="whatif-preview">Preview deltas</button>
          <button type="button" id="whatif-apply">Apply overrides</button>
          <button type="button" id="whatif-clear">Clear</button>
        </div>
      </div>
      <div id="whatif-result"><p class="empty">No overrides selected; delta +0.0000.</p></div>
      <p class="error-slot" id="whatif-error" hidden></p>`;
    const select = this.root.querySelector<HTMLSelectElement>('#whatif-question')!;
    const renderChoice = () => {
      const kind = select.selectedOptions[0]?.dataset.kind === 'level' ? 'level' : 'binary';
      const slot = this.root.querySelector<HTMLElement>('#whatif-answer-slot')!;
      slot.innerHTML = renderAnswerControl({ answer_kind: kind });
      slot.querySelectorAll<HTMLButtonElement>('button.choice').forEach((button) => {
        button.addEventListener('click', () => {
          const token = button.dataset.choice ?? '';
          const value: AnswerWire = token === 'yes' || token === 'no' ? token : Number(token);
          this.overrides.set(select.value, value);
          void this.preview();
        });
      });
    };
    select.addEventListener('change', renderChoice);
    renderChoice();
    this.root.querySelector('#whatif-preview')?.addEventListener('click', () => void this.preview());
    this.root.querySelector('#whatif-apply')?.addEventListener('click', () => void this.apply());
    this.root.querySelector('#whatif-clear')?.addEventListener('click', () => {
      this.overrides.clear();
      void this.preview();
    });
  }

  private async preview(): Promise<void> {
    try {
      const response = await this.api.postWhatIf(this.sessionId, this.overrides.toJSON());
      const view = buildWhatIfView(response);
      const result = this.root.querySelector<HTMLElement>('#whatif-result')!;
      result.innerHTML = renderWhatIfView(view, this.overrides.toJSON());
      result.querySelectorAll<HTMLButtonElement>('button.remove-override').forEach((button) => {
        button.addEventListener('click', () => {
          this.overrides.remove(button.dataset.questionId ?? '');
          void this.preview();
        });
      });
      this.hideError();
    } catch (error) {
      this.showError(error);
    }
  }

  private async apply(): Promise<void> {
    try {
      const applied = await applyOverrides(this.api, this.sessionId, this.overrides.toJSON());
      this.overrides.clear();
      const result = this.root.querySelector<HTMLElement>('#whatif-result')!;
      result.innerHTML = `<p class="applied">Committed overrides (${applied} previously unanswered). They are real answers now.</p>`;
      this.hideError();
    } catch (error) {
      this.showError(error);
    }
  }

  private showError(error: unknown): void {
    const slot = this.root.querySelector<HTMLElement>('#whatif-error');
    if (slot) {
      const err = error as { code?: string; message?: string };
      slot.hidden = false;
      slot.textContent = `${err.code ?? 'error'}: ${err.message ?? String(error)}`;
    }
  }

  private hideError(): void {
    const slot = this.root.querySelector<HTMLElement>('#whatif-error');
    if (slot) slot.hidden = true;
  }
}

function allQuestions(catalog: CatalogDoc): CatalogQuestion[] {
  return catalog.domains.flatMap((domain) =>
    domain.controls.flatMap((control) => control.issues.flatMap((issue) => issue.questions)),
  );
}

function shorten(text: string): string {
  return text.length > 60 ? `${text.slice(0, 57)}...` : text;
}
