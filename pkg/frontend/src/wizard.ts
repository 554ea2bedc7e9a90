/** Assessment wizard: fetch the next unanswered question, render it with its
 * control statement and issue, submit the chosen answer, advance. */

import type { ApiClient, ApiRequestError } from './api.js';
import type { AnswerWire } from './types.js';
import { escapeHtml, renderCompleteness, renderWizardCard } from './render.js';

export class WizardController {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly sessionId: string,
    private readonly onComplete: () => void,
  ) {}

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    const next = await this.api.getNext(this.sessionId);
    if (next.done || next.question === null) {
      this.onComplete();
      return;
    }
    const question = next.question;
    this.root.innerHTML = `
      ${renderCompleteness(next.completeness)}
      ${renderWizardCard(question)}
      <p class="hint">Pick an answer to record it and move on.</p>
      <p class="error-slot" id="wizard-error" hidden></p>`;
    const note = this.root.querySelector<HTMLInputElement>('#note-input');
    this.root.querySelectorAll<HTMLButtonElement>('button.choice').forEach((button) => {
      button.addEventListener('click', () => {
        const token = button.dataset.choice ?? '';
        const value: AnswerWire = token === 'yes' || token === 'no' ? token : Number(token);
        void this.submit(question.id, value, note?.value ?? '');
      });
    });
  }

  private async submit(questionId: string, value: AnswerWire, note: string): Promise<void> {
    this.setBusy(true);
    try {
      await this.api.putAnswer(this.sessionId, questionId, value, note);
    } catch (error) {
      this.showError(error as ApiRequestError);
      this.setBusy(false);
      return;
    }
    await this.advance();
  }

  private setBusy(busy: boolean): void {
    this.root.querySelectorAll<HTMLButtonElement>('button.choice').forEach((button) => {
      button.disabled = busy;
    });
  }

  private showError(error: ApiRequestError): void {
    const slot = this.root.querySelector<HTMLElement>('#wizard-error');
    if (slot) {
      slot.hidden = false;
      slot.innerHTML = `${escapeHtml(error.code ?? 'error')}: ${escapeHtml(error.message)} <button type="button" id="wizard-retry">retry</button>`;
      slot.querySelector('#wizard-retry')?.addEventListener('click', () => void this.advance());
    }
  }
}
