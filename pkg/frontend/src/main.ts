/** Hash-routed single-page shell: session picker, wizard, dashboard,
 * what-if panel. The service base URL defaults to same-origin and can be
 * pointed elsewhere with ?api=http://127.0.0.1:8000 for dev servers. */

import { ApiClient } from './api.js';
import { DashboardController } from './dashboard.js';
import { escapeHtml } from './render.js';
import { WhatIfPanelController } from './whatif_panel.js';
import { WizardController } from './wizard.js';

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get('api') ?? '');
const outlet = () => document.getElementById('view')!;

function navigate(hash: string): void {
  window.location.hash = hash;
}

async function renderHome(): Promise<void> {
  const sessions = await api.listSessions();
  const rows = sessions
    .map((s) =>
      s.error
        ? `<li class="broken">${escapeHtml(s.id)} (${escapeHtml(s.error)})</li>`
        : `<li>
             <a href="#/wizard/${escapeHtml(s.id)}">${escapeHtml(s.id)}</a>
             <span class="meta">${s.answered}/${s.total} answered</span>
             <a class="pill" href="#/dashboard/${escapeHtml(s.id)}">dashboard</a>
             <a class="pill" href="#/whatif/${escapeHtml(s.id)}">what-if</a>
           </li>`,
    )
    .join('');
  outlet().innerHTML = `
    <h2>Assessment sessions</h2>
    <ul class="session-list">${rows || '<li class="empty">none yet</li>'}</ul>
    <button type="button" id="new-session">Start a new assessment</button>`;
  document.getElementById('new-session')?.addEventListener('click', async () => {
    const session = await api.createSession();
    navigate(`#/wizard/${session.id}`);
  });
}

async function route(): Promise<void> {
  const hash = window.location.hash || '#/';
  const wizardMatch = hash.match(/^#\/wizard\/(.+)$/);
  const dashboardMatch = hash.match(/^#\/dashboard\/(.+)$/);
  const whatifMatch = hash.match(/^#\/whatif\/(.+)$/);
  try {
    if (wizardMatch) {
      const sessionId = wizardMatch[1]!;
      setNav(sessionId, 'wizard');
      const controller = new WizardController(api, outlet(), sessionId, () =>
        navigate(`#/dashboard/${sessionId}`),
      );
      await controller.start();
    } else if (dashboardMatch) {
      const sessionId = dashboardMatch[1]!;
      setNav(sessionId, 'dashboard');
      await new DashboardController(api, outlet(), sessionId, () =>
        navigate(`#/wizard/${sessionId}`),
      ).start();
    } else if (whatifMatch) {
      const sessionId = whatifMatch[1]!;
      setNav(sessionId, 'whatif');
      await new WhatIfPanelController(api, outlet(), sessionId).start();
    } else {
      setNav(null, 'home');
      await renderHome();
    }
  } catch (error) {
    const err = error as { code?: string; message?: string };
    outlet().innerHTML = `<p class="error">${escapeHtml(err.code ?? 'error')}: ${escapeHtml(err.message ?? String(error))}</p>`;
  }
}

function setNav(sessionId: string | null, active: string): void {
  const nav = document.getElementById('nav')!;
  if (!sessionId) {
    nav.innerHTML = '';
    return;
  }
  const link = (target: string, label: string) =>
    `<a class="${active === target ? 'active' : ''}" href="#/${target}/${escapeHtml(sessionId)}">${label}</a>`;
  nav.innerHTML = `
    <a href="#/">sessions</a>
    ${link('wizard', 'wizard')}
    ${link('dashboard', 'dashboard')}
    ${link('whatif', 'what-if')}`;
}

window.addEventListener('hashchange', () => void route());
void route();
