/** Dashboard: STOPE radar plus the top remediation gaps, both fetched from
 * the service. Gap rows keep the API's rank order; no client-side sorting. */

import type { ApiClient } from './api.js';
import { activeDomains, formatScore, renderGapTable, renderRadarSvg } from './render.js';

const GAP_COUNT = 10;

export class DashboardController {
  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly sessionId: string,
    private readonly onJumpToWizard: () => void,
  ) {}

  async start(): Promise<void> {
    const [catalog, radar, report] = await Promise.all([
      this.api.getCatalog(),
      this.api.getRadar(this.sessionId),
      this.api.getReport(this.sessionId, { gaps: GAP_COUNT }),
    ]);
    const answered = report.session.completeness.answered;
    const headline =
      answered === 0
        ? '<p class="empty">No answers yet. Run the wizard to start scoring.</p>'
        : `<p class="headline">Overall score ${formatScore(report.overall.score)}
             (coverage ${formatScore(report.overall.coverage)}, mode ${report.mode})</p>`;
    this.root.innerHTML = `
      ${headline}
      <div class="dashboard-grid">
        <div class="radar-panel">${renderRadarSvg(radar, activeDomains(catalog))}</div>
        <div class="gaps-panel">
          <h3>Top gaps</h3>
          ${renderGapTable(report.gaps ?? [])}
        </div>
      </div>`;
    this.root.querySelectorAll<HTMLAnchorElement>('a.gap-link').forEach((link) => {
      link.addEventListener('click', (event) => {
        event.preventDefault();
        this.onJumpToWizard();
      });
    });
  }
}
