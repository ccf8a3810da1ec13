/** Case explorer controller: polls the service, never evaluates locally.
 *
 * All state transitions go through documented API calls; after every
 * mutation the controller re-fetches case, validity, and confidence in
 * one poll cycle, so the rendered view always equals the service
 * response for its displayed revision.
 */

import { ApiClient, ApiError, FetchLike } from './api.js';
import {
  buildDefeaterControls,
  buildElicitationPanel,
  DefeaterControlsModel,
  ElicitationPanelModel,
} from './panels.js';
import { renderSvg } from './rendersvg.js';
import type {
  CaseDoc,
  ConfidenceResponse,
  DefeaterStatus,
  ElicitKey,
  LevelName,
  ValidityResponse,
} from './types.js';
import { buildViewModel, ViewError, ViewModel } from './viewmodel.js';

export interface ExplorerState {
  doc: CaseDoc | null;
  revision: number;
  validity: ValidityResponse | null;
  confidence: ConfidenceResponse | null;
  selection: string | null;
  banner: string | null;
  stale: boolean;
}

export class CaseExplorer {
  state: ExplorerState = {
    doc: null,
    revision: 0,
    validity: null,
    confidence: null,
    selection: null,
    banner: null,
    stale: false,
  };

  constructor(private readonly api: ApiClient) {}

  /** One poll cycle: fetch case + validity + confidence for one revision. */
  async refresh(): Promise<void> {
    const caseResponse = await this.api.getCase();
    const validity = await this.api.validity();
    let confidence: ConfidenceResponse | null = null;
    try {
      confidence = await this.api.confidence('product');
    } catch (err) {
      if (err instanceof ApiError && err.status === 422) {
        try {
          confidence = await this.api.confidence('product', true);
        } catch {
          confidence = null;
        }
      }
    }
    // evaluations must agree on the revision they were computed against;
    // when a concurrent mutation slips in between fetches, poll again
    if (validity.revision !== caseResponse.revision ||
        (confidence && confidence.revision !== caseResponse.revision)) {
      return this.refresh();
    }
    this.state.doc = caseResponse.case;
    this.state.revision = caseResponse.revision;
    this.state.validity = validity;
    this.state.confidence = confidence;
    this.state.stale = false;
    this.state.banner = null;
  }

  select(nodeId: string | null): void {
    this.state.selection = nodeId;
  }

  /** The view model for the current revision (or an error banner). */
  vm(): ViewModel | { error: string } {
    if (!this.state.doc) return { error: 'no case loaded' };
    try {
      return buildViewModel(
        this.state.doc,
        this.state.validity,
        this.state.confidence,
        this.state.revision,
        { selection: this.state.selection, stale: this.state.stale },
      );
    } catch (err) {
      if (err instanceof ViewError) return { error: `render error: ${err.message}` };
      throw err;
    }
  }

  svg(): string {
    const vm = this.vm();
    if ('error' in vm) {
      return `<svg xmlns="http://www.w3.org/2000/svg" width="480" height="60"><text x="10" y="30" fill="firebrick">${vm.error}</text></svg>`;
    }
    return renderSvg(vm);
  }

  private async mutate<T extends { revision: number }>(call: () => Promise<T>): Promise<T> {
    this.state.stale = true;
    try {
      const out = await call();
      await this.refresh();
      return out;
    } catch (err) {
      if (err instanceof ApiError && err.isConflict) {
        await this.refresh();
        this.state.banner = 'the case changed elsewhere - reloaded';
      } else {
        this.state.stale = false;
      }
      throw err;
    }
  }

  setDefeaterStatus(defeaterId: string, status: DefeaterStatus): Promise<{ revision: number }> {
    return this.mutate(() =>
      this.api.patchDefeater(defeaterId, { status }, this.state.revision),
    );
  }

  addDoubt(target: string, claim?: string): Promise<{ revision: number; defeater: string }> {
    return this.mutate(() => this.api.postDefeater({ targets: target, claim }));
  }

  setElicitation(
    nodeId: string,
    entries: Partial<Record<ElicitKey, number | LevelName | null>>,
  ): Promise<{ revision: number }> {
    return this.mutate(() => this.api.patchElicitation(nodeId, entries, this.state.revision));
  }

  setOverride(nodeId: string, value: number | null): Promise<{ revision: number }> {
    return this.mutate(() => this.api.patchOverride(nodeId, value, this.state.revision));
  }

  /** Judgment editor model for an evidence node or assumption. */
  async elicitationPanel(nodeId: string): Promise<ElicitationPanelModel> {
    const node = this.node(nodeId);
    const measures = node.kind === 'evidence' ? await this.api.measures(nodeId) : null;
    return buildElicitationPanel(node, measures);
  }

  defeaterControls(defeaterId: string, whatIf = false): DefeaterControlsModel {
    return buildDefeaterControls(this.node(defeaterId), whatIf);
  }

  /** What-if: the assessment with the defeater absent. Pure read; the
   * result is labeled as a preview and nothing is mutated. */
  async whatIfPreview(defeaterId: string): Promise<ViewModel> {
    if (!this.state.doc) throw new Error('no case loaded');
    const preview = await this.api.validity({ ignore: [defeaterId] });
    const vm = buildViewModel(this.state.doc, preview, null, preview.revision, {
      selection: this.state.selection,
    });
    return { ...vm, warnings: ['preview - not saved', ...vm.warnings] };
  }

  private node(nodeId: string) {
    const node = this.state.doc?.nodes.find((n) => n.id === nodeId);
    if (!node) throw new Error(`unknown node ${nodeId}`);
    return node;
  }
}

/** Browser bootstrap; kept minimal, all logic lives above. */
export function main(base = '', mountId = 'app'): void {
  if (typeof document === 'undefined') return;
  const mount = document.getElementById(mountId);
  if (!mount) return;
  const explorer = new CaseExplorer(new ApiClient(base, fetch.bind(globalThis) as FetchLike));

  const draw = () => {
    const vm = explorer.vm();
    const head =
      'error' in vm
        ? `<div class="banner error">${vm.error}</div>`
        : `<div class="banner">${vm.title} - revision ${vm.revision} - ${vm.soundness ?? ''}` +
          `${explorer.state.banner ? ` - ${explorer.state.banner}` : ''}</div>`;
    mount.innerHTML = head + explorer.svg();
    for (const el of Array.from(mount.querySelectorAll('[data-node]'))) {
      el.addEventListener('click', () => {
        explorer.select(el.getAttribute('data-node'));
        draw();
      });
    }
  };

  explorer
    .refresh()
    .then(draw)
    .catch((err) => {
      mount.innerHTML = `<div class="banner error">cannot reach the case service: ${err}</div>`;
    });
}
