/** Controller wiring the three panels to the session API.
 *
 * The UI holds no authoritative state: every render reads a server payload.
 * Responses are applied in revision order and stale ones dropped, so
 * concurrent requests cannot roll the view backward. Ratings are not
 * optimistic: the overlay refreshes only after the server confirms, keeping
 * the coloring consistent with the ledger revision.
 */

import type { NavigatorApi } from "./api.js";
import { clear, el } from "./dom.js";
import { mountLocalPanel } from "./localPanel.js";
import { mountOutputsPanel } from "./outputsPanel.js";
import { renderTree } from "./treeView.js";
import type {
  Mode,
  OutputView,
  Rating,
  SessionView,
  SummaryPayload,
  TreeExport,
} from "./types.js";

export interface ViewState {
  sessionId: string;
  treeId: string;
  view: SessionView;
  outputs: OutputView[];
  allOutputs: OutputView[];
  mode: Mode;
  summary: SummaryPayload | null;
  expanded: Set<string>;
}

export interface AppHosts {
  local: HTMLElement;
  tree: HTMLElement;
  outputs: HTMLElement;
  toolbar: HTMLElement;
}

export class NavigatorApp {
  state!: ViewState;
  private renderCount = 0;

  constructor(
    private readonly api: NavigatorApi,
    private readonly hosts: AppHosts,
    private readonly treeExport: TreeExport,
    private readonly maxFanOut = 8,
  ) {}

  async start(treeId: string): Promise<void> {
    const view = await this.api.openSession(treeId);
    const outputs = (await this.api.outputs(view.session)).outputs;
    this.state = {
      sessionId: view.session,
      treeId,
      view,
      outputs,
      allOutputs: outputs,
      mode: "explore",
      summary: null,
      expanded: new Set(),
    };
    this.render();
  }

  /** Apply a session payload unless it is older than what is shown. */
  applyView(view: SessionView): boolean {
    if (view.revision < this.state.view.revision) return false;
    this.state.view = view;
    return true;
  }

  private async refreshOutputs(): Promise<void> {
    const payload = await this.api.outputs(this.state.sessionId);
    if (payload.revision < this.state.view.revision) return;
    this.state.outputs = payload.outputs;
    const hasFilters = Object.keys(this.state.view.filters).length > 0;
    if (!hasFilters && this.state.view.depth === 0) {
      this.state.allOutputs = payload.outputs; // full tag universe for the chips
    }
  }

  private async mutate(action: Promise<SessionView>): Promise<void> {
    const view = await action;
    if (!this.applyView(view)) return;
    await this.refreshOutputs();
    this.render();
  }

  select = (key: string) => void this.mutate(this.api.select(this.state.sessionId, key));
  back = () => void this.mutate(this.api.back(this.state.sessionId));
  jump = (decisionId: string) => void this.mutate(this.api.jump(this.state.sessionId, decisionId));
  goto = (terminalId: string) => void this.mutate(this.api.gotoOutput(this.state.sessionId, terminalId));

  toggleFilter = (axis: string, value: string) => {
    const filters: Record<string, string[]> = {};
    for (const [a, values] of Object.entries(this.state.view.filters)) filters[a] = [...values];
    const current = new Set(filters[axis] ?? []);
    if (current.has(value)) current.delete(value);
    else current.add(value);
    if (current.size) filters[axis] = [...current].sort();
    else delete filters[axis];
    void this.mutate(this.api.setFilters(this.state.sessionId, filters));
  };

  rate = async (terminalId: string, rating: Rating) => {
    await this.api.rate(this.state.treeId, terminalId, rating); // confirm first
    await this.refreshSummary();
    await this.refreshOutputs();
    const view = await this.api.getSession(this.state.sessionId);
    this.applyView(view);
    this.render();
  };

  toggleExpand = (decisionId: string) => {
    if (this.state.expanded.has(decisionId)) this.state.expanded.delete(decisionId);
    else this.state.expanded.add(decisionId);
    this.render();
  };

  async setMode(mode: Mode): Promise<void> {
    this.state.mode = mode;
    if (mode === "annotate") await this.refreshSummary();
    this.render();
  }

  private async refreshSummary(): Promise<void> {
    const summary = await this.api.summary(this.state.treeId);
    if (this.state.summary && summary.revision < this.state.summary.revision) return;
    this.state.summary = summary;
  }

  render(): void {
    this.renderCount++;
    const { view, outputs, allOutputs, mode, summary, expanded } = this.state;
    const annotate = mode === "annotate";

    mountLocalPanel(this.hosts.local, view, {
      onSelect: this.select,
      onBack: this.back,
      onJump: this.jump,
      onRate: annotate ? (terminal, rating) => void this.rate(terminal, rating) : undefined,
    });

    clear(this.hosts.tree);
    this.hosts.tree.append(
      renderTree(
        {
          tree: this.treeExport,
          view,
          expanded,
          summary: annotate ? summary : null,
          filteredOutputs: Object.keys(view.filters).length ? outputs : null,
          options: { maxFanOut: this.maxFanOut },
        },
        {
          onJumpToDecision: this.jump,
          onGotoTerminal: this.goto,
          onToggleExpand: this.toggleExpand,
        },
      ),
    );

    mountOutputsPanel(
      this.hosts.outputs,
      view,
      outputs,
      allOutputs,
      {
        onToggleFilter: this.toggleFilter,
        onGoto: this.goto,
        onRate: annotate ? (terminal, rating) => void this.rate(terminal, rating) : undefined,
      },
      annotate,
    );

    clear(this.hosts.toolbar);
    (["explore", "annotate"] as Mode[]).forEach((m) => {
      this.hosts.toolbar.append(
        el(
          "button",
          {
            class: "mode-button" + (mode === m ? " active" : ""),
            "data-mode": m,
            onclick: () => void this.setMode(m),
          },
          m,
        ),
      );
    });
  }
}
