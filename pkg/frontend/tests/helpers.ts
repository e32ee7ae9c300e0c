/** Test support: the recorded API session and a replay implementation of
 * the NavigatorApi driven entirely by it. */

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { NavigatorApi } from "../src/api.js";
import type {
  OutputsPayload,
  Rating,
  SessionView,
  SummaryPayload,
  TreeExport,
  TreeStats,
} from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export interface Recording {
  tree: TreeExport;
  stats: TreeStats;
  root_view: SessionView;
  outputs_at_root: OutputsPayload;
  after_experience: SessionView;
  outputs_after_experience: OutputsPayload;
  after_veridical: SessionView;
  terminal_view: SessionView;
  after_back: SessionView;
  filters_used: Record<string, string[]>;
  outputs_filtered: OutputsPayload;
  ratings_put: Record<string, Rating>;
  summary: SummaryPayload;
}

export function loadRecording(): Recording {
  const raw = readFileSync(join(here, "fixtures", "recorded-session.json"), "utf-8");
  return JSON.parse(raw) as Recording;
}

/** Replays the recorded session: selects walk the recorded path in order,
 * back/jump return the recorded payloads, and every call is logged so tests
 * can assert ordering (e.g. ratings confirm before the overlay refreshes). */
export class ReplayApi implements NavigatorApi {
  calls: string[] = [];
  private viewSequence: SessionView[];
  private cursor = 0;
  private revision = 0;

  constructor(private readonly recording: Recording) {
    this.viewSequence = [
      recording.root_view,
      recording.after_experience,
      recording.after_veridical,
      recording.terminal_view,
    ];
  }

  /** Recorded payload at the cursor, with a server-like monotone revision
   * (every mutation bumps it, exactly as the real session does). */
  private get currentView(): SessionView {
    return { ...this.viewSequence[this.cursor], revision: this.revision };
  }

  async listTrees() {
    this.calls.push("listTrees");
    return { trees: [this.recording.root_view.tree] };
  }

  async getTree(): Promise<TreeExport> {
    this.calls.push("getTree");
    return this.recording.tree;
  }

  async getStats(): Promise<TreeStats> {
    this.calls.push("getStats");
    return this.recording.stats;
  }

  async openSession(): Promise<SessionView> {
    this.calls.push("openSession");
    this.cursor = 0;
    return this.currentView;
  }

  async getSession(): Promise<SessionView> {
    this.calls.push("getSession");
    return this.currentView;
  }

  async select(_sessionId: string, condition: string): Promise<SessionView> {
    this.calls.push(`select:${condition}`);
    if (this.cursor + 1 >= this.viewSequence.length) {
      throw new Error(`recording has no view after select ${condition}`);
    }
    this.cursor += 1;
    this.revision += 1;
    return this.currentView;
  }

  async back(): Promise<SessionView> {
    this.calls.push("back");
    if (this.cursor === 0) throw new Error("back at root");
    this.cursor -= 1;
    this.revision += 1;
    return this.currentView;
  }

  async jump(): Promise<SessionView> {
    this.calls.push("jump");
    this.cursor = 0;
    this.revision += 1;
    return this.currentView;
  }

  async gotoOutput(): Promise<SessionView> {
    this.calls.push("goto");
    this.cursor = this.viewSequence.length - 1;
    this.revision += 1;
    return this.currentView;
  }

  async setFilters(
    _sessionId: string,
    filters: Record<string, string[]>,
  ): Promise<SessionView> {
    this.calls.push(`setFilters:${JSON.stringify(filters)}`);
    this.revision += 1;
    return { ...this.currentView, filters };
  }

  async outputs(): Promise<OutputsPayload> {
    this.calls.push("outputs");
    const byDepth: Record<number, OutputsPayload> = {
      0: this.recording.outputs_at_root,
      1: this.recording.outputs_after_experience,
    };
    const recorded = byDepth[this.currentView.depth];
    return recorded
      ? { ...recorded, revision: this.revision }
      : { revision: this.revision, outputs: [] };
  }

  async rate(_treeId: string, terminal: string, rating: Rating) {
    this.calls.push(`rate:${terminal}:${rating}`);
    return { revision: this.recording.summary.revision };
  }

  async summary(): Promise<SummaryPayload> {
    this.calls.push("summary");
    return this.recording.summary;
  }
}

export function hosts() {
  const make = () => document.createElement("div");
  return { local: make(), tree: make(), outputs: make(), toolbar: make() };
}
