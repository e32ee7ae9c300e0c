/** Bottom-right panel: tag filters plus the outputs reachable from the
 * cursor. Filter chips are derived from the tags present on the outputs;
 * toggling one updates the server-side filters (OR within an axis, AND
 * across axes — the server owns the semantics, the panel only reports
 * which chips are on). */

import { clear, el } from "./dom.js";
import type { OutputView, Rating, SessionView } from "./types.js";

export interface OutputsPanelHandlers {
  onToggleFilter: (axis: string, value: string) => void;
  onGoto: (terminalId: string) => void;
  onRate?: (terminalId: string, rating: Rating) => void;
}

/** Axis -> values observed across the given outputs (sorted for stable UI). */
export function availableTagValues(outputs: OutputView[]): Map<string, string[]> {
  const axes = new Map<string, Set<string>>();
  for (const output of outputs) {
    for (const [axis, value] of Object.entries(output.tags)) {
      if (!axes.has(axis)) axes.set(axis, new Set());
      axes.get(axis)!.add(value);
    }
  }
  return new Map(
    [...axes.entries()]
      .sort(([a], [b]) => a.localeCompare(b))
      .map(([axis, values]) => [axis, [...values].sort()]),
  );
}

export function renderFilterBar(
  axes: Map<string, string[]>,
  active: Record<string, string[]>,
  handlers: OutputsPanelHandlers,
): HTMLElement {
  const groups = [...axes.entries()].map(([axis, values]) =>
    el(
      "div",
      { class: "filter-axis", "data-axis": axis },
      el("span", { class: "filter-axis-name" }, axis),
      ...values.map((value) =>
        el(
          "button",
          {
            class: "filter-chip" + ((active[axis] ?? []).includes(value) ? " active" : ""),
            "data-axis": axis,
            "data-value": value,
            onclick: () => handlers.onToggleFilter(axis, value),
          },
          value,
        ),
      ),
    ),
  );
  return el("div", { class: "filter-bar" }, ...groups);
}

export function renderOutputList(
  outputs: OutputView[],
  handlers: OutputsPanelHandlers,
  annotate: boolean,
): HTMLElement {
  const ratings: Rating[] = ["approve", "neutral", "reject"];
  const items = outputs.map((output) =>
    el(
      "li",
      { class: "output-item" + (output.rating ? ` rated-${output.rating}` : ""), "data-terminal": output.terminal },
      el("div", { class: "output-text" }, output.output),
      el(
        "div",
        { class: "output-tags" },
        ...Object.entries(output.tags).map(([axis, value]) =>
          el("span", { class: "tag", "data-axis": axis, "data-value": value }, value),
        ),
      ),
      el(
        "div",
        { class: "output-actions" },
        el("button", { class: "goto-button", onclick: () => handlers.onGoto(output.terminal) }, "Go to"),
        ...(annotate && handlers.onRate
          ? ratings.map((rating) =>
              el(
                "button",
                {
                  class: "rate-button" + (output.rating === rating ? " active" : ""),
                  "data-rating": rating,
                  onclick: () => handlers.onRate!(output.terminal, rating),
                },
                rating,
              ),
            )
          : []),
      ),
    ),
  );
  return el("ul", { class: "output-list" }, ...items);
}

export function mountOutputsPanel(
  host: HTMLElement,
  view: SessionView,
  outputs: OutputView[],
  allOutputs: OutputView[],
  handlers: OutputsPanelHandlers,
  annotate: boolean,
): void {
  clear(host);
  host.append(
    el(
      "section",
      { class: "outputs-panel" },
      renderFilterBar(availableTagValues(allOutputs), view.filters, handlers),
      el("div", { class: "outputs-count" }, `${outputs.length} reachable output${outputs.length === 1 ? "" : "s"}`),
      renderOutputList(outputs, handlers, annotate),
    ),
  );
}
