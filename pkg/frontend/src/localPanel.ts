/** Left panel: the current question with its condition cards, or the
 * terminal output with a collapsed, expandable breadcrumb. Everything shown
 * comes verbatim from a session payload. */

import { clear, el } from "./dom.js";
import type { Rating, SessionView } from "./types.js";

export interface LocalPanelHandlers {
  onSelect: (conditionKey: string) => void;
  onBack: () => void;
  onJump: (decisionId: string) => void;
  onRate?: (terminal: string, rating: Rating) => void;
}

export function renderDecision(view: SessionView, handlers: LocalPanelHandlers): HTMLElement {
  const decision = view.decision;
  if (!decision) throw new Error("renderDecision called on a terminal view");

  const cards = decision.conditions.map((card) => {
    const info = el(
      "div",
      { class: "condition-info", hidden: "" },
      el("p", { class: "condition-expanded" }, card.condition_expanded),
      el("p", { class: "condition-justification" }, card.justification),
    );
    const infoButton = el(
      "button",
      {
        class: "info-button",
        "aria-label": `more about ${card.key}`,
        onclick: (event) => {
          event.stopPropagation();
          info.toggleAttribute("hidden");
        },
      },
      "i",
    );
    return el(
      "div",
      {
        class: "condition-card" + (card.is_terminal ? " terminal" : ""),
        "data-key": card.key,
        onclick: () => handlers.onSelect(card.key),
      },
      el("div", { class: "condition-head" }, el("span", { class: "condition-text" }, card.condition), infoButton),
      info,
    );
  });

  return el(
    "section",
    { class: "local-panel mode-decision" },
    renderBreadcrumb(view, handlers),
    el("h2", { class: "question" }, decision.ambiguity),
    el("p", { class: "question-expanded" }, decision.ambiguity_expanded),
    el("div", { class: "conditions" }, ...cards),
  );
}

export function renderTerminal(view: SessionView, handlers: LocalPanelHandlers): HTMLElement {
  const terminal = view.terminal;
  if (!terminal) throw new Error("renderTerminal called without a terminal payload");

  const tags = Object.entries(terminal.tags).map(([axis, value]) =>
    el("span", { class: "tag", "data-axis": axis }, `${axis}: ${value}`),
  );

  const ratings: Rating[] = ["approve", "neutral", "reject"];
  const ratingControls = handlers.onRate
    ? el(
        "div",
        { class: "rating-controls" },
        ...ratings.map((rating) =>
          el(
            "button",
            {
              class: "rate-button" + (terminal.rating === rating ? " active" : ""),
              "data-rating": rating,
              onclick: () => handlers.onRate!(terminal.terminal, rating),
            },
            rating,
          ),
        ),
      )
    : null;

  return el(
    "section",
    { class: "local-panel mode-terminal", "data-terminal": terminal.terminal },
    renderBreadcrumb(view, handlers),
    el("div", { class: "tags" }, ...tags),
    el("article", { class: "terminal-output" }, terminal.output),
    ratingControls,
  );
}

/** Prior decisions collapsed into one bar; expanding lists each numbered
 * (question, chosen condition) pair, and each step jumps back to its
 * decision. */
export function renderBreadcrumb(view: SessionView, handlers: LocalPanelHandlers): HTMLElement {
  if (view.breadcrumb.length === 0) {
    return el("nav", { class: "breadcrumb empty" }, el("span", { class: "crumb-summary" }, "at the root"));
  }
  const list = el(
    "ol",
    { class: "crumb-list", hidden: "" },
    ...view.breadcrumb.map((step) =>
      el(
        "li",
        { class: "crumb-step", "data-decision": step.decision, "data-index": String(step.index) },
        el(
          "button",
          { class: "crumb-jump", onclick: () => handlers.onJump(step.decision) },
          el("span", { class: "crumb-question" }, step.question),
          el("span", { class: "crumb-condition" }, ` → ${step.condition_text}`),
        ),
      ),
    ),
  );
  const summary = el(
    "button",
    {
      class: "crumb-summary",
      onclick: () => list.toggleAttribute("hidden"),
      onmouseenter: () => list.removeAttribute("hidden"),
    },
    `${view.breadcrumb.length} prior decision${view.breadcrumb.length === 1 ? "" : "s"}`,
  );
  const back = el("button", { class: "back-button", onclick: () => handlers.onBack() }, "back");
  return el("nav", { class: "breadcrumb" }, back, summary, list);
}

export function mountLocalPanel(
  host: HTMLElement,
  view: SessionView,
  handlers: LocalPanelHandlers,
): void {
  clear(host);
  host.append(view.mode === "terminal" ? renderTerminal(view, handlers) : renderDecision(view, handlers));
}
