import { beforeEach, describe, expect, it, vi } from "vitest";

import { renderDecision, renderTerminal } from "../src/localPanel.js";
import { loadRecording } from "./helpers.js";

const recording = loadRecording();
const noop = { onSelect: () => {}, onBack: () => {}, onJump: () => {} };

describe("renderDecision", () => {
  it("shows the five root condition cards in author order", () => {
    const panel = renderDecision(recording.root_view, noop);
    const cards = [...panel.querySelectorAll(".condition-card")];
    expect(cards.map((c) => c.getAttribute("data-key"))).toEqual([
      "experience",
      "science",
      "practical",
      "conceptual",
      "spiritual",
    ]);
  });

  it("shows the question text verbatim from the payload", () => {
    const panel = renderDecision(recording.root_view, noop);
    expect(panel.querySelector(".question")?.textContent).toBe(
      recording.root_view.decision!.ambiguity,
    );
  });

  it("condition card text equals the server's condition strings", () => {
    const panel = renderDecision(recording.root_view, noop);
    const conditions = recording.root_view.decision!.conditions;
    const rendered = [...panel.querySelectorAll(".condition-text")].map((n) => n.textContent);
    expect(rendered).toEqual(conditions.map((c) => c.condition));
  });

  it("info affordance reveals condition_expanded and justification", () => {
    const panel = renderDecision(recording.root_view, noop);
    document.body.append(panel);
    const card = panel.querySelector('[data-key="experience"]')!;
    const info = card.querySelector(".condition-info")!;
    expect(info.hasAttribute("hidden")).toBe(true);

    (card.querySelector(".info-button") as HTMLButtonElement).click();
    expect(info.hasAttribute("hidden")).toBe(false);

    const payload = recording.root_view.decision!.conditions.find((c) => c.key === "experience")!;
    expect(info.querySelector(".condition-expanded")?.textContent).toBe(payload.condition_expanded);
    expect(info.querySelector(".condition-justification")?.textContent).toBe(payload.justification);
  });

  it("clicking a card selects its condition", () => {
    const onSelect = vi.fn();
    const panel = renderDecision(recording.root_view, { ...noop, onSelect });
    document.body.append(panel);
    (panel.querySelector('[data-key="science"]') as HTMLElement).click();
    expect(onSelect).toHaveBeenCalledWith("science");
  });

  it("info button does not select the card", () => {
    const onSelect = vi.fn();
    const panel = renderDecision(recording.root_view, { ...noop, onSelect });
    document.body.append(panel);
    (panel.querySelector('[data-key="science"] .info-button') as HTMLElement).click();
    expect(onSelect).not.toHaveBeenCalled();
  });
});

describe("renderTerminal", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("shows the output text verbatim", () => {
    const panel = renderTerminal(recording.terminal_view, noop);
    expect(panel.querySelector(".terminal-output")?.textContent).toBe(
      recording.terminal_view.terminal!.output,
    );
  });

  it("depth-3 terminal carries a breadcrumb of exactly 3 numbered steps", () => {
    expect(recording.terminal_view.depth).toBe(3);
    const panel = renderTerminal(recording.terminal_view, noop);
    const steps = [...panel.querySelectorAll(".crumb-step")];
    expect(steps).toHaveLength(3);
    expect(steps.map((s) => s.getAttribute("data-index"))).toEqual(["1", "2", "3"]);
  });

  it("breadcrumb texts equal the server path strings verbatim", () => {
    const panel = renderTerminal(recording.terminal_view, noop);
    const questions = [...panel.querySelectorAll(".crumb-question")].map((n) => n.textContent);
    const conditions = [...panel.querySelectorAll(".crumb-condition")].map((n) => n.textContent);
    const breadcrumb = recording.terminal_view.breadcrumb;
    expect(questions).toEqual(breadcrumb.map((s) => s.question));
    expect(conditions).toEqual(breadcrumb.map((s) => ` → ${s.condition_text}`));
  });

  it("breadcrumb collapses by default and expands via the summary control", () => {
    const panel = renderTerminal(recording.terminal_view, noop);
    document.body.append(panel);
    const list = panel.querySelector(".crumb-list")!;
    expect(list.hasAttribute("hidden")).toBe(true);
    (panel.querySelector(".crumb-summary") as HTMLButtonElement).click();
    expect(list.hasAttribute("hidden")).toBe(false);
  });

  it("clicking breadcrumb entry j jumps to decision j", () => {
    const onJump = vi.fn();
    const panel = renderTerminal(recording.terminal_view, { ...noop, onJump });
    document.body.append(panel);
    const second = panel.querySelector('.crumb-step[data-index="2"] .crumb-jump')!;
    (second as HTMLButtonElement).click();
    expect(onJump).toHaveBeenCalledWith(recording.terminal_view.breadcrumb[1].decision);
  });

  it("shows the terminal's tags", () => {
    const panel = renderTerminal(recording.terminal_view, noop);
    const tags = recording.terminal_view.terminal!.tags;
    const rendered = [...panel.querySelectorAll(".tags .tag")].map((n) => n.textContent);
    expect(rendered).toEqual(Object.entries(tags).map(([axis, value]) => `${axis}: ${value}`));
  });

  it("rating controls appear only when a rate handler is given", () => {
    const bare = renderTerminal(recording.terminal_view, noop);
    expect(bare.querySelector(".rating-controls")).toBeNull();
    const onRate = vi.fn();
    const annotate = renderTerminal(recording.terminal_view, { ...noop, onRate });
    document.body.append(annotate);
    (annotate.querySelector('.rate-button[data-rating="approve"]') as HTMLElement).click();
    expect(onRate).toHaveBeenCalledWith(recording.terminal_view.terminal!.terminal, "approve");
  });
});
