/** Global view: a top-down tidy tree of every decision and terminal.
 *
 * Siblings beyond a configurable fan-out collapse behind a "+N" stub that
 * expands on click (large trees need progressive disclosure). The current
 * path is highlighted from the session payload; in annotate mode node fills
 * come from the rating summary (see colors.ts for the blend).
 */

import { blendFractions, CATEGORY_COLORS, EXPLORE_FILL, HIGHLIGHT_FILL, rgbString } from "./colors.js";
import { svgEl } from "./dom.js";
import type { OutputView, SessionView, SummaryPayload, TreeExport } from "./types.js";

export interface TreeViewOptions {
  maxFanOut?: number;
  nodeRadius?: number;
  levelHeight?: number;
  leafSpacing?: number;
}

export interface TreeViewHandlers {
  onJumpToDecision?: (decisionId: string) => void;
  onGotoTerminal?: (terminalId: string) => void;
  onToggleExpand?: (decisionId: string) => void;
}

interface LayoutNode {
  id: string; // decision id, or "decision.condition" for terminals / stubs
  kind: "decision" | "terminal" | "stub";
  parentEdge: string | null; // "decision.condition" edge id into this node
  depth: number;
  x: number;
  hiddenCount?: number;
}

export interface TreeLayout {
  nodes: LayoutNode[];
  edges: { id: string; from: string; to: string }[];
  width: number;
  height: number;
}

const DEFAULTS = { maxFanOut: 8, nodeRadius: 7, levelHeight: 64, leafSpacing: 26 };

function rootOf(tree: TreeExport): string {
  const root = tree.decisions.find((d) => d.source === null);
  if (!root) throw new Error("tree export has no root decision");
  return root.id;
}

/** Tidy layout: leaves get sequential x slots, parents center over their
 * children; collapsed branches are replaced by a single stub leaf. */
export function layoutTree(
  tree: TreeExport,
  expanded: Set<string>,
  options: TreeViewOptions = {},
): TreeLayout {
  const { maxFanOut, levelHeight, leafSpacing } = { ...DEFAULTS, ...options };
  const byId = new Map(tree.decisions.map((d) => [d.id, d]));
  const nodes: LayoutNode[] = [];
  const edges: { id: string; from: string; to: string }[] = [];
  let nextLeafX = 0;
  let maxDepth = 0;

  function place(decisionId: string, parentEdge: string | null, depth: number): number {
    maxDepth = Math.max(maxDepth, depth);
    const decision = byId.get(decisionId)!;
    const keys = Object.keys(decision.conditions);
    const visible = expanded.has(decisionId) || keys.length <= maxFanOut ? keys : keys.slice(0, maxFanOut - 1);
    const childXs: number[] = [];

    for (const key of visible) {
      const edgeId = `${decisionId}.${key}`;
      const child = tree.children[edgeId];
      if (child !== undefined) {
        childXs.push(place(child, edgeId, depth + 1));
        edges.push({ id: edgeId, from: decisionId, to: child });
      } else {
        const x = nextLeafX++;
        nodes.push({ id: edgeId, kind: "terminal", parentEdge: edgeId, depth: depth + 1, x });
        edges.push({ id: edgeId, from: decisionId, to: edgeId });
        childXs.push(x);
        maxDepth = Math.max(maxDepth, depth + 1);
      }
    }
    if (visible.length < keys.length) {
      const x = nextLeafX++;
      const stubId = `${decisionId}.+${keys.length - visible.length}`;
      nodes.push({
        id: stubId,
        kind: "stub",
        parentEdge: stubId,
        depth: depth + 1,
        x,
        hiddenCount: keys.length - visible.length,
      });
      edges.push({ id: stubId, from: decisionId, to: stubId });
      childXs.push(x);
    }

    const x = childXs.length
      ? (Math.min(...childXs) + Math.max(...childXs)) / 2
      : nextLeafX++;
    nodes.push({ id: decisionId, kind: "decision", parentEdge, depth, x });
    return x;
  }

  place(rootOf(tree), null, 0);
  return {
    nodes,
    edges,
    width: Math.max(1, nextLeafX) * leafSpacing,
    height: (maxDepth + 1) * levelHeight,
  };
}

/** Edge ids on the current path, straight from the session payload. */
export function pathEdgeIds(view: SessionView): Set<string> {
  return new Set(view.breadcrumb.map((step) => `${step.decision}.${step.condition}`));
}

/** Branches whose subtree contains at least one filtered-in output: every
 * edge on every visible output's recorded path. */
export function matchingBranchIds(outputs: OutputView[]): Set<string> {
  const ids = new Set<string>();
  for (const output of outputs) {
    for (const [decision, condition] of output.steps) {
      ids.add(`${decision}.${condition}`);
    }
  }
  return ids;
}

export interface RenderTreeInputs {
  tree: TreeExport;
  view: SessionView;
  expanded: Set<string>;
  summary?: SummaryPayload | null; // present => annotate coloring
  filteredOutputs?: OutputView[] | null; // present => branch highlighting
  options?: TreeViewOptions;
}

export function renderTree(inputs: RenderTreeInputs, handlers: TreeViewHandlers = {}): SVGElement {
  const options = { ...DEFAULTS, ...(inputs.options ?? {}) };
  const layout = layoutTree(inputs.tree, inputs.expanded, options);
  const onPath = pathEdgeIds(inputs.view);
  const matching = inputs.filteredOutputs ? matchingBranchIds(inputs.filteredOutputs) : null;
  const positions = new Map(layout.nodes.map((n) => [n.id, n]));
  const pad = options.leafSpacing;

  const coordinate = (node: LayoutNode) => ({
    x: pad / 2 + node.x * options.leafSpacing,
    y: options.levelHeight / 2 + node.depth * options.levelHeight,
  });

  const svg = svgEl("svg", {
    class: "tree-view",
    viewBox: `0 0 ${layout.width + pad} ${layout.height}`,
    role: "img",
  });

  for (const edge of layout.edges) {
    const from = coordinate(positions.get(edge.from)!);
    const to = coordinate(positions.get(edge.to)!);
    const classes = ["tree-edge"];
    if (onPath.has(edge.id)) classes.push("on-path");
    if (matching && matching.has(edge.id)) classes.push("matching");
    svg.append(
      svgEl("line", {
        class: classes.join(" "),
        "data-edge": edge.id,
        x1: String(from.x),
        y1: String(from.y),
        x2: String(to.x),
        y2: String(to.y),
      }),
    );
  }

  const currentDecision = inputs.view.decision?.id ?? null;
  const currentTerminal = inputs.view.terminal?.terminal ?? null;

  for (const node of layout.nodes) {
    const { x, y } = coordinate(node);
    if (node.kind === "stub") {
      const parent = node.id.split(".")[0];
      svg.append(
        svgEl(
          "g",
          {
            class: "tree-stub",
            "data-node": node.id,
            onclick: () => handlers.onToggleExpand?.(parent),
          },
          svgEl("circle", { cx: String(x), cy: String(y), r: String(options.nodeRadius), fill: "#e5e7eb" }),
          svgEl("text", { x: String(x), y: String(y + 3), "text-anchor": "middle", class: "stub-label" }, `+${node.hiddenCount}`),
        ),
      );
      continue;
    }

    let fill = EXPLORE_FILL;
    if (inputs.summary) {
      const nodeSummary = inputs.summary.nodes[node.id];
      fill = nodeSummary ? rgbString(blendFractions(nodeSummary.fractions)) : rgbString(CATEGORY_COLORS.unrated);
    }
    const isCurrent = node.id === currentDecision || node.id === currentTerminal;
    if (!inputs.summary && (isCurrent || (node.parentEdge && onPath.has(node.parentEdge)))) {
      fill = HIGHLIGHT_FILL;
    }

    const handler =
      node.kind === "decision"
        ? () => handlers.onJumpToDecision?.(node.id)
        : () => handlers.onGotoTerminal?.(node.id);
    svg.append(
      svgEl("circle", {
        class:
          `tree-node ${node.kind}` +
          (isCurrent ? " current" : "") +
          (node.parentEdge && onPath.has(node.parentEdge) ? " on-path" : ""),
        "data-node": node.id,
        cx: String(x),
        cy: String(y),
        r: String(node.kind === "terminal" ? options.nodeRadius - 2 : options.nodeRadius),
        fill,
        onclick: handler,
      }),
    );
  }
  return svg;
}
