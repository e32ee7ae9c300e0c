/** Payload shapes mirrored from the session API. The UI holds no state the
 * server cannot reproduce; every interface here is a response body. */

export interface BreadcrumbStep {
  index: number;
  decision: string;
  question: string;
  condition: string;
  condition_text: string;
}

export interface ConditionCard {
  key: string;
  condition: string;
  condition_expanded: string;
  justification: string;
  is_terminal: boolean;
}

export interface DecisionPayload {
  id: string;
  ambiguity: string;
  ambiguity_expanded: string;
  next_question_rationale: string;
  conditions: ConditionCard[];
}

export interface TerminalPayload {
  terminal: string;
  output: string;
  tags: Record<string, string>;
  rating: string | null;
}

export interface SessionView {
  session: string;
  tree: string;
  revision: number;
  mode: "decision" | "terminal";
  breadcrumb: BreadcrumbStep[];
  depth: number;
  accumulated: Record<string, string>;
  filters: Record<string, string[]>;
  decision: DecisionPayload | null;
  terminal: TerminalPayload | null;
}

export interface OutputView {
  terminal: string;
  output: string;
  tags: Record<string, string>;
  steps: [string, string][];
  rating: string | null;
}

export interface OutputsPayload {
  revision: number;
  outputs: OutputView[];
}

export interface ExportedTransformation {
  instruction: string;
  reads_from: string[];
  writes_to: string[];
  operation: "append" | "replace";
}

export interface ExportedCondition {
  condition: string;
  condition_expanded: string;
  justification: string;
  transformation: ExportedTransformation;
  output: Record<string, string>;
}

export interface ExportedDecision {
  id: string;
  source: { decision: string; condition: string } | null;
  ambiguity: string;
  ambiguity_expanded: string;
  next_question_rationale: string;
  conditions: Record<string, ExportedCondition>;
}

/** The compiled-tree export served by GET /trees/{id}. */
export interface TreeExport {
  schema_version: string;
  domain: string;
  raw_input: string;
  decisions: ExportedDecision[];
  terminal_marks: [string, string][];
  children: Record<string, string>;
  terminal_index: Record<string, [string, string][]>;
}

export interface NodeSummary {
  node: string;
  counts: Record<string, number>;
  total: number;
  fractions: Record<string, number>;
}

export interface SummaryPayload {
  revision: number;
  nodes: Record<string, NodeSummary>;
}

export interface TreeStats {
  decision_count: number;
  output_count: number;
  max_depth: number;
  branching_histogram: Record<string, number>;
}

export type Rating = "approve" | "neutral" | "reject";
export type Mode = "explore" | "annotate";
