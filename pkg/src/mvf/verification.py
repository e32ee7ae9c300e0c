"""The six structural checks, per-decision reports, regeneration, and review.

Checks are graded, not pass/fail: each judge interaction yields a payload of
proposals and ratings, and flagging is a pure function of that payload and
the domain calibration's thresholds. Severity is derived from the payload
alone, so retuning thresholds never changes what the judge said, only what
gets flagged.

Checks over distinct decisions are independent and may run in parallel;
findings are canonically sorted before reports are compiled, so report
bytes do not depend on the schedule.
"""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Protocol

from .compiler import (
    CompiledTree,
    MultiverseDocument,
    document_to_dict,
    parse_document,
    validate_and_compile,
)
from .errors import (
    CompileError,
    ForeignFinding,
    JudgeError,
    JudgeUnavailable,
    MultiverseError,
    RecompileFailure,
    RewriterUnavailable,
    SchemaError,
    UnknownNode,
)
from .judge import (
    BLOCK_PATH,
    BLOCK_SUBJECT,
    ContextBlock,
    JudgeBackend,
    PromptEnvelope,
)


class CheckKind(Enum):
    UNAMBIGUITY = "unambiguity"
    COMPLETENESS = "completeness"
    FAITHFULNESS = "faithfulness"
    GROUNDING = "grounding"
    CONTINUITY = "continuity"
    UNIQUENESS = "uniqueness"


ALL_KINDS = tuple(CheckKind)
_KIND_ORDER = {kind: i for i, kind in enumerate(CheckKind)}

#: Checks that run once per condition; the others run once per decision.
CONDITION_LEVEL = frozenset(
    {CheckKind.UNAMBIGUITY, CheckKind.FAITHFULNESS, CheckKind.GROUNDING, CheckKind.UNIQUENESS}
)

_GROUNDING_SEVERITY = {"accepts": 0.0, "builds": 1 / 3, "stretches": 2 / 3, "contradicts": 1.0}


@dataclass(frozen=True)
class DomainCalibration:
    """Per-domain verifier introduction, per-check guidance, and thresholds."""

    domain: str
    verifier_introduction: str
    guidance: dict[str, str]
    thresholds: dict[str, dict]

    def threshold(self, kind: CheckKind) -> dict:
        return self.thresholds[kind.value]


@dataclass(frozen=True)
class CheckFinding:
    kind: CheckKind
    decision: str
    condition: str | None
    payload: dict
    flagged: bool
    severity: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "decision": self.decision,
            "condition": self.condition,
            "flagged": self.flagged,
            "severity": self.severity,
            "payload": self.payload,
        }


@dataclass(frozen=True)
class DecisionReport:
    decision: str
    findings: tuple[CheckFinding, ...]
    summary: dict[str, dict[str, int]]

    @property
    def flagged(self) -> bool:
        return any(f.flagged for f in self.findings)

    def to_dict(self) -> dict:
        return {
            "decision": self.decision,
            "summary": self.summary,
            "findings": [f.to_dict() for f in self.findings],
        }


# ---------------------------------------------------------------------------
# Flagging and severity (pure functions of payload + thresholds)


def _flagged(kind: CheckKind, payload: dict, threshold: dict, self_key: str | None) -> bool:
    if kind is CheckKind.UNAMBIGUITY:
        if payload.get("meta_language"):
            return True
        return any(
            alt["plausibility"] >= threshold["min_plausibility"]
            and alt["similarity"] <= threshold["max_similarity"]
            for alt in payload["alternatives"]
        )
    if kind is CheckKind.COMPLETENESS:
        return any(
            p["plausibility"] >= threshold["min_plausibility"] and not p["ruled_out"]
            for p in payload["proposals"]
        )
    if kind is CheckKind.FAITHFULNESS:
        return payload["naturalness"] <= threshold["max_naturalness"]
    if kind is CheckKind.GROUNDING:
        return payload["relation"] in threshold["flag_relations"]
    if kind is CheckKind.CONTINUITY:
        return payload["follows_rating"] <= threshold["max_follows"]
    if kind is CheckKind.UNIQUENESS:
        return (
            payload["likelihood"] <= threshold["max_likelihood"]
            or payload["best_match"] != self_key
        )
    raise ValueError(kind)


def _severity(kind: CheckKind, payload: dict, self_key: str | None) -> float:
    if kind is CheckKind.UNAMBIGUITY:
        base = max(
            ((alt["plausibility"] - 1) / 4) * ((5 - alt["similarity"]) / 4)
            for alt in payload["alternatives"]
        ) if payload["alternatives"] else 0.0
        if payload.get("meta_language"):
            base = max(base, 0.8)
        return base
    if kind is CheckKind.COMPLETENESS:
        open_proposals = [p for p in payload["proposals"] if not p["ruled_out"]]
        return max(((p["plausibility"] - 1) / 4 for p in open_proposals), default=0.0)
    if kind is CheckKind.FAITHFULNESS:
        return (4 - payload["naturalness"]) / 3
    if kind is CheckKind.GROUNDING:
        return _GROUNDING_SEVERITY[payload["relation"]]
    if kind is CheckKind.CONTINUITY:
        return (5 - payload["follows_rating"]) / 4
    if kind is CheckKind.UNIQUENESS:
        forward = (5 - payload["likelihood"]) / 4
        reverse = 1.0 if payload["best_match"] != self_key else 0.0
        return max(forward, reverse)
    raise ValueError(kind)


# ---------------------------------------------------------------------------
# Envelope construction


def _path_block(tree: CompiledTree, decision_id: str) -> ContextBlock:
    lines = []
    for i, (parent_id, key) in enumerate(tree.path_to(decision_id), start=1):
        parent = tree.node(parent_id)
        lines.append(f"{i}. Q: {parent.ambiguity}")
        lines.append(f"   chose {key}: {parent.branch(key).condition}")
    return ContextBlock(BLOCK_PATH, "\n".join(lines) if lines else "(root decision; no prior path)")


def _subject_block(payload: dict) -> ContextBlock:
    return ContextBlock(BLOCK_SUBJECT, json.dumps(payload, ensure_ascii=False, sort_keys=True))


_TASKS = {
    CheckKind.UNAMBIGUITY: (
        "Attempt to produce distinct alternative output states a different but plausible reading "
        "of this transformation might yield. Rate each alternative's plausibility (1-5) and its "
        "similarity to the actual output (1-5)."
    ),
    CheckKind.COMPLETENESS: (
        "Propose conditions that are absent from this decision but have not been ruled out by "
        "prior commitments. Rate each proposal's plausibility (1-5) and say whether an upstream "
        "commitment rules it out."
    ),
    CheckKind.FAITHFULNESS: (
        "Rate how naturally this condition reads as something a practitioner would say (1-4). "
        "If it reads as generated rather than expressed, propose a rewrite."
    ),
    CheckKind.GROUNDING: (
        "Classify how this condition relates to the commitments established by the prior path: "
        "accepts, builds, stretches, or contradicts."
    ),
    CheckKind.CONTINUITY: (
        "Propose one alternative question that would follow more naturally from the prior path, "
        "rate how well the current question follows from its context (1-5), and rate the "
        "similarity of your alternative to the current question (1-5)."
    ),
    CheckKind.UNIQUENESS: (
        "Propose an alternative transformation this condition might equally license and rate how "
        "likely (1-5) the condition is to imply its actual transformation specifically. Then run "
        "the check in reverse: report which sibling condition the actual transformation best "
        "matches (best_match)."
    ),
}


def build_envelope(
    kind: CheckKind,
    tree: CompiledTree,
    decision_id: str,
    condition_key: str | None,
    cal: DomainCalibration,
) -> PromptEnvelope:
    node = tree.node(decision_id)
    subject: dict = {"decision": decision_id, "ambiguity": node.ambiguity}
    if condition_key is not None:
        branch = node.branch(condition_key)
        subject.update(
            condition=condition_key,
            condition_text=branch.condition,
            instruction=branch.transformation.instruction,
            operation=branch.transformation.operation,
            reads_from=list(branch.transformation.reads_from),
            writes_to=list(branch.transformation.writes_to),
        )
        if kind is CheckKind.UNAMBIGUITY:
            subject["actual_output"] = dict(branch.output.entries)
            subject["available_keys"] = list(tree.availability[decision_id])
        if kind is CheckKind.UNIQUENESS:
            subject["siblings"] = {
                key: {"condition_text": b.condition, "instruction": b.transformation.instruction}
                for key, b in node.branches.items()
                if key != condition_key
            }
    else:
        subject["conditions"] = {key: b.condition for key, b in node.branches.items()}
        if kind is CheckKind.CONTINUITY:
            subject["prior_questions"] = [
                tree.node(pid).ambiguity for pid, _ in tree.path_to(decision_id)
            ]
    return PromptEnvelope(
        role_introduction=cal.verifier_introduction,
        task=f"[{kind.value}] {cal.guidance[kind.value]}\n{_TASKS[kind]}",
        context=(_path_block(tree, decision_id), _subject_block(subject)),
        response_schema=f"{kind.value}.v1",
    )


# ---------------------------------------------------------------------------
# Running checks


def run_check(
    kind: CheckKind,
    tree: CompiledTree,
    node: str,
    cal: DomainCalibration,
    judge: JudgeBackend,
    patterns: Iterable[str] = (),
) -> list[CheckFinding]:
    """Run one check kind against one decision; returns graded findings."""
    if node not in tree.nodes:
        raise UnknownNode(node)
    decision = tree.node(node)
    threshold = cal.threshold(kind)
    compiled_patterns = [re.compile(p, re.IGNORECASE) for p in patterns]
    findings: list[CheckFinding] = []

    def judge_payload(env: PromptEnvelope) -> dict:
        try:
            return judge.evaluate(env).payload
        except JudgeError:
            raise
        except Exception as exc:  # backend object itself broke
            raise JudgeUnavailable(str(exc)) from exc

    if kind in CONDITION_LEVEL:
        for key, branch in decision.branches.items():
            env = build_envelope(kind, tree, node, key, cal)
            payload = dict(judge_payload(env))
            if kind is CheckKind.UNAMBIGUITY:
                matches = [
                    p.pattern
                    for p in compiled_patterns
                    if p.search(branch.transformation.instruction)
                ]
                payload["meta_language"] = matches
            findings.append(
                CheckFinding(
                    kind=kind,
                    decision=node,
                    condition=key,
                    payload=payload,
                    flagged=_flagged(kind, payload, threshold, key),
                    severity=_severity(kind, payload, key),
                )
            )
    else:
        env = build_envelope(kind, tree, node, None, cal)
        payload = dict(judge_payload(env))
        findings.append(
            CheckFinding(
                kind=kind,
                decision=node,
                condition=None,
                payload=payload,
                flagged=_flagged(kind, payload, threshold, None),
                severity=_severity(kind, payload, None),
            )
        )
    return findings


def run_checks(
    tree: CompiledTree,
    cal: DomainCalibration,
    judge: JudgeBackend,
    kinds: Iterable[CheckKind] = ALL_KINDS,
    nodes: Iterable[str] | None = None,
    patterns: Iterable[str] = (),
    parallelism: int = 1,
) -> list[CheckFinding]:
    """Run the given checks over the given nodes (default: whole tree).

    Node-level parallelism; results are canonically sorted so the schedule
    cannot influence downstream report bytes.
    """
    kinds = tuple(kinds)
    order = tree.canonical_order()
    rank = {decision_id: i for i, decision_id in enumerate(order)}
    wanted = None if nodes is None else set(nodes)
    targets = order if wanted is None else [n for n in order if n in wanted]

    def check_node(decision_id: str) -> list[CheckFinding]:
        found: list[CheckFinding] = []
        for kind in kinds:
            found.extend(run_check(kind, tree, decision_id, cal, judge, patterns))
        return found

    if parallelism > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            batches = list(pool.map(check_node, targets))
    else:
        batches = [check_node(n) for n in targets]

    findings = [f for batch in batches for f in batch]
    findings.sort(key=lambda f: (rank[f.decision], _KIND_ORDER[f.kind], f.condition or ""))
    return findings


def compile_report(tree: CompiledTree, findings: Iterable[CheckFinding]) -> list[DecisionReport]:
    """One report per decision, findings grouped and ordered (kind, condition)."""
    order = tree.canonical_order()
    rank = {decision_id: i for i, decision_id in enumerate(order)}
    grouped: dict[str, list[CheckFinding]] = {decision_id: [] for decision_id in order}
    for finding in findings:
        if finding.decision not in grouped:
            raise ForeignFinding(finding.decision)
        grouped[finding.decision].append(finding)

    reports = []
    for decision_id in order:
        batch = sorted(
            grouped[decision_id], key=lambda f: (_KIND_ORDER[f.kind], f.condition or "")
        )
        summary = {
            kind.value: {
                "total": sum(1 for f in batch if f.kind is kind),
                "flagged": sum(1 for f in batch if f.kind is kind and f.flagged),
            }
            for kind in CheckKind
        }
        reports.append(DecisionReport(decision=decision_id, findings=tuple(batch), summary=summary))
    return reports


def render_report(round_number: int, reports: list[DecisionReport], kinds: Iterable[CheckKind] = ALL_KINDS) -> str:
    """Stable-byte JSON for round-N.report.json."""
    payload = {
        "round": round_number,
        "checks": [k.value for k in kinds],
        "decisions": [r.to_dict() for r in reports],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def residual_flags(reports: list[DecisionReport]) -> int:
    return sum(1 for r in reports for f in r.findings if f.flagged)


# ---------------------------------------------------------------------------
# Regeneration


FieldEdit = tuple[str, str]  # (field path, rewritten text)


class EditProvider(Protocol):
    """Pluggable editor: return field edits for a flagged decision, or None
    to decline."""

    def propose(
        self, tree: CompiledTree, report: DecisionReport
    ) -> list[FieldEdit] | None: ...


@dataclass
class RegenerationResult:
    document: MultiverseDocument
    tree: CompiledTree
    modified: set[str]
    rejected: dict[str, str] = field(default_factory=dict)


_TEXT_FIELDS = {"ambiguity", "ambiguity_expanded", "next_question_rationale"}
_CONDITION_TEXT_FIELDS = {"condition", "condition_expanded", "justification"}


def apply_field_edit(decision_dict: dict, field_path: str, text: str) -> None:
    """Apply one text rewrite to a decision's dict form.

    Supported paths: the three question fields, ``conditions.<key>.<field>``,
    ``conditions.<key>.transformation.instruction``, and
    ``conditions.<key>.output.<state key>`` (value rewrite only; structure
    is never editable through this path).
    """
    parts = field_path.split(".")
    if len(parts) == 1 and parts[0] in _TEXT_FIELDS:
        decision_dict[parts[0]] = text
        return
    if len(parts) >= 3 and parts[0] == "conditions":
        key = parts[1]
        if key not in decision_dict["conditions"]:
            raise ValueError(f"no condition {key!r} in decision {decision_dict['id']}")
        condition = decision_dict["conditions"][key]
        if len(parts) == 3 and parts[2] in _CONDITION_TEXT_FIELDS:
            condition[parts[2]] = text
            return
        if len(parts) == 4 and parts[2] == "transformation" and parts[3] == "instruction":
            condition["transformation"]["instruction"] = text
            return
        if len(parts) == 4 and parts[2] == "output" and parts[3] in condition["output"]:
            condition["output"][parts[3]] = text
            return
    raise ValueError(f"uneditable field path {field_path!r}")


def run_regeneration_round(
    tree: CompiledTree,
    reports: list[DecisionReport],
    editor: EditProvider,
) -> RegenerationResult:
    """Invoke the editor for flagged decisions only and recompile.

    Declines are recorded, not fatal. If an edit breaks static validity the
    round aborts with RecompileFailure and the original tree is preserved
    (this function never mutates its inputs).
    """
    for report in reports:
        if report.decision not in tree.nodes:
            raise ForeignFinding(report.decision)

    doc_dict = document_to_dict(tree.document)
    decisions_by_id = {d["id"]: d for d in doc_dict["decisions"]}
    before = {d["id"]: json.dumps(d, sort_keys=True, ensure_ascii=False) for d in doc_dict["decisions"]}

    rejected: dict[str, str] = {}
    for report in reports:
        if not report.flagged:
            continue
        edits = editor.propose(tree, report)
        if edits is None:
            rejected[report.decision] = "editor declined"
            continue
        target = decisions_by_id[report.decision]
        staged = json.loads(json.dumps(target, ensure_ascii=False))
        try:
            for field_path, text in edits:
                apply_field_edit(staged, field_path, text)
        except ValueError as exc:
            rejected[report.decision] = str(exc)
            continue
        target.clear()
        target.update(staged)

    modified = {
        decision_id
        for decision_id, d in decisions_by_id.items()
        if json.dumps(d, sort_keys=True, ensure_ascii=False) != before[decision_id]
    }

    try:
        document = parse_document(json.dumps(doc_dict, ensure_ascii=False))
        new_tree = validate_and_compile(document)
    except (CompileError, SchemaError, MultiverseError) as exc:
        raise RecompileFailure(exc) from exc
    return RegenerationResult(document=document, tree=new_tree, modified=modified, rejected=rejected)


class ScriptedEditor:
    """Test/operator editor driven by a fixed decision -> edits mapping.

    Decisions absent from the mapping are declined.
    """

    def __init__(self, edits: dict[str, list[FieldEdit] | None]):
        self.edits = edits
        self.invoked: list[str] = []

    def propose(self, tree: CompiledTree, report: DecisionReport) -> list[FieldEdit] | None:
        self.invoked.append(report.decision)
        return self.edits.get(report.decision)


class JudgeEditor:
    """Editor backed by a judge: sends the flagged decision plus its report
    and applies the returned field edits; a decline reply declines."""

    def __init__(self, judge: JudgeBackend, cal: DomainCalibration):
        self.judge = judge
        self.cal = cal

    def propose(self, tree: CompiledTree, report: DecisionReport) -> list[FieldEdit] | None:
        node = tree.node(report.decision)
        subject = {
            "decision": node.id,
            "ambiguity": node.ambiguity,
            "conditions": {
                key: {"condition": b.condition, "instruction": b.transformation.instruction}
                for key, b in node.branches.items()
            },
            "flags": [
                {"kind": f.kind.value, "condition": f.condition, "severity": f.severity}
                for f in report.findings
                if f.flagged
            ],
        }
        env = PromptEnvelope(
            role_introduction=self.cal.verifier_introduction,
            task=(
                "Propose targeted edits that resolve the flagged findings on this decision "
                "while preserving its meaning and its siblings' distinctness. Decline if any "
                "fix would create a worse problem."
            ),
            context=(_path_block(tree, report.decision), _subject_block(subject)),
            response_schema="regen.v1",
        )
        payload = self.judge.evaluate(env).payload
        if payload["decline"]:
            return None
        return [(edit["field"], edit["rewritten"]) for edit in payload["edits"]]


# ---------------------------------------------------------------------------
# Review pass


@dataclass(frozen=True)
class ReviewEdit:
    node: str
    field: str
    before: str
    after: str
    reason: str

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "field": self.field,
            "before": self.before,
            "after": self.after,
            "reason": self.reason,
        }


@dataclass
class ReviewLog:
    batches: list[list[str]]
    high_priority: set[str]
    entries: list[ReviewEdit]

    def to_dict(self) -> dict:
        return {
            "batches": self.batches,
            "high_priority": sorted(self.high_priority),
            "entries": [e.to_dict() for e in self.entries],
        }


class Rewriter(Protocol):
    def review(self, tree: CompiledTree, node: str) -> tuple[str, str, str] | None:
        """Return (field path, rewritten text, reason) or None for no edit."""
        ...


class JudgeRewriter:
    def __init__(self, judge: JudgeBackend, cal: DomainCalibration):
        self.judge = judge
        self.cal = cal

    def review(self, tree: CompiledTree, node: str) -> tuple[str, str, str] | None:
        decision = tree.node(node)
        subject = {
            "decision": decision.id,
            "ambiguity": decision.ambiguity,
            "ambiguity_expanded": decision.ambiguity_expanded,
            "conditions": {
                key: {"condition": b.condition, "output": dict(b.output.entries)}
                for key, b in decision.branches.items()
            },
        }
        env = PromptEnvelope(
            role_introduction=self.cal.verifier_introduction,
            task=(
                "Identify the sentence or phrase in this node most likely to be unclear to a "
                "reader without prior context: coyness (a pronoun or demonstrative without a "
                "clear referent), jargon opaque to the target audience, or general clarity. "
                "Rewrite it if needed; reply with reason 'none' and empty fields otherwise."
            ),
            context=(_path_block(tree, node), _subject_block(subject)),
            response_schema="review.v1",
        )
        try:
            payload = self.judge.evaluate(env).payload
        except JudgeError as exc:
            raise RewriterUnavailable(str(exc)) from exc
        if payload["reason"] == "none" and not payload["field"]:
            return None
        return payload["field"], payload["rewritten"], payload["reason"]


@dataclass
class ReviewResult:
    document: MultiverseDocument
    tree: CompiledTree
    log: ReviewLog


def run_review_pass(tree: CompiledTree, batch_size: int, rewriter: Rewriter) -> ReviewResult:
    """Visit every node exactly once in canonical-order batches.

    Decisions owning a terminal branch are marked high priority. Each
    applied edit is logged with the field, both texts, and the reason.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    order = tree.canonical_order()
    batches = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
    high_priority = {
        decision_id
        for decision_id in order
        if any(b.is_terminal for b in tree.node(decision_id).branches.values())
    }

    doc_dict = document_to_dict(tree.document)
    decisions_by_id = {d["id"]: d for d in doc_dict["decisions"]}
    entries: list[ReviewEdit] = []
    for batch in batches:
        for node in batch:
            proposal = rewriter.review(tree, node)
            if proposal is None:
                continue
            field_path, rewritten, reason = proposal
            target = decisions_by_id[node]
            staged = json.loads(json.dumps(target, ensure_ascii=False))
            try:
                before = _read_field(staged, field_path)
                apply_field_edit(staged, field_path, rewritten)
            except ValueError:
                continue  # malformed rewriter output; skip, do not abort the pass
            if rewritten == before:
                continue
            target.clear()
            target.update(staged)
            entries.append(ReviewEdit(node=node, field=field_path, before=before, after=rewritten, reason=reason))

    document = parse_document(json.dumps(doc_dict, ensure_ascii=False))
    new_tree = validate_and_compile(document)
    return ReviewResult(
        document=document,
        tree=new_tree,
        log=ReviewLog(batches=batches, high_priority=high_priority, entries=entries),
    )


def _read_field(decision_dict: dict, field_path: str) -> str:
    parts = field_path.split(".")
    if len(parts) == 1 and parts[0] in _TEXT_FIELDS:
        return decision_dict[parts[0]]
    if len(parts) >= 3 and parts[0] == "conditions" and parts[1] in decision_dict["conditions"]:
        condition = decision_dict["conditions"][parts[1]]
        if len(parts) == 3 and parts[2] in _CONDITION_TEXT_FIELDS:
            return condition[parts[2]]
        if len(parts) == 4 and parts[2] == "transformation" and parts[3] == "instruction":
            return condition["transformation"]["instruction"]
        if len(parts) == 4 and parts[2] == "output" and parts[3] in condition["output"]:
            return condition["output"][parts[3]]
    raise ValueError(f"unreadable field path {field_path!r}")


# ---------------------------------------------------------------------------
# Round driver


@dataclass
class RoundOutcome:
    round_number: int
    tree: CompiledTree
    reports: list[DecisionReport]
    modified: set[str] = field(default_factory=set)
    rejected: dict[str, str] = field(default_factory=dict)

    @property
    def residual(self) -> int:
        return residual_flags(self.reports)


def run_verification_rounds(
    tree: CompiledTree,
    cal: DomainCalibration,
    judge: JudgeBackend,
    kinds: Iterable[CheckKind] = ALL_KINDS,
    patterns: Iterable[str] = (),
    rounds: int = 2,
    editor: EditProvider | None = None,
    parallelism: int = 1,
) -> list[RoundOutcome]:
    """Check, regenerate, and re-check modified nodes, up to `rounds` rounds.

    Round 1 checks every node. Each later round runs only if an editor is
    present and flags remain; it re-checks the modified decisions only and
    carries unmodified decisions' findings forward.
    """
    kinds = tuple(kinds)
    findings = run_checks(tree, cal, judge, kinds, patterns=patterns, parallelism=parallelism)
    reports = compile_report(tree, findings)
    outcomes = [RoundOutcome(round_number=1, tree=tree, reports=reports)]

    for round_number in range(2, rounds + 1):
        if editor is None or residual_flags(reports) == 0:
            break
        regen = run_regeneration_round(tree, reports, editor)
        if not regen.modified:
            break
        fresh = run_checks(
            regen.tree, cal, judge, kinds,
            nodes=regen.modified, patterns=patterns, parallelism=parallelism,
        )
        carried = [
            f
            for report in reports
            if report.decision not in regen.modified
            for f in report.findings
        ]
        tree = regen.tree
        reports = compile_report(tree, list(carried) + fresh)
        outcomes.append(
            RoundOutcome(
                round_number=round_number,
                tree=tree,
                reports=reports,
                modified=regen.modified,
                rejected=regen.rejected,
            )
        )
    return outcomes
