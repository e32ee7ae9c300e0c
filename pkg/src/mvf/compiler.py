"""Document parsing, static validation, and the compiled pointer-linked tree.

The document format is UTF-8 JSON (extension ``.mv.json``): top-level
``schema_version``, ``domain``, ``raw_input``, ``decisions[]`` and
``terminal_marks[]``. Each decision carries ``id``, ``source`` (null for the
root or ``{"decision": ..., "condition": ...}``), the three question fields,
and ``conditions`` mapping branch keys to condition records.

Compilation runs the static checks in a fixed order so a defective document
always reports the same first error: duplicate ids, root count, source
resolution, tree shape (fan-out, cycles, reachability), per-branch output
keys and terminal operations, terminal-mark consistency, dangling branches,
and finally dataflow against the availability fold. Append-collisions and
empty presentation fields are warnings, not errors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import (
    ChildOfTerminal,
    CycleDetected,
    DanglingBranch,
    DegenerateDecision,
    DocumentSyntaxError,
    DuplicateChild,
    DuplicateDecisionId,
    MissingReadKey,
    MissingRoot,
    MultipleRoots,
    OutputKeyMismatch,
    SchemaError,
    TerminalMarkMismatch,
    TerminalNotReplace,
    UnresolvedSource,
)
from .model import (
    APPEND,
    OUTPUT_KEY,
    REPLACE,
    ConditionBranch,
    DecisionNode,
    SourceRef,
    StateRecord,
    Step,
    TransformationRecord,
    is_identifier,
    terminal_id,
)

KNOWN_DOMAINS = ("philosophy", "alignment", "poetry")


@dataclass(frozen=True)
class MultiverseDocument:
    schema_version: str
    domain: str
    raw_input: str
    decisions: tuple[DecisionNode, ...]
    terminal_marks: tuple[Step, ...]

    def decision_ids(self) -> list[str]:
        return [d.id for d in self.decisions]


@dataclass(frozen=True)
class Diagnostic:
    """A non-fatal compile warning."""

    code: str
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class CompiledTree:
    """Validated tree with resolved forward and backward references.

    ``children`` maps (decision, condition) to the child decision id;
    ``parents`` maps each non-root decision back to its source branch.
    ``availability`` holds, per decision, the state keys its branches may
    read (in first-written order). ``terminal_index`` records the full
    root-anchored step list for every terminal.
    """

    document: MultiverseDocument
    root_id: str
    nodes: dict[str, DecisionNode]
    children: dict[Step, str]
    parents: dict[str, SourceRef]
    availability: dict[str, tuple[str, ...]]
    terminal_index: dict[str, tuple[Step, ...]]
    diagnostics: tuple[Diagnostic, ...] = field(default=())

    def node(self, decision_id: str) -> DecisionNode:
        return self.nodes[decision_id]

    def canonical_order(self) -> list[str]:
        """Decision ids in depth-first preorder, branches in author order."""
        order: list[str] = []
        stack = [self.root_id]
        while stack:
            decision_id = stack.pop()
            order.append(decision_id)
            node = self.nodes[decision_id]
            for key in reversed(list(node.branches)):
                child = self.children.get((decision_id, key))
                if child is not None:
                    stack.append(child)
        return order

    def path_to(self, decision_id: str) -> list[Step]:
        """Steps from the root up to (excluding) the given decision."""
        steps: list[Step] = []
        current = decision_id
        while current != self.root_id:
            ref = self.parents[current]
            steps.append((ref.decision, ref.condition))
            current = ref.decision
        steps.reverse()
        return steps

    def terminal_output_text(self, tid: str) -> str:
        decision_id, condition_key = self.terminal_index[tid][-1]
        return self.nodes[decision_id].branches[condition_key].output[OUTPUT_KEY]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CompiledTree):
            return NotImplemented
        return (
            self.root_id == other.root_id
            and self.nodes == other.nodes
            and self.children == other.children
            and self.parents == other.parents
            and self.availability == other.availability
            and self.terminal_index == other.terminal_index
        )


@dataclass(frozen=True)
class TreeStats:
    decision_count: int
    output_count: int
    max_depth: int
    branching_histogram: dict[int, int]

    def to_dict(self) -> dict:
        return {
            "decision_count": self.decision_count,
            "output_count": self.output_count,
            "max_depth": self.max_depth,
            "branching_histogram": {str(k): v for k, v in sorted(self.branching_histogram.items())},
        }


# ---------------------------------------------------------------------------
# Parsing


def _locate_duplicate(raw: object, dup_key: str) -> str:
    """Best-effort naming of where a duplicate JSON key sits."""
    if isinstance(raw, dict):
        for decision in raw.get("decisions", []) or []:
            if not isinstance(decision, dict):
                continue
            conditions = decision.get("conditions")
            if isinstance(conditions, dict):
                if dup_key in conditions:
                    return f"decision {decision.get('id', '?')}.conditions.{dup_key}"
                for ckey, cval in conditions.items():
                    output = cval.get("output") if isinstance(cval, dict) else None
                    if isinstance(output, dict) and dup_key in output:
                        return f"decision {decision.get('id', '?')}.conditions.{ckey}.output.{dup_key}"
    return dup_key


def _expect(obj: dict, key: str, kind: type, where: str):
    if key not in obj:
        raise SchemaError(f"{where}.{key}", "required field is missing")
    value = obj[key]
    if not isinstance(value, kind):
        raise SchemaError(f"{where}.{key}", f"expected {kind.__name__}, got {type(value).__name__}")
    return value


def _parse_transformation(raw: dict, where: str) -> TransformationRecord:
    instruction = _expect(raw, "instruction", str, where)
    reads = _expect(raw, "reads_from", list, where)
    writes = _expect(raw, "writes_to", list, where)
    operation = _expect(raw, "operation", str, where)
    for key in list(reads) + list(writes):
        if not isinstance(key, str) or not is_identifier(key):
            raise SchemaError(f"{where}", f"state key {key!r} violates identifier grammar")
    if not writes:
        raise SchemaError(f"{where}.writes_to", "must be nonempty")
    if operation not in (APPEND, REPLACE):
        raise SchemaError(f"{where}.operation", f"must be append or replace, got {operation!r}")
    if len(set(reads)) != len(reads):
        raise SchemaError(f"{where}.reads_from", "keys must be unique")
    if len(set(writes)) != len(writes):
        raise SchemaError(f"{where}.writes_to", "keys must be unique")
    return TransformationRecord(
        instruction=instruction,
        reads_from=tuple(reads),
        writes_to=tuple(writes),
        operation=operation,
    )


def _parse_condition(key: str, raw: dict, where: str) -> ConditionBranch:
    if not is_identifier(key):
        raise SchemaError(where, f"condition key {key!r} violates identifier grammar")
    output_raw = _expect(raw, "output", dict, where)
    for out_key, out_value in output_raw.items():
        if not is_identifier(out_key):
            raise SchemaError(f"{where}.output", f"state key {out_key!r} violates identifier grammar")
        if not isinstance(out_value, str):
            raise SchemaError(f"{where}.output.{out_key}", "values must be text")
    return ConditionBranch(
        key=key,
        condition=_expect(raw, "condition", str, where),
        condition_expanded=_expect(raw, "condition_expanded", str, where),
        justification=_expect(raw, "justification", str, where),
        transformation=_parse_transformation(_expect(raw, "transformation", dict, where), f"{where}.transformation"),
        output=StateRecord(dict(output_raw)),
    )


def _parse_decision(raw: dict, index: int) -> DecisionNode:
    where = f"decisions[{index}]"
    decision_id = _expect(raw, "id", str, where)
    if not is_identifier(decision_id):
        raise SchemaError(f"{where}.id", f"{decision_id!r} violates identifier grammar")
    where = f"decision {decision_id}"

    source_raw = raw.get("source")
    if source_raw is None:
        source = None
    elif isinstance(source_raw, dict):
        source = SourceRef(
            decision=_expect(source_raw, "decision", str, f"{where}.source"),
            condition=_expect(source_raw, "condition", str, f"{where}.source"),
        )
    else:
        raise SchemaError(f"{where}.source", "must be null or {decision, condition}")

    conditions_raw = _expect(raw, "conditions", dict, where)
    if not conditions_raw:
        raise SchemaError(f"{where}.conditions", "a decision needs at least one condition")
    branches: dict[str, ConditionBranch] = {}
    for key, value in conditions_raw.items():
        if not isinstance(value, dict):
            raise SchemaError(f"{where}.conditions.{key}", "condition must be an object")
        branches[key] = _parse_condition(key, value, f"{where}.conditions.{key}")

    return DecisionNode(
        id=decision_id,
        source=source,
        ambiguity=_expect(raw, "ambiguity", str, where),
        ambiguity_expanded=_expect(raw, "ambiguity_expanded", str, where),
        next_question_rationale=_expect(raw, "next_question_rationale", str, where),
        branches=branches,
    )


def parse_document(text: str | bytes) -> MultiverseDocument:
    """Parse document text into a structurally faithful MultiverseDocument.

    No semantic validation happens here beyond the schema shape; run the
    result through validate_and_compile. Duplicate keys inside any JSON
    object (condition keys, output keys) are rejected at this stage.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    duplicates: list[str] = []

    def keep_last_and_record(pairs: list[tuple[str, object]]) -> dict:
        obj: dict[str, object] = {}
        for key, value in pairs:
            if key in obj:
                duplicates.append(key)
            obj[key] = value
        return obj

    try:
        raw = json.loads(text, object_pairs_hook=keep_last_and_record)
    except json.JSONDecodeError as exc:
        raise DocumentSyntaxError(f"line {exc.lineno}, column {exc.colno}", exc.msg) from None
    if duplicates:
        raise SchemaError(_locate_duplicate(raw, duplicates[0]), "duplicate key in JSON object")
    if not isinstance(raw, dict):
        raise SchemaError("document", "top level must be a JSON object")

    schema_version = _expect(raw, "schema_version", str, "document")
    domain = _expect(raw, "domain", str, "document")
    raw_input = _expect(raw, "raw_input", str, "document")
    decisions_raw = _expect(raw, "decisions", list, "document")
    marks_raw = _expect(raw, "terminal_marks", list, "document")

    decisions = tuple(
        _parse_decision(d, i) if isinstance(d, dict) else _raise_decision_type(i)
        for i, d in enumerate(decisions_raw)
    )

    marks: list[Step] = []
    for i, mark in enumerate(marks_raw):
        if not (isinstance(mark, list) and len(mark) == 2 and all(isinstance(m, str) for m in mark)):
            raise SchemaError(f"terminal_marks[{i}]", "must be a [decision, condition] pair")
        marks.append((mark[0], mark[1]))

    return MultiverseDocument(
        schema_version=schema_version,
        domain=domain,
        raw_input=raw_input,
        decisions=decisions,
        terminal_marks=tuple(marks),
    )


def _raise_decision_type(index: int):
    raise SchemaError(f"decisions[{index}]", "must be an object")


# ---------------------------------------------------------------------------
# Validation and compilation


def validate_and_compile(doc: MultiverseDocument) -> CompiledTree:
    """Run all static checks and emit the pointer-linked tree.

    Raises the first failing check's error; collects non-fatal issues
    (append collisions, empty presentation fields) as diagnostics.
    """
    nodes: dict[str, DecisionNode] = {}
    for decision in doc.decisions:
        if decision.id in nodes:
            raise DuplicateDecisionId(decision.id)
        nodes[decision.id] = decision

    roots = [d.id for d in doc.decisions if d.source is None]
    if not roots:
        raise MissingRoot()
    if len(roots) > 1:
        raise MultipleRoots(roots)
    root_id = roots[0]

    children: dict[Step, str] = {}
    parents: dict[str, SourceRef] = {}
    for decision in doc.decisions:
        ref = decision.source
        if ref is None:
            continue
        if ref.decision not in nodes:
            raise UnresolvedSource(decision.id, ref.decision, ref.condition, "no such decision")
        parent = nodes[ref.decision]
        if ref.condition not in parent.branches:
            raise UnresolvedSource(decision.id, ref.decision, ref.condition, "no such condition")
        if parent.branches[ref.condition].is_terminal:
            raise ChildOfTerminal(decision.id, ref.decision, ref.condition)
        slot = (ref.decision, ref.condition)
        if slot in children:
            raise DuplicateChild(ref.decision, ref.condition, [children[slot], decision.id])
        children[slot] = decision.id
        parents[decision.id] = ref

    _check_reachability(nodes, parents, root_id)

    for decision in doc.decisions:
        non_terminal = [b for b in decision.branches.values() if not b.is_terminal]
        if len(decision.branches) == 1 and non_terminal:
            raise DegenerateDecision(decision.id)

    for decision in doc.decisions:
        for branch in decision.branches.values():
            writes = set(branch.transformation.writes_to)
            out_keys = set(branch.output.entries)
            if writes != out_keys:
                raise OutputKeyMismatch(
                    decision.id,
                    branch.key,
                    missing=sorted(writes - out_keys),
                    extra=sorted(out_keys - writes),
                )
            if branch.is_terminal and branch.transformation.operation != REPLACE:
                raise TerminalNotReplace(decision.id, branch.key)

    output_branches = {
        terminal_id(d.id, b.key)
        for d in doc.decisions
        for b in d.branches.values()
        if b.is_terminal
    }
    marked = {terminal_id(d, c) for d, c in doc.terminal_marks}
    if output_branches != marked:
        raise TerminalMarkMismatch(
            unmarked=sorted(output_branches - marked),
            marked_non_output=sorted(marked - output_branches),
        )

    for decision in doc.decisions:
        for branch in decision.branches.values():
            if not branch.is_terminal and (decision.id, branch.key) not in children:
                raise DanglingBranch(decision.id, branch.key)

    diagnostics: list[Diagnostic] = []
    availability: dict[str, tuple[str, ...]] = {}
    terminal_index: dict[str, tuple[Step, ...]] = {}
    # Walk the tree from the root so availability folds along real paths and
    # diagnostics come out in a document-order-independent, canonical order.
    stack: list[tuple[str, tuple[str, ...], tuple[Step, ...]]] = [(root_id, (), ())]
    while stack:
        decision_id, avail, path = stack.pop()
        availability[decision_id] = avail
        node = nodes[decision_id]
        avail_set = set(avail)
        descend: list[tuple[str, tuple[str, ...], tuple[Step, ...]]] = []
        for key, branch in node.branches.items():
            for read in branch.transformation.reads_from:
                if read not in avail_set:
                    raise MissingReadKey(read, decision_id, key)
            for collided in collision_order(avail, branch):
                diagnostics.append(
                    Diagnostic(
                        "collision_warning",
                        f"{decision_id}.{key} append overwrites existing key {collided!r}",
                    )
                )
            step_path = path + ((decision_id, key),)
            if branch.is_terminal:
                terminal_index[terminal_id(decision_id, key)] = step_path
            else:
                child = children[(decision_id, key)]
                descend.append((child, _fold_availability(avail, branch), step_path))
        stack.extend(reversed(descend))

    order_hint = {i: n for n, i in enumerate(availability)}
    for decision_id in sorted(nodes, key=order_hint.get):
        decision = nodes[decision_id]
        if not decision.ambiguity_expanded:
            diagnostics.append(
                Diagnostic("empty_field", f"decision {decision.id}: ambiguity_expanded is empty")
            )
        for branch in decision.branches.values():
            if not branch.justification:
                diagnostics.append(
                    Diagnostic(
                        "empty_field",
                        f"{decision.id}.{branch.key}: justification is empty",
                    )
                )

    return CompiledTree(
        document=doc,
        root_id=root_id,
        nodes=nodes,
        children=children,
        parents=parents,
        availability=availability,
        terminal_index=terminal_index,
        diagnostics=tuple(diagnostics),
    )


def _fold_availability(avail: tuple[str, ...], branch: ConditionBranch) -> tuple[str, ...]:
    writes = branch.transformation.writes_to
    if branch.transformation.operation == REPLACE:
        return tuple(writes)
    return avail + tuple(k for k in writes if k not in avail)


def collision_order(avail: tuple[str, ...], branch: ConditionBranch) -> list[str]:
    if branch.transformation.operation != APPEND:
        return []
    avail_set = set(avail)
    return [k for k in branch.transformation.writes_to if k in avail_set]


def _check_reachability(nodes: dict[str, DecisionNode], parents: dict[str, SourceRef], root_id: str):
    # Follow parent links from every decision; a walk that revisits itself
    # before reaching the root is a cycle (and covers unreachable islands).
    cleared: set[str] = {root_id}
    for decision_id in nodes:
        trail: list[str] = []
        on_trail: set[str] = set()
        current = decision_id
        while current not in cleared:
            if current in on_trail:
                cycle_start = trail.index(current)
                raise CycleDetected(trail[cycle_start:] + [current])
            trail.append(current)
            on_trail.add(current)
            current = parents[current].decision
        cleared.update(trail)


# ---------------------------------------------------------------------------
# Stats and export


def compute_stats(tree: CompiledTree) -> TreeStats:
    histogram: dict[int, int] = {}
    for node in tree.nodes.values():
        arity = len(node.branches)
        histogram[arity] = histogram.get(arity, 0) + 1
    max_depth = max((len(steps) for steps in tree.terminal_index.values()), default=0)
    return TreeStats(
        decision_count=len(tree.nodes),
        output_count=len(tree.terminal_index),
        max_depth=max_depth,
        branching_histogram=histogram,
    )


def document_to_dict(doc: MultiverseDocument, order: list[str] | None = None) -> dict:
    """Plain-dict form of a document, decisions in the given id order."""
    by_id = {d.id: d for d in doc.decisions}
    ids = order if order is not None else [d.id for d in doc.decisions]
    return {
        "schema_version": doc.schema_version,
        "domain": doc.domain,
        "raw_input": doc.raw_input,
        "decisions": [_decision_to_dict(by_id[i]) for i in ids],
        "terminal_marks": [[d, c] for d, c in doc.terminal_marks],
    }


def _decision_to_dict(decision: DecisionNode) -> dict:
    return {
        "id": decision.id,
        "source": None
        if decision.source is None
        else {"decision": decision.source.decision, "condition": decision.source.condition},
        "ambiguity": decision.ambiguity,
        "ambiguity_expanded": decision.ambiguity_expanded,
        "next_question_rationale": decision.next_question_rationale,
        "conditions": {
            key: {
                "condition": b.condition,
                "condition_expanded": b.condition_expanded,
                "justification": b.justification,
                "transformation": {
                    "instruction": b.transformation.instruction,
                    "reads_from": list(b.transformation.reads_from),
                    "writes_to": list(b.transformation.writes_to),
                    "operation": b.transformation.operation,
                },
                "output": dict(b.output.entries),
            }
            for key, b in decision.branches.items()
        },
    }


def export_tree(tree: CompiledTree) -> str:
    """Canonical serialization of a compiled tree (``.tree.json``).

    The document schema plus resolved child references and the terminal
    index. Decisions are emitted in depth-first preorder so the bytes are
    stable regardless of the source document's ordering, and the result
    re-parses through parse_document (extra fields are ignored there).
    """
    order = tree.canonical_order()
    payload = document_to_dict(tree.document, order)
    # Sort terminal_marks into canonical (preorder, branch author order).
    mark_rank = {tid: i for i, tid in enumerate(tree.terminal_index)}
    payload["terminal_marks"] = sorted(
        ([d, c] for d, c in tree.document.terminal_marks),
        key=lambda m: mark_rank[terminal_id(m[0], m[1])],
    )
    payload["children"] = {
        f"{d}.{c}": child for (d, c), child in sorted(tree.children.items(), key=lambda kv: (order.index(kv[0][0]), kv[0][1]))
    }
    payload["terminal_index"] = {
        tid: [[d, c] for d, c in steps] for tid, steps in tree.terminal_index.items()
    }
    payload["availability"] = {i: list(tree.availability[i]) for i in order}
    payload["diagnostics"] = [d.to_dict() for d in tree.diagnostics]
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def compile_text(text: str | bytes) -> CompiledTree:
    """Parse + validate in one call; the usual entry point for files."""
    return validate_and_compile(parse_document(text))
