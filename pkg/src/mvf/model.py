"""Domain types and the deterministic state-fold semantics.

A multiverse is a tree of decisions. Each decision asks one question and
bundles alternative branches; each branch pairs a human-readable condition
with a transformation that rewrites the accumulated state. Walking a path
from the root and folding the transformations in order reconstructs the
state at any node. Everything here is an immutable value: folds are pure
functions and safe to run concurrently over a shared tree.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import BrokenChain, MissingReadKey, UnknownCondition, UnknownNode

if TYPE_CHECKING:
    from .compiler import CompiledTree

IDENTIFIER_RE = re.compile(r"^[a-z][a-z0-9_]*$")

#: State key a branch writes to make itself a terminal output.
OUTPUT_KEY = "output"

APPEND = "append"
REPLACE = "replace"

Step = tuple[str, str]  # (decision id, condition key)


def is_identifier(text: str) -> bool:
    return bool(IDENTIFIER_RE.match(text))


def terminal_id(decision_id: str, condition_key: str) -> str:
    """Stable id for a terminal branch; identifiers cannot contain dots."""
    return f"{decision_id}.{condition_key}"


@dataclass(frozen=True)
class StateRecord:
    """Accumulated key-value commitments at a point on a path.

    Entries preserve insertion order for rendering; equality is plain dict
    equality and therefore order-insensitive. Values are opaque text.
    """

    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for key in self.entries:
            if not is_identifier(key):
                raise ValueError(f"state key {key!r} violates identifier grammar")

    def keys(self) -> list[str]:
        return list(self.entries)

    def __contains__(self, key: str) -> bool:
        return key in self.entries

    def __getitem__(self, key: str) -> str:
        return self.entries[key]

    def __len__(self) -> int:
        return len(self.entries)

    def to_json(self) -> str:
        """Canonical serialization: insertion order, no whitespace games."""
        return json.dumps(self.entries, ensure_ascii=False)


EMPTY_STATE = StateRecord()


@dataclass(frozen=True)
class TransformationRecord:
    """How a branch rewrites the state, with explicit read/write metadata.

    ``instruction`` is the natural-language transformation text; the engine
    never executes it (outputs were recorded at authoring time). The
    structured ``reads_from``/``writes_to`` fields are authoritative; any
    prose read/write clause inside the instruction is ignored.
    """

    instruction: str
    reads_from: tuple[str, ...]
    writes_to: tuple[str, ...]
    operation: str  # APPEND or REPLACE

    def __post_init__(self):
        if not self.writes_to:
            raise ValueError("writes_to must be nonempty")
        if self.operation not in (APPEND, REPLACE):
            raise ValueError(f"operation must be append or replace, got {self.operation!r}")


@dataclass(frozen=True)
class ConditionBranch:
    """One branch of a decision: the commitment, its transformation, and the
    recorded output entries."""

    key: str
    condition: str
    condition_expanded: str
    justification: str
    transformation: TransformationRecord
    output: StateRecord

    @property
    def is_terminal(self) -> bool:
        return OUTPUT_KEY in self.transformation.writes_to


@dataclass(frozen=True)
class SourceRef:
    """Which branch of which parent decision a decision reads from."""

    decision: str
    condition: str


@dataclass(frozen=True)
class DecisionNode:
    id: str
    source: SourceRef | None  # None marks the root
    ambiguity: str
    ambiguity_expanded: str
    next_question_rationale: str
    branches: dict[str, ConditionBranch]

    def branch(self, key: str) -> ConditionBranch:
        try:
            return self.branches[key]
        except KeyError:
            raise UnknownCondition(self.id, key) from None


@dataclass(frozen=True)
class PathCursor:
    """A root-anchored position: the steps taken and the folded state."""

    steps: tuple[Step, ...]
    accumulated: StateRecord


def apply_step(prior: StateRecord, branch: ConditionBranch) -> StateRecord:
    """Fold one branch into the prior state.

    append extends the prior entries with the branch's recorded output
    (later writes overwrite on key collision); replace discards the prior
    entries entirely. Raises MissingReadKey if the branch reads a key the
    prior state does not hold.
    """
    t = branch.transformation
    for key in t.reads_from:
        if key not in prior:
            raise MissingReadKey(key, condition=branch.key)
    if t.operation == REPLACE:
        return StateRecord(dict(branch.output.entries))
    merged = dict(prior.entries)
    merged.update(branch.output.entries)
    return StateRecord(merged)


def fold_path(tree: "CompiledTree", steps: list[Step] | tuple[Step, ...]) -> StateRecord:
    """Left-fold apply_step over a root-anchored chain of steps.

    Raises BrokenChain when the steps do not form a connected chain from
    the root, and propagates MissingReadKey from individual steps.
    """
    state = EMPTY_STATE
    expected: str | None = tree.root_id
    for decision_id, condition_key in steps:
        if expected is None:
            raise BrokenChain(
                f"step ({decision_id}, {condition_key}) follows a terminal branch"
            )
        if decision_id != expected:
            raise BrokenChain(
                f"step decision {decision_id!r} is not the child of the previous step "
                f"(expected {expected!r})"
            )
        node = tree.node(decision_id)
        branch = node.branch(condition_key)
        try:
            state = apply_step(state, branch)
        except MissingReadKey as exc:
            raise MissingReadKey(exc.key, decision_id, condition_key) from None
        expected = tree.children.get((decision_id, condition_key))
    return state


def subtree_terminals(tree: "CompiledTree", node: str | Step) -> set[str]:
    """Terminal ids reachable through a decision or through one branch.

    For the root decision this is every terminal in the tree. Accepts a
    decision id or a (decision id, condition key) pair.
    """
    if isinstance(node, str):
        if node not in tree.nodes:
            raise UnknownNode(node)
        positions = [(node, key) for key in tree.node(node).branches]
    else:
        decision_id, condition_key = node
        if decision_id not in tree.nodes or condition_key not in tree.node(decision_id).branches:
            raise UnknownNode(node)
        positions = [(decision_id, condition_key)]

    found: set[str] = set()
    stack = positions
    while stack:
        decision_id, condition_key = stack.pop()
        branch = tree.node(decision_id).branch(condition_key)
        if branch.is_terminal:
            found.add(terminal_id(decision_id, condition_key))
            continue
        child = tree.children.get((decision_id, condition_key))
        if child is not None:
            stack.extend((child, key) for key in tree.node(child).branches)
    return found
