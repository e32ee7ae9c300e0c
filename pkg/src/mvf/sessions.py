"""Interactive navigation sessions over a compiled tree.

A session is a cursor: the steps taken from the root, a history stack for
step_back, and the active tag filters. The accumulated state is always
recomputable by folding the steps, and every mutation bumps the revision so
clients can drop stale responses. One lock per session serializes mutations;
the tree itself is immutable and shared.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field

from .compiler import CompiledTree
from .errors import AtRoot, NotOnPath, UnknownTerminal
from .model import PathCursor, Step, StateRecord, fold_path, subtree_terminals, terminal_id


@dataclass
class OutputView:
    terminal_id: str
    output: str
    tags: dict[str, str]
    steps: list[Step]
    rating: str | None

    def to_dict(self) -> dict:
        return {
            "terminal": self.terminal_id,
            "output": self.output,
            "tags": dict(self.tags),
            "steps": [[d, c] for d, c in self.steps],
            "rating": self.rating,
        }


@dataclass
class Session:
    id: str
    tree_id: str
    tree: CompiledTree
    steps: list[Step] = field(default_factory=list)
    history: list[list[Step]] = field(default_factory=list)
    filters: dict[str, set[str]] = field(default_factory=dict)
    revision: int = 0
    last_access: float = field(default_factory=time.monotonic)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    # -- cursor geometry ---------------------------------------------------

    @property
    def at_terminal(self) -> bool:
        if not self.steps:
            return False
        decision_id, key = self.steps[-1]
        return self.tree.node(decision_id).branch(key).is_terminal

    @property
    def current_decision(self) -> str | None:
        """Decision the cursor is asking; None in terminal view."""
        if not self.steps:
            return self.tree.root_id
        if self.at_terminal:
            return None
        return self.tree.children[self.steps[-1]]

    @property
    def terminal(self) -> str | None:
        if not self.at_terminal:
            return None
        decision_id, key = self.steps[-1]
        return terminal_id(decision_id, key)

    def cursor(self) -> PathCursor:
        return PathCursor(steps=tuple(self.steps), accumulated=self.accumulated())

    def accumulated(self) -> StateRecord:
        return fold_path(self.tree, self.steps)

    def breadcrumb(self) -> list[dict]:
        crumbs = []
        for i, (decision_id, key) in enumerate(self.steps, start=1):
            node = self.tree.node(decision_id)
            crumbs.append(
                {
                    "index": i,
                    "decision": decision_id,
                    "question": node.ambiguity,
                    "condition": key,
                    "condition_text": node.branch(key).condition,
                }
            )
        return crumbs

    # -- mutations (callers hold the lock via SessionManager) ---------------

    def _touch(self):
        self.revision += 1
        self.last_access = time.monotonic()

    def select_condition(self, key: str) -> "Session":
        decision_id = self.current_decision
        if decision_id is None:
            raise NotOnPath(key)  # terminal view offers no conditions
        self.tree.node(decision_id).branch(key)  # raises UnknownCondition
        self.history.append(list(self.steps))
        self.steps.append((decision_id, key))
        self._touch()
        return self

    def step_back(self) -> "Session":
        if not self.history:
            raise AtRoot()
        self.steps = self.history.pop()
        self._touch()
        return self

    def jump_to(self, decision_id: str) -> "Session":
        on_path = [d for d, _ in self.steps]
        if self.current_decision is not None:
            on_path.append(self.current_decision)
        if decision_id not in on_path:
            raise NotOnPath(decision_id)
        self.history.append(list(self.steps))
        kept: list[Step] = []
        for step in self.steps:
            if step[0] == decision_id:
                break
            kept.append(step)
        self.steps = kept
        self._touch()
        return self

    def goto_output(self, tid: str) -> "Session":
        if tid not in self.tree.terminal_index:
            raise UnknownTerminal(tid)
        self.history.append(list(self.steps))
        self.steps = list(self.tree.terminal_index[tid])
        self._touch()
        return self

    def set_filters(self, filters: dict[str, list[str]]) -> "Session":
        self.filters = {axis: set(values) for axis, values in filters.items() if values}
        self._touch()
        return self

    # -- queries -------------------------------------------------------------

    def reachable_terminal_ids(self) -> set[str]:
        if self.at_terminal:
            return {self.terminal}
        return subtree_terminals(self.tree, self.current_decision)

    def reachable_outputs(
        self,
        tags: dict[str, dict[str, str]] | None = None,
        ratings: dict[str, str] | None = None,
    ) -> list[OutputView]:
        """Downstream outputs under the cursor, filtered by active tags.

        Filter semantics: conjunction across axes, disjunction within an
        axis; a terminal lacking a filtered axis does not match.
        """
        tags = tags or {}
        ratings = ratings or {}
        rank = {tid: i for i, tid in enumerate(self.tree.terminal_index)}
        views = []
        for tid in sorted(self.reachable_terminal_ids(), key=rank.get):
            terminal_tags = tags.get(tid, {})
            if not _matches(terminal_tags, self.filters):
                continue
            views.append(
                OutputView(
                    terminal_id=tid,
                    output=self.tree.terminal_output_text(tid),
                    tags=terminal_tags,
                    steps=list(self.tree.terminal_index[tid]),
                    rating=ratings.get(tid),
                )
            )
        return views

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "tree": self.tree_id,
            "steps": [[d, c] for d, c in self.steps],
            "history": [[[d, c] for d, c in snapshot] for snapshot in self.history],
            "filters": {axis: sorted(values) for axis, values in self.filters.items()},
            "revision": self.revision,
        }

    @classmethod
    def from_dict(cls, raw: dict, tree: CompiledTree) -> "Session":
        return cls(
            id=raw["id"],
            tree_id=raw["tree"],
            tree=tree,
            steps=[(d, c) for d, c in raw["steps"]],
            history=[[(d, c) for d, c in snap] for snap in raw["history"]],
            filters={axis: set(values) for axis, values in raw["filters"].items()},
            revision=raw["revision"],
        )


def _matches(terminal_tags: dict[str, str], filters: dict[str, set[str]]) -> bool:
    for axis, allowed in filters.items():
        if terminal_tags.get(axis) not in allowed:
            return False
    return True


def open_session(tree_id: str, tree: CompiledTree) -> Session:
    """Fresh session at the root decision: no steps, no history, no filters."""
    return Session(id=uuid.uuid4().hex, tree_id=tree_id, tree=tree)
