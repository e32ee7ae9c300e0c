"""User ratings over terminal outputs, aggregated into per-node proportions.

The ledger is append-only with latest-wins reads: every write is one JSON
line {terminal, rating, ts}, so history survives re-rating. Aggregation is
a pure function of (tree, ledger snapshot); the unrated remainder is
reported as a fourth category so either normalization can be rendered.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass
from pathlib import Path

from .compiler import CompiledTree
from .errors import UnknownTerminal
from .model import terminal_id

RATINGS = ("approve", "neutral", "reject")
CATEGORIES = RATINGS + ("unrated",)


@dataclass(frozen=True)
class NodeRatingSummary:
    node_id: str
    counts: dict[str, int]
    total: int

    @property
    def fractions(self) -> dict[str, float]:
        if self.total == 0:
            return {c: 0.0 for c in CATEGORIES}
        return {c: self.counts[c] / self.total for c in CATEGORIES}

    def to_dict(self) -> dict:
        return {
            "node": self.node_id,
            "counts": dict(self.counts),
            "total": self.total,
            "fractions": self.fractions,
        }


class AnnotationLedger:
    """Latest-wins ratings over a tree's terminals, optionally file-backed.

    Writes are serialized under a lock; the revision counts every write
    event ever appended (including overwrites), so readers can detect
    staleness cheaply.
    """

    def __init__(self, valid_terminals: set[str], path: str | Path | None = None):
        self.valid_terminals = set(valid_terminals)
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, str] = {}
        self.timestamps: dict[str, float] = {}
        self.revision = 0
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._replay()

    @classmethod
    def for_tree(cls, tree: CompiledTree, path: str | Path | None = None) -> "AnnotationLedger":
        return cls(set(tree.terminal_index), path)

    def _replay(self):
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            record = json.loads(line)
            self.entries[record["terminal"]] = record["rating"]
            self.timestamps[record["terminal"]] = record["ts"]
            self.revision += 1

    def set_rating(self, terminal: str, rating: str) -> "AnnotationLedger":
        if terminal not in self.valid_terminals:
            raise UnknownTerminal(terminal)
        if rating not in RATINGS:
            raise ValueError(f"rating must be one of {RATINGS}, got {rating!r}")
        with self._lock:
            ts = time.time()
            record = {"terminal": terminal, "rating": rating, "ts": ts}
            if self.path is not None:
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            self.entries[terminal] = rating
            self.timestamps[terminal] = ts
            self.revision += 1
        return self

    def rating(self, terminal: str) -> str | None:
        return self.entries.get(terminal)

    def snapshot(self) -> tuple[int, dict[str, str]]:
        with self._lock:
            return self.revision, dict(self.entries)


def set_rating(ledger: AnnotationLedger, terminal: str, rating: str) -> AnnotationLedger:
    return ledger.set_rating(terminal, rating)


def aggregate_ratings(tree: CompiledTree, ledger: AnnotationLedger) -> dict[str, NodeRatingSummary]:
    """Per-node rating counts over downstream terminals.

    Keys cover every decision id and every branch id (``decision.condition``);
    a terminal branch's summary counts only itself. Computed bottom-up in one
    pass; parents are exactly the sums of their branches.
    """
    _, entries = ledger.snapshot()
    summaries: dict[str, NodeRatingSummary] = {}
    decision_counts: dict[str, dict[str, int]] = {}

    for decision_id in reversed(tree.canonical_order()):
        node = tree.node(decision_id)
        totals = {c: 0 for c in CATEGORIES}
        for key, branch in node.branches.items():
            bid = terminal_id(decision_id, key)
            if branch.is_terminal:
                counts = {c: 0 for c in CATEGORIES}
                counts[entries.get(bid, "unrated")] = 1
            else:
                counts = dict(decision_counts[tree.children[(decision_id, key)]])
            summaries[bid] = NodeRatingSummary(bid, counts, sum(counts.values()))
            for c in CATEGORIES:
                totals[c] += counts[c]
        decision_counts[decision_id] = totals
        summaries[decision_id] = NodeRatingSummary(decision_id, totals, sum(totals.values()))
    return summaries
