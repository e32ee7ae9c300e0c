"""File-backed tree store.

Layout, one directory per tree::

    store/<tree-id>/
      doc.mv.json          # source document (required)
      tree.tree.json       # compiled export, written on first load
      tags.json            # axis vocabularies + assignments (optional)
      annotations.jsonl    # append-only rating ledger
      round-*.report.json  # verification reports (optional)

Trees compile once on first access and are cached; documents are treated as
immutable while the store is open.
"""

from __future__ import annotations

import json
import re
import threading
from pathlib import Path

from .annotations import AnnotationLedger
from .compiler import CompiledTree, compile_text, export_tree
from .errors import UnknownTree
from .tagging import TagStore

DOC_NAME = "doc.mv.json"
TREE_NAME = "tree.tree.json"
TAGS_NAME = "tags.json"
ANNOTATIONS_NAME = "annotations.jsonl"
_ROUND_RE = re.compile(r"^round-(\d+)\.report\.json$")


class StoredTree:
    def __init__(self, tree_id: str, directory: Path):
        self.id = tree_id
        self.directory = directory
        self.tree: CompiledTree = compile_text((directory / DOC_NAME).read_text(encoding="utf-8"))
        export_path = directory / TREE_NAME
        if not export_path.exists():
            export_path.write_text(export_tree(self.tree), encoding="utf-8")
        self.ledger = AnnotationLedger.for_tree(self.tree, directory / ANNOTATIONS_NAME)

    @property
    def tags(self) -> TagStore | None:
        path = self.directory / TAGS_NAME
        if not path.exists():
            return None
        return TagStore.from_dict(json.loads(path.read_text(encoding="utf-8")))

    def tag_map(self) -> dict[str, dict[str, str]]:
        store = self.tags
        return store.assignments if store else {}

    def export_text(self) -> str:
        return (self.directory / TREE_NAME).read_text(encoding="utf-8")

    def reports(self) -> list[dict]:
        found = []
        for path in self.directory.iterdir():
            match = _ROUND_RE.match(path.name)
            if match:
                found.append((int(match.group(1)), path))
        found.sort()
        return [
            {"round": number, "report": json.loads(path.read_text(encoding="utf-8"))}
            for number, path in found
        ]


class TreeStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._cache: dict[str, StoredTree] = {}
        self._lock = threading.Lock()

    def list_trees(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if p.is_dir() and (p / DOC_NAME).exists()
        )

    def get(self, tree_id: str) -> StoredTree:
        with self._lock:
            if tree_id in self._cache:
                return self._cache[tree_id]
            directory = self.root / tree_id
            if not (directory / DOC_NAME).exists():
                raise UnknownTree(tree_id)
            stored = StoredTree(tree_id, directory)
            self._cache[tree_id] = stored
            return stored

    def add_tree(self, tree_id: str, document_text: str) -> StoredTree:
        """Import a document (validated by compiling it) into the store."""
        compile_text(document_text)  # raise before writing anything
        directory = self.root / tree_id
        directory.mkdir(parents=True, exist_ok=True)
        (directory / DOC_NAME).write_text(document_text, encoding="utf-8")
        with self._lock:
            self._cache.pop(tree_id, None)
        return self.get(tree_id)
