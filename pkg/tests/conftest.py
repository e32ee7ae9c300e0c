from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for randgen / helpers

from mvf.compiler import compile_text

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def free_will_text() -> str:
    return (FIXTURES / "free_will.mv.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def free_will_tree(free_will_text):
    return compile_text(free_will_text)


@pytest.fixture(scope="session")
def defect_manifest() -> list[dict]:
    return json.loads((FIXTURES / "defects" / "manifest.json").read_text(encoding="utf-8"))
