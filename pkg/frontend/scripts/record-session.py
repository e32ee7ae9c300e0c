"""Record a real API session against the worked-example tree.

Regenerates tests/fixtures/recorded-session.json, the payload corpus the
frontend tests replay. Run from the repository root after changing the
server or the fixture document:

    python3 frontend/scripts/record-session.py
"""

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "src"))

from mvf.compiler import compile_text  # noqa: E402
from mvf.config import load_axes  # noqa: E402
from mvf.judge import MockJudge  # noqa: E402
from mvf.service import create_app  # noqa: E402
from mvf.store import TreeStore  # noqa: E402
from mvf.tagging import TagStore, bootstrap_tags  # noqa: E402

OUT = REPO / "frontend" / "tests" / "fixtures" / "recorded-session.json"

RATINGS = {
    "d3_veridical.ultimate_origination": "approve",
    "d3_veridical.open_future": "approve",
    "d4_destroyed.transformative_no": "neutral",
    "d4_destroyed.nihilistic_no": "reject",
    "d4_compat.yes_compat": "approve",
    "d3_science.hard_determinist": "reject",
    "d2_practical.practices_self_standing": "approve",
}


def main() -> None:
    doc_text = (REPO / "tests" / "fixtures" / "free_will.mv.json").read_text(encoding="utf-8")
    tree = compile_text(doc_text)

    with tempfile.TemporaryDirectory() as tmp:
        tree_dir = Path(tmp) / "free_will"
        tree_dir.mkdir()
        (tree_dir / "doc.mv.json").write_text(doc_text, encoding="utf-8")
        terminals = {tid: tree.terminal_output_text(tid) for tid in tree.terminal_index}
        axes, assignments = bootstrap_tags(terminals, load_axes("philosophy"), MockJudge(seed=5))
        tags = TagStore(axes=axes, assignments={a.terminal_id: a.tags for a in assignments})
        (tree_dir / "tags.json").write_text(json.dumps(tags.to_dict()), encoding="utf-8")

        client = TestClient(create_app(TreeStore(tmp)))
        recording: dict = {}

        recording["tree"] = client.get("/trees/free_will").json()
        recording["stats"] = client.get("/trees/free_will/stats").json()

        root_view = client.post("/sessions", json={"tree": "free_will"}).json()
        sid = root_view["session"]
        recording["root_view"] = root_view
        recording["outputs_at_root"] = client.get(f"/sessions/{sid}/outputs").json()

        recording["after_experience"] = client.post(
            f"/sessions/{sid}/select", json={"condition": "experience"}
        ).json()
        recording["outputs_after_experience"] = client.get(f"/sessions/{sid}/outputs").json()
        recording["after_veridical"] = client.post(
            f"/sessions/{sid}/select", json={"condition": "veridical"}
        ).json()
        recording["terminal_view"] = client.post(
            f"/sessions/{sid}/select", json={"condition": "ultimate_origination"}
        ).json()
        recording["after_back"] = client.post(f"/sessions/{sid}/back").json()

        filters = {"method": sorted({t["method"] for t in tags.assignments.values()})[:2]}
        client.post(f"/sessions/{sid}/jump", json={"decision": "d1"})
        client.put(f"/sessions/{sid}/filters", json={"filters": filters})
        recording["filters_used"] = filters
        recording["outputs_filtered"] = client.get(f"/sessions/{sid}/outputs").json()

        for terminal, rating in RATINGS.items():
            client.put(f"/annotations/free_will/{terminal}", json={"rating": rating})
        recording["ratings_put"] = RATINGS
        recording["summary"] = client.get("/annotations/free_will/summary").json()

    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps(recording, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")


if __name__ == "__main__":
    main()
