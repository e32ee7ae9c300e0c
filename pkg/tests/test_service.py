import json

import pytest
from fastapi.testclient import TestClient

from mvf.annotations import aggregate_ratings
from mvf.compiler import compile_text, compute_stats
from mvf.config import load_axes
from mvf.judge import MockJudge
from mvf.service import create_app
from mvf.store import TreeStore
from mvf.tagging import TagStore, bootstrap_tags

from test_model import VERIDICAL_STATE


@pytest.fixture()
def store(tmp_path, free_will_text, free_will_tree):
    tree_dir = tmp_path / "store" / "free_will"
    tree_dir.mkdir(parents=True)
    (tree_dir / "doc.mv.json").write_text(free_will_text, encoding="utf-8")

    terminals = {tid: free_will_tree.terminal_output_text(tid) for tid in free_will_tree.terminal_index}
    axes, assignments = bootstrap_tags(terminals, load_axes("philosophy"), MockJudge(seed=5))
    tags = TagStore(axes=axes, assignments={a.terminal_id: a.tags for a in assignments})
    (tree_dir / "tags.json").write_text(json.dumps(tags.to_dict()), encoding="utf-8")

    (tree_dir / "round-1.report.json").write_text(
        json.dumps({"round": 1, "checks": [], "decisions": []}), encoding="utf-8"
    )
    return TreeStore(tmp_path / "store")


@pytest.fixture()
def client(store):
    return TestClient(create_app(store))


def open_session(client):
    response = client.post("/sessions", json={"tree": "free_will"})
    assert response.status_code == 201
    return response.json()


class TestTrees:
    def test_list(self, client):
        assert client.get("/trees").json() == {"trees": ["free_will"]}

    def test_compiled_tree_round_trips(self, client, free_will_tree):
        response = client.get("/trees/free_will")
        assert response.status_code == 200
        assert compile_text(response.text) == free_will_tree

    def test_stats_matches_library(self, client, free_will_tree):
        assert client.get("/trees/free_will/stats").json() == compute_stats(free_will_tree).to_dict()

    def test_unknown_tree_404(self, client):
        response = client.get("/trees/nope")
        assert response.status_code == 404
        assert response.json()["error"] == "unknown_tree"


class TestSessions:
    def test_open_at_root(self, client):
        view = open_session(client)
        assert view["mode"] == "decision"
        assert view["decision"]["id"] == "d1"
        assert [c["key"] for c in view["decision"]["conditions"]] == [
            "experience",
            "science",
            "practical",
            "conceptual",
            "spiritual",
        ]
        assert view["breadcrumb"] == [] and view["accumulated"] == {}

    def test_select_path_accumulates_state(self, client):
        view = open_session(client)
        sid = view["session"]
        client.post(f"/sessions/{sid}/select", json={"condition": "experience"})
        view = client.post(f"/sessions/{sid}/select", json={"condition": "veridical"}).json()
        assert view["accumulated"] == VERIDICAL_STATE
        assert view["depth"] == 2

    def test_select_terminal_shows_output_and_tags(self, client, store):
        sid = open_session(client)["session"]
        client.post(f"/sessions/{sid}/select", json={"condition": "science"})
        view = client.post(f"/sessions/{sid}/select", json={"condition": "indeterministic"}).json()
        assert view["mode"] == "terminal"
        terminal = view["terminal"]
        assert terminal["terminal"] == "d2_science.indeterministic"
        assert terminal["output"].startswith("The scientific verdict is")
        assert set(terminal["tags"]) == {"position", "method", "move"}

    def test_unknown_condition_404_and_unchanged(self, client):
        sid = open_session(client)["session"]
        response = client.post(f"/sessions/{sid}/select", json={"condition": "wormhole"})
        assert response.status_code == 404
        assert client.get(f"/sessions/{sid}").json()["depth"] == 0

    def test_back_and_jump(self, client):
        sid = open_session(client)["session"]
        client.post(f"/sessions/{sid}/select", json={"condition": "experience"})
        client.post(f"/sessions/{sid}/select", json={"condition": "artifact"})
        view = client.post(f"/sessions/{sid}/back").json()
        assert view["depth"] == 1
        view = client.post(f"/sessions/{sid}/jump", json={"decision": "d1"}).json()
        assert view["depth"] == 0 and view["accumulated"] == {}

    def test_back_at_root_400(self, client):
        sid = open_session(client)["session"]
        response = client.post(f"/sessions/{sid}/back")
        assert response.status_code == 400
        assert response.json()["error"] == "at_root"

    def test_goto_builds_breadcrumb(self, client):
        sid = open_session(client)["session"]
        view = client.post(f"/sessions/{sid}/goto", json={"terminal": "d4_compat.yes_compat"}).json()
        assert view["mode"] == "terminal"
        assert [c["index"] for c in view["breadcrumb"]] == [1, 2, 3, 4]

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/феdeadbeef").status_code == 404
        assert client.get("/sessions/deadbeef").status_code == 404

    def test_outputs_and_filters(self, client, store):
        sid = open_session(client)["session"]
        outputs = client.get(f"/sessions/{sid}/outputs").json()["outputs"]
        assert len(outputs) == 15  # no filters at root: every terminal

        tags = store.get("free_will").tag_map()
        some_method = tags["d4_compat.yes_compat"]["method"]
        client.put(f"/sessions/{sid}/filters", json={"filters": {"method": [some_method]}})
        filtered = client.get(f"/sessions/{sid}/outputs").json()["outputs"]
        expected = {tid for tid, t in tags.items() if t["method"] == some_method}
        assert {o["terminal"] for o in filtered} == expected

    def test_session_expiry(self, store):
        client = TestClient(create_app(store, session_ttl=0.0))
        sid = open_session(client)["session"]
        assert client.get(f"/sessions/{sid}").status_code == 404


class TestAnnotations:
    def test_put_rating_and_summary_match_engine(self, client, store, free_will_tree):
        response = client.put(
            "/annotations/free_will/d4_compat.yes_compat", json={"rating": "approve"}
        )
        assert response.status_code == 200
        client.put("/annotations/free_will/d3_veridical.open_future", json={"rating": "reject"})

        payload = client.get("/annotations/free_will/summary").json()
        stored = store.get("free_will")
        assert payload["revision"] == stored.ledger.revision
        engine = aggregate_ratings(free_will_tree, stored.ledger)
        assert set(payload["nodes"]) == set(engine)
        for node_id, summary in engine.items():
            assert payload["nodes"][node_id]["counts"] == summary.counts
            assert payload["nodes"][node_id]["fractions"] == pytest.approx(summary.fractions)

    def test_rating_survives_restart(self, store, tmp_path):
        client = TestClient(create_app(store))
        client.put("/annotations/free_will/d4_compat.yes_compat", json={"rating": "neutral"})
        fresh_store = TreeStore(store.root)
        fresh_client = TestClient(create_app(fresh_store))
        summary = fresh_client.get("/annotations/free_will/summary").json()
        assert summary["nodes"]["d4_compat.yes_compat"]["counts"]["neutral"] == 1

    def test_invalid_rating_422(self, client):
        response = client.put(
            "/annotations/free_will/d4_compat.yes_compat", json={"rating": "meh"}
        )
        assert response.status_code == 422

    def test_unknown_terminal_404(self, client):
        response = client.put("/annotations/free_will/d1", json={"rating": "approve"})
        assert response.status_code == 404

    def test_view_shows_rating_after_annotation(self, client):
        client.put("/annotations/free_will/d2_science.indeterministic", json={"rating": "approve"})
        sid = open_session(client)["session"]
        view = client.post(
            f"/sessions/{sid}/goto", json={"terminal": "d2_science.indeterministic"}
        ).json()
        assert view["terminal"]["rating"] == "approve"


class TestReports:
    def test_round_files_served(self, client):
        payload = client.get("/reports/free_will").json()
        assert payload["rounds"][0]["round"] == 1
        assert payload["rounds"][0]["report"]["round"] == 1
