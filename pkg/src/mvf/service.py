"""HTTP JSON API for the navigator UI and CLI.

Sessions are server-held, mutated one request at a time under a per-session
lock, and expire after an idle timeout (default 24 h). Trees are immutable
once loaded; annotation writes go through the store's append-only ledger.
Every session payload carries a revision so clients can drop stale
responses.
"""

from __future__ import annotations

import threading
import time

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from .annotations import RATINGS, aggregate_ratings
from .compiler import compute_stats
from .errors import (
    AtRoot,
    MultiverseError,
    NotOnPath,
    UnknownCondition,
    UnknownSession,
    UnknownTerminal,
    UnknownTree,
)
from .sessions import Session, open_session
from .store import TreeStore

DEFAULT_SESSION_TTL = 24 * 3600.0

_NOT_FOUND = (UnknownTree, UnknownSession, UnknownTerminal, UnknownCondition)
_BAD_REQUEST = (AtRoot, NotOnPath)


class SessionManager:
    def __init__(self, ttl: float = DEFAULT_SESSION_TTL):
        self.ttl = ttl
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, tree_id: str, tree) -> Session:
        session = open_session(tree_id, tree)
        with self._lock:
            self._purge()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSession(session_id)
        return session

    def _purge(self):
        deadline = time.monotonic() - self.ttl
        expired = [sid for sid, s in self._sessions.items() if s.last_access < deadline]
        for sid in expired:
            del self._sessions[sid]


def create_app(
    store: TreeStore | str,
    session_ttl: float = DEFAULT_SESSION_TTL,
    frontend_dir: str | None = None,
) -> FastAPI:
    if not isinstance(store, TreeStore):
        store = TreeStore(store)
    sessions = SessionManager(ttl=session_ttl)
    app = FastAPI(title="multiverse navigator API")

    @app.exception_handler(MultiverseError)
    async def on_engine_error(request: Request, exc: MultiverseError):
        status = 404 if isinstance(exc, _NOT_FOUND) else 400 if isinstance(exc, _BAD_REQUEST) else 422
        return JSONResponse(status_code=status, content={"error": exc.code, "detail": str(exc)})

    def session_view(session: Session) -> dict:
        stored = store.get(session.tree_id)
        view: dict = {
            "session": session.id,
            "tree": session.tree_id,
            "revision": session.revision,
            "mode": "terminal" if session.at_terminal else "decision",
            "breadcrumb": session.breadcrumb(),
            "depth": len(session.steps),
            "accumulated": dict(session.accumulated().entries),
            "filters": {axis: sorted(v) for axis, v in session.filters.items()},
            "decision": None,
            "terminal": None,
        }
        if session.at_terminal:
            tid = session.terminal
            view["terminal"] = {
                "terminal": tid,
                "output": session.tree.terminal_output_text(tid),
                "tags": stored.tag_map().get(tid, {}),
                "rating": stored.ledger.rating(tid),
            }
        else:
            decision_id = session.current_decision
            node = session.tree.node(decision_id)
            view["decision"] = {
                "id": node.id,
                "ambiguity": node.ambiguity,
                "ambiguity_expanded": node.ambiguity_expanded,
                "next_question_rationale": node.next_question_rationale,
                "conditions": [
                    {
                        "key": key,
                        "condition": b.condition,
                        "condition_expanded": b.condition_expanded,
                        "justification": b.justification,
                        "is_terminal": b.is_terminal,
                    }
                    for key, b in node.branches.items()
                ],
            }
        return view

    def outputs_view(session: Session) -> list[dict]:
        stored = store.get(session.tree_id)
        views = session.reachable_outputs(tags=stored.tag_map(), ratings=stored.ledger.entries)
        return [v.to_dict() for v in views]

    # -- trees ---------------------------------------------------------------

    @app.get("/trees")
    def list_trees():
        return {"trees": store.list_trees()}

    @app.get("/trees/{tree_id}")
    def get_tree(tree_id: str):
        stored = store.get(tree_id)
        return Response(content=stored.export_text(), media_type="application/json")

    @app.get("/trees/{tree_id}/stats")
    def get_stats(tree_id: str):
        return compute_stats(store.get(tree_id).tree).to_dict()

    # -- sessions --------------------------------------------------------------

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await request.json()
        tree_id = body.get("tree")
        stored = store.get(tree_id)
        session = sessions.create(tree_id, stored.tree)
        return session_view(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return session_view(sessions.get(session_id))

    @app.post("/sessions/{session_id}/select")
    async def select_condition(session_id: str, request: Request):
        body = await request.json()
        session = sessions.get(session_id)
        with session.lock:
            session.select_condition(body["condition"])
            return session_view(session)

    @app.post("/sessions/{session_id}/back")
    def step_back(session_id: str):
        session = sessions.get(session_id)
        with session.lock:
            session.step_back()
            return session_view(session)

    @app.post("/sessions/{session_id}/jump")
    async def jump(session_id: str, request: Request):
        body = await request.json()
        session = sessions.get(session_id)
        with session.lock:
            session.jump_to(body["decision"])
            return session_view(session)

    @app.post("/sessions/{session_id}/goto")
    async def goto(session_id: str, request: Request):
        body = await request.json()
        session = sessions.get(session_id)
        with session.lock:
            session.goto_output(body["terminal"])
            return session_view(session)

    @app.put("/sessions/{session_id}/filters")
    async def set_filters(session_id: str, request: Request):
        body = await request.json()
        session = sessions.get(session_id)
        with session.lock:
            session.set_filters(body.get("filters", {}))
            return session_view(session)

    @app.get("/sessions/{session_id}/outputs")
    def session_outputs(session_id: str):
        session = sessions.get(session_id)
        with session.lock:
            return {"revision": session.revision, "outputs": outputs_view(session)}

    # -- annotations -------------------------------------------------------------

    @app.put("/annotations/{tree_id}/{terminal}")
    async def put_rating(tree_id: str, terminal: str, request: Request):
        body = await request.json()
        rating = body.get("rating")
        if rating not in RATINGS:
            return JSONResponse(
                status_code=422,
                content={"error": "invalid_rating", "detail": f"rating must be one of {list(RATINGS)}"},
            )
        stored = store.get(tree_id)
        stored.ledger.set_rating(terminal, rating)
        return {"terminal": terminal, "rating": rating, "revision": stored.ledger.revision}

    @app.get("/annotations/{tree_id}/summary")
    def rating_summary(tree_id: str):
        stored = store.get(tree_id)
        revision, _ = stored.ledger.snapshot()
        summaries = aggregate_ratings(stored.tree, stored.ledger)
        return {
            "revision": revision,
            "nodes": {node_id: s.to_dict() for node_id, s in summaries.items()},
        }

    # -- reports -----------------------------------------------------------------

    @app.get("/reports/{tree_id}")
    def get_reports(tree_id: str):
        return {"rounds": store.get(tree_id).reports()}

    if frontend_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # Mounted last so API routes take precedence over static paths.
        app.mount("/", StaticFiles(directory=frontend_dir, html=True), name="frontend")

    return app
