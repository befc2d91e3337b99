"""HTTP service exposing the four-step retrieval protocol.

Sessions move forward through created -> expanded -> selected -> retrieved;
editing the query resets a session to created. Illegal transitions yield
409 and never mutate the session. Errors use a uniform
{code, message, details} envelope.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .engine import (
    Expansion,
    GraphQuery,
    QueryError,
    ValidationError,
    apply_selections,
    find_paths,
    retrieve,
    select_path,
    validate_query,
)
from .network import pair_key
from .pipeline import Artifacts

DEFAULT_SESSION_TTL = 24 * 3600.0


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.details = details or {}


@dataclass
class QuerySession:
    session_id: str
    query: GraphQuery
    state: str = "created"
    expansions: list[Expansion] = field(default_factory=list)
    results: list[dict] = field(default_factory=list)
    created_at: float = field(default_factory=time.time)
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, ttl: float = DEFAULT_SESSION_TTL):
        self.ttl = ttl
        self._sessions: dict[str, QuerySession] = {}
        self._lock = threading.Lock()

    def create(self, query: GraphQuery) -> QuerySession:
        session = QuerySession(session_id=uuid.uuid4().hex, query=query)
        with self._lock:
            self._purge()
            self._sessions[session.session_id] = session
        return session

    def get(self, session_id: str) -> QuerySession:
        with self._lock:
            self._purge()
            session = self._sessions.get(session_id)
        if session is None:
            raise ApiError(404, "unknown_session", f"unknown session {session_id!r}")
        return session

    def _purge(self) -> None:
        now = time.time()
        expired = [sid for sid, s in self._sessions.items() if now - s.created_at > self.ttl]
        for sid in expired:
            del self._sessions[sid]


def _parse_query_body(body: dict) -> GraphQuery:
    try:
        return GraphQuery.from_json(body)
    except (KeyError, TypeError, ValueError) as exc:
        raise ApiError(400, "malformed_query", f"malformed query body: {exc}")


def _parse_selections(body: dict) -> dict:
    selections = {}
    for key, idx in (body.get("selections") or body or {}).items():
        if key == "selections":
            continue
        a, sep, b = key.partition("|")
        if not sep:
            raise ApiError(422, "bad_selection", f"selection key must be 'a|b', got {key!r}")
        try:
            selections[pair_key(a, b)] = int(idx)
        except (TypeError, ValueError) as exc:
            raise ApiError(422, "bad_selection", f"bad selection for {key!r}: {exc}")
    return selections


def create_app(artifacts: Artifacts, session_ttl: float = DEFAULT_SESSION_TTL, top_k: int = 10) -> FastAPI:
    app = FastAPI(title="coocsearch", version="0.1.0")
    store = SessionStore(session_ttl)
    net = artifacts.net
    pubs = artifacts.publications

    @app.exception_handler(ApiError)
    async def api_error_handler(_req: Request, exc: ApiError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "details": exc.details},
        )

    async def read_json(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            body = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ApiError(400, "malformed_body", f"body is not valid JSON: {exc}")
        if not isinstance(body, dict):
            raise ApiError(400, "malformed_body", "body must be a JSON object")
        return body

    def validated_query(body: dict) -> GraphQuery:
        query = _parse_query_body(body)
        try:
            validate_query(query, net)
        except ValidationError as exc:
            raise ApiError(422, "invalid_query", str(exc), exc.details)
        return query

    @app.get("/healthz")
    async def healthz():
        return {"status": "ok", "n_entities": len(net.entities), "n_edges": len(net.edges), "n_docs": net.n_docs}

    @app.post("/sessions", status_code=201)
    async def create_session(request: Request):
        body = await read_json(request)
        query = validated_query(body)
        session = store.create(query)
        return {"session_id": session.session_id, "state": session.state, "query": query.to_json()}

    @app.put("/sessions/{session_id}")
    async def edit_session(session_id: str, request: Request):
        body = await read_json(request)
        query = validated_query(body)
        session = store.get(session_id)
        with session.lock:
            session.query = query
            session.state = "created"
            session.expansions = []
            session.results = []
        return {"session_id": session.session_id, "state": session.state, "query": query.to_json()}

    @app.post("/sessions/{session_id}/expand")
    async def expand(session_id: str):
        session = store.get(session_id)
        with session.lock:
            if session.state not in ("created", "expanded"):
                raise ApiError(409, "wrong_state", f"cannot expand in state {session.state!r}")
            if session.state == "created":
                session.expansions = find_paths(session.query, net, top_k)
                session.state = "expanded"
            return {
                "session_id": session.session_id,
                "state": session.state,
                "expansions": [e.to_json() for e in session.expansions],
            }

    @app.post("/sessions/{session_id}/select")
    async def select(session_id: str, request: Request):
        body = await read_json(request)
        selections = _parse_selections(body)
        session = store.get(session_id)
        with session.lock:
            if session.state not in ("expanded", "selected"):
                raise ApiError(409, "wrong_state", f"cannot select in state {session.state!r}")
            previous = [e.selected for e in session.expansions]
            try:
                for exp in session.expansions:
                    exp.selected = None
                apply_selections(session.expansions, selections)
            except QueryError as exc:
                for exp, sel in zip(session.expansions, previous):
                    exp.selected = sel
                raise ApiError(422, "bad_selection", str(exc))
            session.state = "selected"
            session.results = []
            return {
                "session_id": session.session_id,
                "state": session.state,
                "selections": {"|".join(e.rel): e.selected for e in session.expansions if e.selected is not None},
            }

    @app.get("/sessions/{session_id}/results")
    async def results(
        session_id: str,
        sort: str = "score",
        filter: str = "",
        offset: int = 0,
        limit: int = 50,
    ):
        session = store.get(session_id)
        with session.lock:
            if session.state not in ("selected", "retrieved"):
                raise ApiError(409, "wrong_state", f"cannot fetch results in state {session.state!r}")
            if not session.results:
                ranked = retrieve(session.expansions, artifacts.inverted, pubs)
                session.results = [r.to_json() for r in ranked]
                session.state = "retrieved"
            rows = session.results
        if sort == "citations":
            rows = sorted(rows, key=lambda r: (-(r["num_cited_by"] or 0), r["pub_id"]))
        elif sort == "date":
            rows = sorted(rows, key=lambda r: (r["publish_date"], r["pub_id"]), reverse=True)
        elif sort != "score":
            raise ApiError(422, "bad_sort", f"unknown sort {sort!r}; use score, citations or date")
        if filter:
            needle = filter.lower()
            rows = [r for r in rows if needle in (r["title"] or "").lower() or needle in (r["journal"] or "").lower()]
        total = len(rows)
        page = rows[max(offset, 0) : max(offset, 0) + max(limit, 0)]
        return {"session_id": session_id, "state": "retrieved", "total": total, "offset": offset, "results": page}

    @app.get("/concepts")
    async def concepts(prefix: str = "", category: str = "", type: str = "", offset: int = 0, limit: int = 50):
        needle = prefix.lower()
        rows = []
        for cid in sorted(net.entities):
            ent = net.entities[cid]
            if category and ent.macrocategory != category:
                continue
            if type and ent.semantic_type != type:
                continue
            if needle and not (
                ent.name.lower().startswith(needle) or any(s.lower().startswith(needle) for s in ent.synonyms)
            ):
                continue
            rows.append(
                {
                    "concept_id": ent.concept_id,
                    "name": ent.name,
                    "synonyms": list(ent.synonyms),
                    "source": ent.source,
                    "semantic_type": ent.semantic_type,
                    "macrocategory": ent.macrocategory,
                    "frequency": ent.frequency,
                }
            )
        total = len(rows)
        return {"total": total, "offset": offset, "results": rows[max(offset, 0) : max(offset, 0) + max(limit, 0)]}

    return app
