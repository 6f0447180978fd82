"""HTTP API over the engine: recipes, stock, planning, sessions, and reports.

All state is in memory. Engine calls are pure; recipes sit behind a lock
and each session has its own lock so concurrent choose calls serialize.
Response bodies for /plan, /variants, and /sessions are built by the view
functions below, so service output is byte-identical to direct library
calls.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from . import ingestion
from .model import (
    PARSE,
    DemandVector,
    EngineConfig,
    InvalidOption,
    Issue,
    LimitExceeded,
    RecipeMatrix,
    SessionFinishedError,
    SessionNotFound,
    StockState,
    StockVector,
    ValidationError,
    json_number,
    validate_recipes,
)
from .optimizer import (
    PlanOutcome,
    Session,
    _choices_from_caps,
    open_session,
    plan,
    session_choose,
    session_totals,
)
from .reporting import enumerate_variants, export_variants, render_step_report

DEFAULT_SESSION_TTL = 24 * 3600.0
DEFAULT_MAX_SESSIONS = 1000


def recipes_view(recipes: RecipeMatrix) -> dict:
    return {
        "products": list(recipes.product_names),
        "components": list(recipes.component_names),
        "weights": [[json_number(v) for v in row] for row in recipes.weights],
    }


def stock_view(stock: StockVector) -> dict:
    return {
        "quantities": [json_number(v) for v in stock.quantities],
        "as_of": json_number(stock.as_of) if stock.as_of is not None else None,
    }


def shortfall_view(state: StockState) -> dict:
    return {
        "feasible": False,
        "used": [json_number(v) for v in state.used],
        "required": [json_number(v) for v in state.required],
    }


def _choices_json(recipes: RecipeMatrix, choices) -> list[dict]:
    return [
        {"option": c.option_number, "product": recipes.product_names[c.product], "quantity": c.quantity}
        for c in choices
    ]


def plan_view(recipes: RecipeMatrix, outcome: PlanOutcome) -> dict:
    if not outcome.feasible:
        return shortfall_view(outcome.shortfall)
    tree = outcome.tree
    return {
        "feasible": True,
        "requirements": [[json_number(v) for v in row] for row in tree.requirements.values],
        "remaining": [json_number(v) for v in tree.state.remaining],
        "root_choices": _choices_json(recipes, _choices_from_caps(tree.root.caps)),
    }


def variants_view(recipes: RecipeMatrix, variants) -> dict:
    return {
        "variants": [
            {
                "totals": [json_number(v) for v in variant.totals],
                "path": [[int(p), int(q)] for p, q in variant.path],
            }
            for variant in variants
        ]
    }


def session_view(session: Session) -> dict:
    return {
        "id": session.id,
        "step": session.step,
        "totals": [json_number(v) for v in session_totals(session)],
        "remaining": [json_number(v) for v in session.remaining],
        "choices": _choices_json(session.recipes, session.choices),
        "finished": session.finished,
    }


@dataclass
class _Entry:
    session: Session
    lock: threading.Lock
    created_at: float
    last_used: float


class SessionStore:
    """In-memory session map with idle TTL and a max-session cap."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL, max_sessions: int = DEFAULT_MAX_SESSIONS):
        self.ttl = ttl
        self.max_sessions = max_sessions
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def _sweep(self, now: float) -> None:
        expired = [sid for sid, e in self._entries.items() if now - e.last_used > self.ttl]
        for sid in expired:
            del self._entries[sid]
        while len(self._entries) > self.max_sessions:
            oldest = min(self._entries, key=lambda sid: self._entries[sid].last_used)
            del self._entries[oldest]

    def add(self, session: Session) -> None:
        now = time.time()
        with self._lock:
            self._entries[session.id] = _Entry(session, threading.Lock(), now, now)
            self._sweep(now)

    def acquire(self, session_id: str) -> tuple[Session, threading.Lock]:
        now = time.time()
        with self._lock:
            self._sweep(now)
            entry = self._entries.get(session_id)
            if entry is None:
                raise SessionNotFound(f"session {session_id} not found")
            entry.last_used = now
            return entry.session, entry.lock


@dataclass
class ServiceConfig:
    stock_source: ingestion.StockSource
    engine: EngineConfig = field(default_factory=EngineConfig)
    session_ttl: float = DEFAULT_SESSION_TTL
    max_sessions: int = DEFAULT_MAX_SESSIONS
    snapshot_path: str | None = None  # persist recipes here on PUT when set


_STATUS = {
    "VALIDATION": 422,
    "INVALID_OPTION": 422,
    "LIMIT_EXCEEDED": 422,
    "SESSION_NOT_FOUND": 404,
    "SESSION_FINISHED": 409,
    "UNREACHABLE": 502,
}


def create_app(recipes: RecipeMatrix, config: ServiceConfig) -> FastAPI:
    app = FastAPI(title="blendplan", docs_url=None, redoc_url=None)
    # the operator UI may be served from a different origin; API is open by design
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"])
    state = app.state
    state.recipes = recipes
    state.recipes_lock = threading.Lock()
    state.config = config
    state.store = SessionStore(config.session_ttl, config.max_sessions)

    def current_recipes() -> RecipeMatrix:
        with state.recipes_lock:
            return state.recipes

    def current_stock(expected_m: int | None) -> StockVector:
        return ingestion.load_stock(config.stock_source, expected_m)

    def demand_from(body) -> DemandVector:
        if not isinstance(body, dict) or "demand" not in body:
            raise ValidationError([Issue(PARSE, "request body must contain a demand array")])
        try:
            quantities = np.asarray(body["demand"], dtype=np.float64)
        except (TypeError, ValueError):
            raise ValidationError([Issue(PARSE, "demand must be an array of numbers")]) from None
        return DemandVector(quantities)

    @app.exception_handler(ValidationError)
    def _validation_handler(request: Request, exc: ValidationError):
        return JSONResponse(status_code=422, content={"error": exc.code, "detail": str(exc)})

    @app.exception_handler(RequestValidationError)
    def _request_validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=422, content={"error": "VALIDATION", "detail": str(exc)})

    for exc_type in (InvalidOption, LimitExceeded, SessionNotFound, SessionFinishedError):

        @app.exception_handler(exc_type)
        def _domain_handler(request: Request, exc: exc_type):  # noqa: B023
            return JSONResponse(
                status_code=_STATUS.get(exc.code, 400), content={"error": exc.code, "detail": str(exc)}
            )

    @app.get("/recipes")
    def get_recipes():
        return JSONResponse(recipes_view(current_recipes()))

    @app.put("/recipes")
    async def put_recipes(request: Request):
        content_type = request.headers.get("content-type", "")
        body = await request.body()
        if content_type.startswith("text/csv"):
            new_recipes = ingestion.parse_recipes_csv(body)
        else:
            try:
                payload = json.loads(body)
            except ValueError:
                raise ValidationError([Issue(PARSE, "recipe body is neither CSV nor JSON")]) from None
            if not isinstance(payload, dict):
                raise ValidationError([Issue(PARSE, "recipe JSON must be an object")])
            new_recipes = validate_recipes(
                payload.get("products", []), payload.get("components", []), payload.get("weights", [])
            )
        with state.recipes_lock:
            state.recipes = new_recipes
        if config.snapshot_path:
            with open(config.snapshot_path, "wb") as fh:
                fh.write(ingestion.write_recipes_csv(new_recipes))
        return JSONResponse(recipes_view(new_recipes))

    @app.get("/stock")
    def get_stock():
        return JSONResponse(stock_view(current_stock(None)))

    @app.post("/plan")
    async def post_plan(request: Request):
        recipes_now = current_recipes()
        demand = demand_from(await request.json())
        stock = current_stock(recipes_now.m)
        outcome = plan(recipes_now, stock, demand, config.engine)
        return JSONResponse(plan_view(recipes_now, outcome))

    @app.post("/variants")
    async def post_variants(request: Request, format: str = Query("json")):
        recipes_now = current_recipes()
        demand = demand_from(await request.json())
        stock = current_stock(recipes_now.m)
        outcome = plan(recipes_now, stock, demand, config.engine)
        if not outcome.feasible:
            return JSONResponse(shortfall_view(outcome.shortfall))
        variants = enumerate_variants(outcome.tree, config.engine)
        if format == "csv":
            return Response(
                export_variants(variants, recipes_now.product_names, "csv"), media_type="text/csv"
            )
        return JSONResponse(variants_view(recipes_now, variants))

    @app.post("/sessions")
    async def post_sessions(request: Request):
        recipes_now = current_recipes()
        demand = demand_from(await request.json())
        stock = current_stock(recipes_now.m)
        result = open_session(recipes_now, stock, demand, config.engine)
        if isinstance(result, StockState):
            return JSONResponse(shortfall_view(result))
        state.store.add(result)
        return JSONResponse(session_view(result))

    @app.post("/sessions/{session_id}/choose")
    async def post_choose(session_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "option" not in body:
            raise ValidationError([Issue(PARSE, "request body must contain an option number")])
        session, lock = state.store.acquire(session_id)
        with lock:
            session_choose(session, int(body["option"]))
            return JSONResponse(session_view(session))

    @app.get("/sessions/{session_id}/report")
    def get_report(session_id: str, format: str = Query("text")):
        session, lock = state.store.acquire(session_id)
        with lock:
            report = render_step_report(session)
        if format == "text":
            return PlainTextResponse(report.to_text())
        if format == "csv":
            return Response(report.to_csv(), media_type="text/csv")
        if format == "json":
            return JSONResponse(report.to_json_obj())
        raise ValidationError([Issue(PARSE, f"unknown report format {format!r}")])

    return app


def serve(
    recipes: RecipeMatrix,
    config: ServiceConfig,
    host: str = "127.0.0.1",
    port: int = 8000,
    log_level: str = "info",
) -> None:
    """Run the HTTP service until interrupted."""
    import uvicorn

    app = create_app(recipes, config)
    uvicorn.run(app, host=host, port=port, log_level=log_level)
