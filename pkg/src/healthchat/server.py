"""HTTP surface over the chat engine.

All endpoints return JSON; errors use one shape, {"code", "message"},
with 400 for bad input, 404 for unknown sessions, 409 when a session is
busy, and 502 when the language model is unavailable.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .autocomplete import PrefixIndex, build_prefix_index
from .chat import ChatEngine, ChatSession, DEFAULT_GREETING
from .config import AppConfig
from .corpus import load_bundle
from .embedding import EmbeddingProvider, HashedNgramProvider, RemoteEmbeddingProvider
from .errors import (
    SessionBusyError,
    SnapshotError,
    UnknownSessionError,
    ValidationError,
)
from .followup import FollowupError, FollowupMethod, FollowupSet
from .llm import LLMError, LLMGateway, RemoteLLM, ScriptedLLM
from .posts import (
    CategoryConfig,
    CuratedPost,
    default_category_config,
    fetch_example,
    load_category_config,
    load_curated,
)
from .retrieval import load_index
from .topics import default_taxonomy, load_taxonomy, load_topic_model

logger = logging.getLogger(__name__)


def make_provider(config: AppConfig) -> EmbeddingProvider:
    p = config.provider
    if p.kind == "hashed":
        return HashedNgramProvider(dim=p.dim, seed=p.seed)
    return RemoteEmbeddingProvider(
        endpoint=p.endpoint, dim=p.dim, name=p.name or "remote"
    )


def load_stub_script(path: str | Path) -> list[str]:
    """Read a stub reply script: a JSON array, or {"replies": [...]}."""
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    replies = doc["replies"] if isinstance(doc, dict) else doc
    if not isinstance(replies, list) or not all(isinstance(r, str) for r in replies):
        raise ValidationError(f"stub script {path} must be a list of strings")
    return replies


def make_llm(config: AppConfig) -> LLMGateway:
    c = config.llm
    if c.kind == "scripted":
        return ScriptedLLM(load_stub_script(config.resolve(c.script_path)))
    return RemoteLLM(endpoint=c.endpoint, model=c.model, timeout=c.timeout)


@dataclass
class AppState:
    """Everything the endpoints need, wired once at startup."""

    config: AppConfig
    engine: ChatEngine
    prefix_index: PrefixIndex
    curated: list[CuratedPost]
    post_index: object  # DocIndex
    category_config: CategoryConfig
    llm: LLMGateway


def build_state(
    config: AppConfig,
    llm: LLMGateway | None = None,
    provider: EmbeddingProvider | None = None,
    clock=None,
    id_factory=None,
) -> AppState:
    """Load the built artifacts and wire the engine. `llm` and `provider`
    override the configured ones (tests inject stubs here)."""
    provider = provider or make_provider(config)
    llm = llm or make_llm(config)

    bundle = load_bundle(
        config.resolve(config.base_qa_path),
        config.resolve(config.lookup_qa_path),
        config.resolve(config.conversations_path),
        config.resolve(config.posts_path),
    )
    qa_index = load_index(config.resolve(config.qa_index_path), provider)
    conv_index = load_index(config.resolve(config.conv_index_path), provider)

    topic_models = {}
    for backend, rel in config.topic_model_paths.items():
        path = config.resolve(rel)
        if path.exists():
            topic_models[backend] = load_topic_model(path, provider)
    taxonomy = (
        load_taxonomy(config.resolve(config.taxonomy_path))
        if config.taxonomy_path
        else default_taxonomy()
    )
    category_config = (
        load_category_config(config.resolve(config.categories_path))
        if config.categories_path
        else default_category_config()
    )
    curated = load_curated(config.resolve(config.curated_path))
    post_index = load_index(config.resolve(config.post_index_path), provider)

    engine_kwargs = {}
    if clock is not None:
        engine_kwargs["clock"] = clock
    if id_factory is not None:
        engine_kwargs["id_factory"] = id_factory
    engine = ChatEngine(
        qa_index=qa_index,
        llm=llm,
        lookup_qa=bundle.lookup_qa,
        conv_index=conv_index,
        topic_models=topic_models,
        taxonomy=taxonomy,
        initial_suggestions=[qa.question for qa in bundle.base_qa[:4]],
        default_method=FollowupMethod(config.default_method),
        greeting=config.greeting or DEFAULT_GREETING,
        top_k=config.top_k,
        max_history_turns=config.max_history_turns or None,
        template_dir=config.template_dir or None,
        session_dir=config.resolve(config.session_dir),
        **engine_kwargs,
    )
    prefix_index = build_prefix_index(bundle.lookup_qa)
    return AppState(
        config=config,
        engine=engine,
        prefix_index=prefix_index,
        curated=curated,
        post_index=post_index,
        category_config=category_config,
        llm=llm,
    )


class MessageBody(BaseModel):
    query: str
    method: str | None = None


class ExplainBody(BaseModel):
    selected: str


class TopicBody(BaseModel):
    topic: str


class ExampleBody(BaseModel):
    category: str | None = None


def _followups_json(followups: FollowupSet | None) -> dict | None:
    if followups is None:
        return None
    return {"questions": list(followups.questions), "method": followups.method.value}


def _session_json(session: ChatSession) -> dict:
    return {
        "session_id": session.session_id,
        "followups": _followups_json(session.current_followups),
        "active_topic": session.active_topic,
    }


def _post_json(item: CuratedPost) -> dict:
    return {
        "id": item.post.id,
        "title": item.post.title,
        "body": item.post.body,
        "category": item.category,
        "engagement": item.engagement,
    }


def create_app(state: AppState) -> FastAPI:
    app = FastAPI(title="healthchat", docs_url=None, redoc_url=None)
    config = state.config

    if config.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(config.cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(ValidationError)
    async def _bad_input(request: Request, exc: ValidationError):
        return error(400, "invalid_request", str(exc))

    @app.exception_handler(UnknownSessionError)
    async def _unknown(request: Request, exc: UnknownSessionError):
        return error(404, "unknown_session", str(exc))

    @app.exception_handler(SessionBusyError)
    async def _busy(request: Request, exc: SessionBusyError):
        return error(409, "session_busy", str(exc))

    @app.exception_handler(LLMError)
    async def _llm_down(request: Request, exc: LLMError):
        return error(502, "llm_unavailable", str(exc))

    @app.exception_handler(FollowupError)
    async def _followup_failed(request: Request, exc: FollowupError):
        return error(502, "llm_unavailable", str(exc))

    @app.exception_handler(RequestValidationError)
    async def _malformed(request: Request, exc: RequestValidationError):
        return error(400, "invalid_request", "malformed request body")

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    def create_session():
        session = state.engine.create_session()
        return {"greeting": state.engine.greeting, **_session_json(session)}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = state.engine.get_session(session_id)
        return {
            **_session_json(session),
            "history": [
                {"role": t.role, "text": t.text, "ts": t.timestamp}
                for t in session.history
            ],
        }

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        try:
            method = FollowupMethod(body.method) if body.method else None
        except ValueError:
            raise ValidationError(f"unknown follow-up method {body.method!r}") from None
        reply = state.engine.respond(session_id, body.query, method)
        session = state.engine.get_session(session_id)
        return {"reply": reply, **_session_json(session)}

    @app.post("/sessions/{session_id}/explain")
    def post_explain(session_id: str, body: ExplainBody):
        reply = state.engine.explain_term(session_id, body.selected)
        session = state.engine.get_session(session_id)
        return {"reply": reply, **_session_json(session)}

    @app.get("/autocomplete")
    def autocomplete(q: str = ""):
        return {"suggestions": state.prefix_index.suggest(q, config.suggestion_limit)}

    @app.get("/sessions/{session_id}/topic")
    def current_topic(session_id: str):
        return {"topic": state.engine.current_topic(session_id)}

    @app.post("/sessions/{session_id}/topic")
    def switch_topic(session_id: str, body: TopicBody):
        followups = state.engine.switch_topic(session_id, body.topic)
        return {"topic": body.topic, "followups": _followups_json(followups)}

    @app.get("/topics")
    def list_topics():
        taxonomy = state.engine.taxonomy
        return {"topics": list(taxonomy.topics) if taxonomy else []}

    @app.post("/sessions/{session_id}/example")
    def example(session_id: str, body: ExampleBody | None = None):
        session = state.engine.get_session(session_id)
        query, answer = session.latest_exchange()
        item, disclaimer = fetch_example(
            query,
            answer,
            state.curated,
            state.post_index,
            state.category_config,
            llm=state.llm,
            category=body.category if body else None,
        )
        return {"post": _post_json(item), "disclaimer": disclaimer}

    if config.ui_dir:
        ui_path = Path(config.ui_dir)
        if ui_path.is_dir():
            app.mount("/ui", StaticFiles(directory=ui_path, html=True), name="ui")
        else:
            logger.warning("ui_dir %s does not exist; not mounting /ui", ui_path)

    return app


def serve(config: AppConfig) -> None:
    """Build the app from config and run it under uvicorn (blocking)."""
    import uvicorn

    state = build_state(config)
    app = create_app(state)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
