"""HTTP JSON API over the gateway pipeline."""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import (EmptyQuery, EmptyQuestion, GatewayError, NoSourcesEnabled,
                      PromptTooLarge, ProviderFailure, SessionNotFound)
from ..federation import SourceRegistry
from .config import ServiceConfig
from .pipeline import GatewayPipeline
from .sessions import SessionStore
from .telemetry import TelemetryLog

_STATUS_BY_ERROR = {
    EmptyQuery: 400,
    EmptyQuestion: 400,
    SessionNotFound: 404,
    PromptTooLarge: 413,
    ProviderFailure: 502,
    NoSourcesEnabled: 503,
}


class SearchRequest(BaseModel):
    query: str = ""


class ChatRequest(BaseModel):
    session_id: str = ""
    question: str = ""


def create_app(pipeline: GatewayPipeline, static_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="scholarly-gateway")

    @app.exception_handler(GatewayError)
    async def gateway_error_handler(_request: Request, exc: GatewayError):
        status = 500
        for error_type, code in _STATUS_BY_ERROR.items():
            if isinstance(exc, error_type):
                status = code
                break
        return JSONResponse(status_code=status,
                            content={"code": exc.code, "message": exc.message})

    @app.post("/search")
    def search(request: SearchRequest):
        return pipeline.search(request.query).to_payload()

    @app.post("/chat")
    def chat(request: ChatRequest):
        return pipeline.chat(request.session_id, request.question).to_payload()

    @app.get("/sessions/{session_id}/history")
    def history(session_id: str):
        return pipeline.history(session_id)

    @app.get("/health")
    def health():
        return pipeline.health()

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    else:
        @app.get("/")
        def root():
            return {"service": "scholarly-gateway",
                    "endpoints": ["/search", "/chat", "/sessions/{id}/history", "/health"]}

    return app


def build_app(config: ServiceConfig) -> FastAPI:
    """Assemble the full service from one config object."""
    registry = SourceRegistry()
    if config.sources_path:
        registry = SourceRegistry.from_config(config.sources_path)
    pipeline = GatewayPipeline(
        registry=registry,
        dedup_weights=config.dedup,
        bm25_params=config.bm25,
        ensemble=config.ensemble,
        embedder=config.make_embedder(),
        llm_provider=config.make_llm_provider(),
        sessions=SessionStore(capacity=config.capacity),
        telemetry=TelemetryLog(config.telemetry_path),
    )
    return create_app(pipeline, static_dir=config.static_dir)
