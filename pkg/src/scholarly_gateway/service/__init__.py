"""HTTP service, session store, telemetry, and pipeline wiring."""

from .app import build_app, create_app
from .config import ServiceConfig
from .pipeline import ChatResult, GatewayPipeline, SearchResult, record_summary
from .sessions import SessionEntry, SessionStore
from .telemetry import TelemetryLog, load_telemetry

__all__ = [
    "ChatResult", "GatewayPipeline", "SearchResult", "ServiceConfig",
    "SessionEntry", "SessionStore", "TelemetryLog", "build_app", "create_app",
    "load_telemetry", "record_summary",
]
