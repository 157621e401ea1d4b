"""Federated search: registry, connectors, concurrent fan-out."""

from .connectors import FixtureConnector, RemoteConnector, build_connector
from .registry import SourceRegistry
from .types import (
    BatchStatus,
    FederatedResponse,
    SourceBatch,
    SourceDescriptor,
    SourceKind,
    SourceRecord,
)

__all__ = [
    "BatchStatus",
    "FederatedResponse",
    "FixtureConnector",
    "RemoteConnector",
    "SourceBatch",
    "SourceDescriptor",
    "SourceKind",
    "SourceRecord",
    "SourceRegistry",
    "build_connector",
]
