"""Core datatypes for the federated search layer."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..errors import InvalidDescriptor


class SourceKind(str, Enum):
    FIXTURE = "fixture"
    REMOTE = "remote"


class BatchStatus(str, Enum):
    OK = "ok"
    TIMEOUT = "timeout"
    ERROR = "error"


@dataclass(frozen=True)
class SourceDescriptor:
    """One registered data source.

    ``endpoint`` is a directory path for fixture sources and a URL for
    remote ones; ``adapter`` selects the remote response parser.
    """

    id: str
    display_name: str
    kind: SourceKind
    endpoint: str
    timeout: float = 15.0
    enabled: bool = True
    adapter: str = "generic"
    bearer_token: str | None = None

    def __post_init__(self):
        if not self.id:
            raise InvalidDescriptor("source id must be non-empty")
        if self.timeout <= 0:
            raise InvalidDescriptor(f"timeout must be > 0, got {self.timeout}")

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "SourceDescriptor":
        return cls(
            id=str(raw["id"]),
            display_name=str(raw.get("display_name", raw["id"])),
            kind=SourceKind(raw.get("kind", "fixture")),
            endpoint=str(raw.get("endpoint", "")),
            timeout=float(raw.get("timeout", 15.0)),
            enabled=bool(raw.get("enabled", True)),
            adapter=str(raw.get("adapter", "generic")),
            bearer_token=raw.get("bearer_token"),
        )


@dataclass
class SourceRecord:
    """Raw key-value record exactly as one source returned it."""

    source_id: str
    native_fields: dict[str, Any]
    fetched_at: float = field(default_factory=time.time)


@dataclass
class SourceBatch:
    source_id: str
    status: BatchStatus
    records: list[SourceRecord] = field(default_factory=list)
    latency: float = 0.0
    message: str = ""


@dataclass
class FederatedResponse:
    query: str
    batches: list[SourceBatch]
    total_latency: float

    @property
    def records(self) -> list[SourceRecord]:
        """All records across batches, flattened in batch order."""
        return [r for batch in self.batches for r in batch.records]
