"""Source registry and the concurrent fan-out search."""

from __future__ import annotations

import json
import logging
import threading
import time
from pathlib import Path
from typing import Optional

import httpx

from ..errors import DuplicateSourceId, EmptyQuery, NoSourcesEnabled, UnknownSource
from .connectors import Connector, build_connector
from .types import BatchStatus, FederatedResponse, SourceBatch, SourceDescriptor

logger = logging.getLogger(__name__)

DEFAULT_MAX_WORKERS = 8

#: Poll interval while waiting for a queued fetch to start.
_START_POLL = 0.01


class _Fetch:
    """One in-flight connector call, executed on a daemon thread.

    Daemon threads let an abandoned fetch (timed out, still sleeping in
    a slow connector) die with the process instead of blocking exit.
    """

    def __init__(self, connector: Connector, query: str, gate: threading.Semaphore):
        self.started: float | None = None
        self.elapsed = 0.0
        self.records = None
        self.error: Exception | None = None
        self.done = threading.Event()
        self._thread = threading.Thread(
            target=self._run, args=(connector, query, gate), daemon=True
        )
        self._thread.start()

    def _run(self, connector: Connector, query: str, gate: threading.Semaphore):
        with gate:
            self.started = time.monotonic()
            try:
                self.records = connector(query)
            except Exception as exc:
                self.error = exc
            self.elapsed = time.monotonic() - self.started
            self.done.set()

    def wait(self, timeout: float) -> bool:
        """True when finished, False on per-source timeout.

        The timeout clock starts when the connector actually runs, so a
        fetch queued behind the fan-out limit is not penalized.
        """
        while self.started is None:
            if self.done.wait(_START_POLL):
                return True
        remaining = timeout - (time.monotonic() - self.started)
        return self.done.wait(max(0.0, remaining))


class SourceRegistry:
    """Holds registered sources and fans queries out to all enabled ones.

    Registration is expected to happen at setup time; searches take a
    snapshot of the table, so concurrent searches never observe a
    half-updated registry.
    """

    def __init__(self, max_workers: int = DEFAULT_MAX_WORKERS,
                 client: Optional[httpx.Client] = None):
        self._sources: dict[str, SourceDescriptor] = {}
        self._connectors: dict[str, Connector] = {}
        self._lock = threading.Lock()
        self.max_workers = max_workers
        self._client = client

    def register(self, descriptor: SourceDescriptor,
                 connector: Optional[Connector] = None) -> "SourceRegistry":
        with self._lock:
            if descriptor.id in self._sources:
                raise DuplicateSourceId(f"source id {descriptor.id!r} already registered")
            self._sources[descriptor.id] = descriptor
            self._connectors[descriptor.id] = connector or build_connector(
                descriptor, client=self._client
            )
        return self

    def list_sources(self) -> list[SourceDescriptor]:
        with self._lock:
            return sorted(self._sources.values(), key=lambda d: d.id)

    def get(self, source_id: str) -> SourceDescriptor:
        with self._lock:
            try:
                return self._sources[source_id]
            except KeyError:
                raise UnknownSource(f"source {source_id!r} is not registered") from None

    @classmethod
    def from_config(cls, path: str | Path, max_workers: int = DEFAULT_MAX_WORKERS,
                    client: Optional[httpx.Client] = None) -> "SourceRegistry":
        """Load a registry from a JSON file holding a list of descriptors."""
        registry = cls(max_workers=max_workers, client=client)
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        for entry in raw:
            registry.register(SourceDescriptor.from_dict(entry))
        return registry

    # -- searching ----------------------------------------------------

    def _collect(self, descriptor: SourceDescriptor, fetch: _Fetch) -> SourceBatch:
        if not fetch.wait(descriptor.timeout):
            logger.warning("source %s timed out after %.1fs", descriptor.id, descriptor.timeout)
            return SourceBatch(
                source_id=descriptor.id,
                status=BatchStatus.TIMEOUT,
                latency=descriptor.timeout,
            )
        if fetch.error is not None:
            logger.warning("source %s failed: %s", descriptor.id, fetch.error)
            return SourceBatch(
                source_id=descriptor.id,
                status=BatchStatus.ERROR,
                latency=fetch.elapsed,
                message=str(fetch.error),
            )
        return SourceBatch(
            source_id=descriptor.id,
            status=BatchStatus.OK,
            records=fetch.records or [],
            latency=fetch.elapsed,
        )

    def fetch_source(self, source_id: str, query: str) -> SourceBatch:
        """Query a single source; failure is data, not an exception."""
        descriptor = self.get(source_id)
        query = query.strip()
        if not query:
            raise EmptyQuery("query must be non-empty")
        with self._lock:
            connector = self._connectors[source_id]
        fetch = _Fetch(connector, query, threading.Semaphore(1))
        return self._collect(descriptor, fetch)

    def search_all(self, query: str) -> FederatedResponse:
        """Fan the query out to every enabled source.

        One batch per enabled source, ordered by source id regardless of
        completion order; a failing source never suppresses the others.
        """
        query = query.strip()
        if not query:
            raise EmptyQuery("query must be non-empty")
        with self._lock:
            enabled = sorted(
                (d for d in self._sources.values() if d.enabled), key=lambda d: d.id
            )
            connectors = {d.id: self._connectors[d.id] for d in enabled}
        if not enabled:
            raise NoSourcesEnabled("no enabled sources to search")

        started = time.monotonic()
        gate = threading.Semaphore(self.max_workers)
        fetches = [(d, _Fetch(connectors[d.id], query, gate)) for d in enabled]
        batches = [self._collect(descriptor, fetch) for descriptor, fetch in fetches]
        return FederatedResponse(
            query=query,
            batches=batches,
            total_latency=time.monotonic() - started,
        )
