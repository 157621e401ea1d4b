"""Source connectors: local fixture directories and remote JSON adapters.

A connector is any callable taking a query string and returning a list
of :class:`SourceRecord`.  Connectors raise on failure; the federation
layer converts exceptions into batch statuses.
"""

from __future__ import annotations

import json
import logging
import time
import urllib.parse
from pathlib import Path
from typing import Any, Callable, Protocol

import httpx

from .types import SourceDescriptor, SourceRecord

logger = logging.getLogger(__name__)

Connector = Callable[[str], "list[SourceRecord]"]

#: Control file recognized inside a fixture directory; anything else
#: starting with "_" is skipped as well.
FIXTURE_CONTROL_FILE = "_fixture.json"


class ConnectorFactory(Protocol):
    def __call__(self, descriptor: SourceDescriptor) -> Connector: ...


def _value_matches(value: Any, needle: str) -> bool:
    if isinstance(value, (list, tuple)):
        return any(_value_matches(v, needle) for v in value)
    if isinstance(value, dict):
        return any(_value_matches(v, needle) for v in value.values())
    return needle in str(value).lower()


class FixtureConnector:
    """Serves records from a directory of JSON files, one record per file.

    A record matches when the query occurs as a case-insensitive
    substring of any field value.  An optional ``_fixture.json`` control
    file supports ``{"delay_seconds": x}`` for timeout testing and
    ``{"fail": "message"}`` to simulate a broken source.
    """

    def __init__(self, descriptor: SourceDescriptor):
        self.descriptor = descriptor
        self.directory = Path(descriptor.endpoint)

    def _control(self) -> dict[str, Any]:
        path = self.directory / FIXTURE_CONTROL_FILE
        if path.is_file():
            return json.loads(path.read_text(encoding="utf-8"))
        return {}

    def __call__(self, query: str) -> list[SourceRecord]:
        control = self._control()
        delay = float(control.get("delay_seconds", 0))
        if delay > 0:
            time.sleep(delay)
        if "fail" in control:
            raise RuntimeError(str(control["fail"]))

        needle = query.lower()
        records = []
        for path in sorted(self.directory.glob("*.json")):
            if path.name.startswith("_"):
                continue
            payload = json.loads(path.read_text(encoding="utf-8"))
            if any(_value_matches(v, needle) for v in payload.values()):
                records.append(
                    SourceRecord(source_id=self.descriptor.id, native_fields=payload)
                )
        return records


class RemoteConnector:
    """Parameterized GET against a JSON search endpoint.

    Three reference response shapes are supported; everything else about
    a repository is configuration, not code.

    - ``dblp``:    {"result": {"hits": {"hit": [{"info": {...}}]}}}
    - ``openalex``: {"results": [{...}]}
    - ``zenodo``:  {"hits": {"hits": [{"metadata": {...}}]}}
    - ``generic``: either a bare list of objects or {"results": [...]}
    """

    def __init__(self, descriptor: SourceDescriptor, client: httpx.Client | None = None):
        self.descriptor = descriptor
        self._client = client

    def _get(self, query: str) -> Any:
        params = {"q": query} if self.descriptor.adapter != "openalex" else {"search": query}
        headers = {}
        if self.descriptor.bearer_token:
            headers["Authorization"] = f"Bearer {self.descriptor.bearer_token}"
        url = self.descriptor.endpoint
        if self._client is not None:
            resp = self._client.get(url, params=params, headers=headers,
                                    timeout=self.descriptor.timeout)
        else:
            resp = httpx.get(url, params=params, headers=headers,
                             timeout=self.descriptor.timeout)
        resp.raise_for_status()
        return resp.json()

    def _extract(self, payload: Any) -> list[dict[str, Any]]:
        adapter = self.descriptor.adapter
        if adapter == "dblp":
            hits = payload.get("result", {}).get("hits", {}).get("hit", [])
            return [h.get("info", h) for h in hits]
        if adapter == "openalex":
            return list(payload.get("results", []))
        if adapter == "zenodo":
            hits = payload.get("hits", {}).get("hits", [])
            return [h.get("metadata", h) for h in hits]
        if isinstance(payload, list):
            return list(payload)
        return list(payload.get("results", []))

    def __call__(self, query: str) -> list[SourceRecord]:
        payload = self._get(query)
        return [
            SourceRecord(source_id=self.descriptor.id, native_fields=dict(item))
            for item in self._extract(payload)
            if isinstance(item, dict)
        ]


def build_connector(descriptor: SourceDescriptor,
                    client: httpx.Client | None = None) -> Connector:
    from .types import SourceKind

    if descriptor.kind == SourceKind.FIXTURE:
        return FixtureConnector(descriptor)
    return RemoteConnector(descriptor, client=client)


def encoded_query_url(base: str, query: str, param: str = "q") -> str:
    """URL with the query attached, for logging and debugging."""
    return f"{base}?{urllib.parse.urlencode({param: query})}"
