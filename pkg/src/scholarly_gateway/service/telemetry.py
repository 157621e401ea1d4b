"""Append-only JSON-lines telemetry for search requests."""

from __future__ import annotations

import json
import threading
import time
from pathlib import Path
from typing import Optional


class TelemetryLog:
    """One JSON object per line; writes are serialized.

    A ``None`` path disables logging without branching at call sites.
    """

    def __init__(self, path: Optional[str | Path]):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()

    def record_search(self, query: str, latency_seconds: float,
                      docs_returned: int, per_source: dict[str, int]):
        if self.path is None:
            return
        entry = {
            "ts": time.time(),
            "query": query,
            "latency_seconds": latency_seconds,
            "docs_returned": docs_returned,
            "per_source": per_source,
        }
        line = json.dumps(entry, ensure_ascii=False)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line + "\n")

    def read(self) -> list[dict]:
        if self.path is None or not self.path.exists():
            return []
        entries = []
        with open(self.path, encoding="utf-8") as handle:
            for line in handle:
                line = line.strip()
                if line:
                    entries.append(json.loads(line))
        return entries


def load_telemetry(path: str | Path) -> list[dict]:
    return TelemetryLog(path).read()
