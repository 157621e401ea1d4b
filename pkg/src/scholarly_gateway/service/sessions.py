"""In-memory chat session table with LRU eviction."""

from __future__ import annotations

import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

from ..errors import SessionNotFound
from ..generator import ChatSession
from ..retriever import KnowledgeBase

DEFAULT_CAPACITY = 256


@dataclass
class SessionEntry:
    session: ChatSession
    kb: Optional[KnowledgeBase]
    query: str
    # serializes chat turns within one session; the table lock stays free
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError(f"capacity must be at least 1, got {capacity}")
        self.capacity = capacity
        self._entries: "OrderedDict[str, SessionEntry]" = OrderedDict()
        self._lock = threading.Lock()

    def create(self, query: str, kb: Optional[KnowledgeBase]) -> SessionEntry:
        session_id = uuid.uuid4().hex
        entry = SessionEntry(session=ChatSession(session_id=session_id), kb=kb, query=query)
        with self._lock:
            self._entries[session_id] = entry
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)
        return entry

    def get(self, session_id: str) -> SessionEntry:
        with self._lock:
            entry = self._entries.get(session_id)
            if entry is None:
                raise SessionNotFound(f"unknown session {session_id!r}")
            self._entries.move_to_end(session_id)
            return entry

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, session_id: str) -> bool:
        with self._lock:
            return session_id in self._entries
