"""The search-then-chat pipeline behind the HTTP API and the CLI.

One search request fans out to the registered sources, normalizes and
deduplicates what came back, ranks the survivors, and freezes them into
a session-scoped knowledge base that chat turns retrieve from.
"""

from __future__ import annotations

import importlib.resources
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from .. import generator
from ..dedup import SimilarityWeights, find_clusters
from ..errors import EmptyCorpus, MappingFailure
from ..federation import BatchStatus, FederatedResponse, SourceRegistry
from ..generator import LlmProvider
from ..ranking import Bm25Params, rank
from ..retriever import (EmbeddingProvider, EnsembleConfig, HashingEmbedder,
                         KnowledgeBase, build_kb, ensemble_retrieve)
from ..taxonomy import FieldMap, ScholarlyRecord, group_by_facet, map_record
from .sessions import SessionEntry, SessionStore
from .telemetry import TelemetryLog

logger = logging.getLogger(__name__)


def load_bundled_fieldmaps() -> dict[str, FieldMap]:
    """Field maps shipped with the package, keyed by adapter name."""
    maps: dict[str, FieldMap] = {}
    root = importlib.resources.files("scholarly_gateway") / "assets" / "fieldmaps"
    for entry in root.iterdir():
        if entry.name.endswith(".json"):
            maps[entry.name[:-5]] = FieldMap.from_dict(json.loads(entry.read_text()))
    return maps


def record_summary(record: ScholarlyRecord) -> dict:
    return {
        "facet": record.facet.value,
        "title": record.title,
        "authors": list(record.authors),
        "date": record.date_text(),
        "doi": record.doi,
        "url": record.url,
        "abstract": record.abstract,
        "sources": sorted(record.source_ids),
    }


@dataclass
class SearchResult:
    session_id: str
    query: str
    records: list[ScholarlyRecord]
    statuses: list[dict]
    latency_seconds: float
    total_records: int
    unique_records: int
    skipped_records: int

    def to_payload(self) -> dict:
        groups = {facet.value: [record_summary(r) for r in members]
                  for facet, members in group_by_facet(self.records).items()}
        return {
            "session_id": self.session_id,
            "query": self.query,
            "groups": groups,
            "sources": self.statuses,
            "latency_seconds": self.latency_seconds,
            "total_records": self.total_records,
            "unique_records": self.unique_records,
            "skipped_records": self.skipped_records,
        }


@dataclass
class ChatResult:
    session_id: str
    answer: str
    supporting: list[dict]
    history_len: int

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "answer": self.answer,
            "supporting": self.supporting,
            "history_len": self.history_len,
        }


class GatewayPipeline:
    def __init__(self, registry: SourceRegistry,
                 dedup_weights: SimilarityWeights = SimilarityWeights(),
                 bm25_params: Bm25Params = Bm25Params(),
                 ensemble: EnsembleConfig = EnsembleConfig(),
                 embedder: Optional[EmbeddingProvider] = None,
                 llm_provider: Optional[LlmProvider] = None,
                 sessions: Optional[SessionStore] = None,
                 telemetry: Optional[TelemetryLog] = None,
                 fieldmaps: Optional[dict[str, FieldMap]] = None):
        self.registry = registry
        self.dedup_weights = dedup_weights
        self.bm25_params = bm25_params
        self.ensemble = ensemble
        self.embedder = embedder or HashingEmbedder()
        self.llm_provider = llm_provider or generator.ExtractiveLlm()
        self.sessions = sessions or SessionStore()
        self.telemetry = telemetry or TelemetryLog(None)
        self.fieldmaps = fieldmaps if fieldmaps is not None else load_bundled_fieldmaps()

    def _fieldmap_for(self, source_id: str) -> Optional[FieldMap]:
        try:
            descriptor = self.registry.get(source_id)
        except Exception:
            return None
        return self.fieldmaps.get(source_id) or self.fieldmaps.get(descriptor.adapter)

    def _map_response(self, response: FederatedResponse) -> tuple[list[ScholarlyRecord], int]:
        mapped: list[ScholarlyRecord] = []
        skipped = 0
        for batch in response.batches:
            fmap = self._fieldmap_for(batch.source_id)
            for raw in batch.records:
                try:
                    mapped.append(map_record(raw, fmap))
                except MappingFailure as exc:
                    skipped += 1
                    logger.warning("dropping record from %s: %s", batch.source_id, exc)
        return mapped, skipped

    def search(self, query: str) -> SearchResult:
        response = self.registry.search_all(query)
        mapped, skipped = self._map_response(response)
        clusters = find_clusters(mapped, self.dedup_weights) if mapped else []
        merged = [c.representative for c in clusters]
        ranked = rank(response.query, merged, self.bm25_params)

        kb: Optional[KnowledgeBase] = None
        if ranked:
            kb = build_kb(ranked, self.embedder)
        entry = self.sessions.create(response.query, kb)

        statuses = [{
            "id": batch.source_id,
            "status": batch.status.value,
            "latency_seconds": batch.latency,
            "records": len(batch.records),
            "message": batch.message,
        } for batch in response.batches]
        per_source = {batch.source_id: len(batch.records) for batch in response.batches}
        self.telemetry.record_search(response.query, response.total_latency,
                                     len(ranked), per_source)
        return SearchResult(
            session_id=entry.session.session_id,
            query=response.query,
            records=ranked,
            statuses=statuses,
            latency_seconds=response.total_latency,
            total_records=len(mapped),
            unique_records=len(ranked),
            skipped_records=skipped,
        )

    def chat(self, session_id: str, question: str) -> ChatResult:
        entry = self.sessions.get(session_id)
        with entry.lock:
            doc_texts: list[str] = []
            supporting: list[dict] = []
            if entry.kb is not None:
                hits = ensemble_retrieve(question, entry.kb, self.ensemble, self.embedder)
                for doc_id, _score in hits:
                    document = entry.kb.documents[doc_id]
                    doc_texts.append(document.text)
                    supporting.append({
                        "title": document.record.title,
                        "sources": sorted(document.record.source_ids),
                    })
            answer = generator.answer(question, doc_texts, entry.session, self.llm_provider)
            return ChatResult(
                session_id=session_id,
                answer=answer,
                supporting=supporting,
                history_len=len(entry.session.turns),
            )

    def history(self, session_id: str) -> list[dict]:
        return self.sessions.get(session_id).session.history_payload()

    def health(self) -> dict:
        sources = {d.id: d.enabled for d in self.registry.list_sources()}
        status = "ok" if any(sources.values()) else "degraded"
        return {"status": status, "sources": sources}
