"""Service configuration.

Everything lives in one JSON file except credentials, which are read
from environment variables only (GATEWAY_LLM_API_KEY,
GATEWAY_EMBEDDING_API_KEY) so they never appear in configs or logs.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..dedup import SimilarityWeights
from ..generator import ExtractiveLlm, LlmProvider, RemoteLlm
from ..ranking import Bm25Params
from ..retriever import EmbeddingProvider, EnsembleConfig, HashingEmbedder, RemoteEmbedder
from .sessions import DEFAULT_CAPACITY

LLM_KEY_ENV = "GATEWAY_LLM_API_KEY"
EMBEDDING_KEY_ENV = "GATEWAY_EMBEDDING_API_KEY"


@dataclass
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8080
    sources_path: Optional[str] = None
    capacity: int = DEFAULT_CAPACITY
    telemetry_path: Optional[str] = "telemetry.jsonl"
    static_dir: Optional[str] = None
    dedup: SimilarityWeights = field(default_factory=SimilarityWeights)
    ensemble: EnsembleConfig = field(default_factory=EnsembleConfig)
    bm25: Bm25Params = field(default_factory=Bm25Params)
    llm_endpoint: Optional[str] = None
    llm_model: str = "gpt-3.5-turbo"
    embedding_endpoint: Optional[str] = None

    def __post_init__(self):
        if self.capacity < 1:
            raise ValueError(f"session capacity must be at least 1, got {self.capacity}")

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        listen = raw.get("listen", {})
        providers = raw.get("providers", {})
        llm = providers.get("llm", {})
        embedding = providers.get("embedding", {})
        kwargs = dict(
            host=listen.get("host", "127.0.0.1"),
            port=int(listen.get("port", 8080)),
            sources_path=raw.get("sources"),
            capacity=int(raw.get("sessions", {}).get("capacity", DEFAULT_CAPACITY)),
            telemetry_path=raw.get("telemetry", "telemetry.jsonl"),
            static_dir=raw.get("static_dir"),
            llm_endpoint=llm.get("endpoint"),
            llm_model=llm.get("model", "gpt-3.5-turbo"),
            embedding_endpoint=embedding.get("endpoint"),
        )
        if "dedup" in raw:
            kwargs["dedup"] = SimilarityWeights(**raw["dedup"])
        if "ensemble" in raw:
            kwargs["ensemble"] = EnsembleConfig(**raw["ensemble"])
        if "bm25" in raw:
            kwargs["bm25"] = Bm25Params(**raw["bm25"])
        return cls(**kwargs)

    def make_llm_provider(self) -> LlmProvider:
        if self.llm_endpoint:
            return RemoteLlm(endpoint=self.llm_endpoint, model=self.llm_model,
                             api_key=os.environ.get(LLM_KEY_ENV))
        return ExtractiveLlm()

    def make_embedder(self) -> EmbeddingProvider:
        if self.embedding_endpoint:
            return RemoteEmbedder(endpoint=self.embedding_endpoint,
                                  api_key=os.environ.get(EMBEDDING_KEY_ENV))
        return HashingEmbedder()
