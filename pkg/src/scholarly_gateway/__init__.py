"""Self-hostable federated scholarly search with conversational QA.

One query fans out to many scholarly sources, results are normalized
onto a faceted taxonomy, deduplicated, and ranked; the survivors become
a session-scoped knowledge base that a retrieval-augmented chat layer
answers questions from.
"""

from .dedup import SimilarityWeights, deduplicate, find_clusters, pair_similarity
from .errors import GatewayError
from .federation import (SourceDescriptor, SourceKind, SourceRecord, SourceRegistry,
                         BatchStatus)
from .generator import ChatSession, ExtractiveLlm, RemoteLlm, answer, build_prompt
from .ranking import Bm25Params, bm25plus_score, build_stats, rank, tokenize
from .retriever import (EnsembleConfig, HashingEmbedder, KnowledgeBase, RemoteEmbedder,
                        build_kb, ensemble_retrieve, flatten_record)
from .taxonomy import (Facet, FieldMap, ScholarlyRecord, group_by_facet, map_record,
                       normalize_doi, parse_date)

__version__ = "0.1.0"

__all__ = [
    "BatchStatus", "Bm25Params", "ChatSession", "EnsembleConfig", "ExtractiveLlm",
    "Facet", "FieldMap", "GatewayError", "HashingEmbedder", "KnowledgeBase",
    "RemoteEmbedder", "RemoteLlm", "ScholarlyRecord", "SimilarityWeights",
    "SourceDescriptor", "SourceKind", "SourceRecord", "SourceRegistry", "__version__",
    "answer", "bm25plus_score", "build_kb", "build_prompt", "build_stats",
    "deduplicate", "ensemble_retrieve", "find_clusters", "flatten_record",
    "group_by_facet", "map_record", "normalize_doi", "pair_similarity", "parse_date",
    "rank", "tokenize",
]
