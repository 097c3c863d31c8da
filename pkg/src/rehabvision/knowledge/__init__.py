"""Knowledge base: corpus chunking, embedding, retrieval and consolidation."""

from .chunks import (
    DEFAULT_CHUNK_TOKENS,
    KnowledgeChunk,
    chunk_corpus,
    chunk_document,
    load_corpus_dir,
    whitespace_tokens,
)
from .consolidate import (
    DEFAULT_TOKEN_BUDGET,
    ConsolidatedKnowledge,
    KnowledgeCache,
    cache_version,
    consolidate,
    load_cache,
    load_or_consolidate,
    save_cache,
)
from .embedding import HashingEmbedder
from .index import KnowledgeIndex, RetrievalHit, build_index

__all__ = [
    "ConsolidatedKnowledge",
    "DEFAULT_CHUNK_TOKENS",
    "DEFAULT_TOKEN_BUDGET",
    "HashingEmbedder",
    "KnowledgeCache",
    "KnowledgeChunk",
    "KnowledgeIndex",
    "RetrievalHit",
    "build_index",
    "cache_version",
    "chunk_corpus",
    "chunk_document",
    "consolidate",
    "load_cache",
    "load_corpus_dir",
    "load_or_consolidate",
    "save_cache",
    "whitespace_tokens",
]
