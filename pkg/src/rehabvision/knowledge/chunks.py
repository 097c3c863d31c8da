"""Corpus chunking: fixed-token-count chunks with document provenance."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

from ..errors import ValidationError

logger = logging.getLogger(__name__)

DEFAULT_CHUNK_TOKENS = 100


def whitespace_tokens(text: str) -> list[str]:
    return text.split()


@dataclass(frozen=True)
class KnowledgeChunk:
    """One retrievable unit of the knowledge corpus."""

    chunk_id: str
    source_doc: str
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValidationError(f"chunk {self.chunk_id!r} has empty text")


def chunk_document(
    doc_id: str,
    text: str,
    tokenizer: Callable[[str], list[str]] = whitespace_tokens,
    chunk_tokens: int = DEFAULT_CHUNK_TOKENS,
) -> list[KnowledgeChunk]:
    """Split one document into sequential non-overlapping token chunks.

    The final chunk keeps the remainder; an empty document yields no chunks
    and logs a warning rather than failing the corpus build.
    """
    if chunk_tokens < 1:
        raise ValidationError("chunk_tokens must be positive")
    tokens = tokenizer(text)
    if not tokens:
        logger.warning("document %r has no tokens; skipped", doc_id)
        return []
    return [
        KnowledgeChunk(
            chunk_id=f"{doc_id}:{start // chunk_tokens:04d}",
            source_doc=doc_id,
            text=" ".join(tokens[start : start + chunk_tokens]),
        )
        for start in range(0, len(tokens), chunk_tokens)
    ]


def chunk_corpus(
    documents: Mapping[str, str],
    tokenizer: Callable[[str], list[str]] = whitespace_tokens,
    chunk_tokens: int = DEFAULT_CHUNK_TOKENS,
) -> list[KnowledgeChunk]:
    """Chunk every document, in sorted doc-id order for determinism."""
    chunks: list[KnowledgeChunk] = []
    for doc_id in sorted(documents):
        chunks.extend(chunk_document(doc_id, documents[doc_id], tokenizer, chunk_tokens))
    return chunks


def load_corpus_dir(path: str | Path) -> dict[str, str]:
    """Read a directory of ``*.txt`` documents into a doc-id -> text map.

    A sidecar ``<stem>.json`` with a ``"title"`` key renames the document for
    citations; otherwise the file stem is the doc id.
    """
    root = Path(path)
    if not root.is_dir():
        raise ValidationError(f"corpus directory {root} does not exist")
    documents: dict[str, str] = {}
    for file in sorted(root.glob("*.txt")):
        doc_id = file.stem
        sidecar = file.with_suffix(".json")
        if sidecar.exists():
            meta = json.loads(sidecar.read_text())
            doc_id = str(meta.get("title", doc_id))
        if doc_id in documents:
            raise ValidationError(f"duplicate document id {doc_id!r} in corpus")
        documents[doc_id] = file.read_text()
    return documents
