"""Exact cosine-similarity retrieval index.

Exact search (full scan) instead of an approximate index: corpora here are
desk-scale, and exactness lets tests compare against a brute-force oracle.
Indexes are immutable after build; rebuilds produce a new instance.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from ..errors import ConfigurationError, ValidationError
from .chunks import KnowledgeChunk
from .embedding import Embedder

_NORM_EPS = 1e-12


@dataclass(frozen=True)
class RetrievalHit:
    chunk_id: str
    score: float
    rank: int  # 1-based, contiguous


class KnowledgeIndex:
    """Immutable chunk store with exact cosine retrieval."""

    def __init__(
        self,
        chunks: Sequence[KnowledgeChunk],
        vectors: np.ndarray,
        embedder_fingerprint: str,
    ):
        # float64 throughout so results match an independent brute-force
        # scan bitwise and near-ties order reproducibly; vectors must come in
        # unit-norm (build_index normalizes) so save/load is bit-exact
        vectors = np.asarray(vectors, dtype=np.float64)
        if len(chunks) == 0:
            raise ValidationError("cannot build an index from an empty corpus")
        if vectors.shape != (len(chunks), vectors.shape[-1]) or vectors.ndim != 2:
            raise ValidationError(
                f"expected vectors ({len(chunks)}, dim), got {vectors.shape}"
            )
        ids = [chunk.chunk_id for chunk in chunks]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate chunk ids in index")
        norms = np.linalg.norm(vectors, axis=1)
        if not np.allclose(norms, 1.0, atol=1e-6):
            bad = ids[int(np.argmax(np.abs(norms - 1.0)))]
            raise ValidationError(f"chunk {bad!r} embedding is not unit-norm")
        self._chunks = tuple(chunks)
        self._by_id = {chunk.chunk_id: chunk for chunk in self._chunks}
        self._vectors = vectors
        self._embedder_fingerprint = embedder_fingerprint
        self._query_count = 0

    def __len__(self) -> int:
        return len(self._chunks)

    @property
    def embedder_fingerprint(self) -> str:
        return self._embedder_fingerprint

    @property
    def query_count(self) -> int:
        """Number of retrievals served; lets tests assert cache hits."""
        return self._query_count

    @property
    def fingerprint(self) -> str:
        """Content hash: changes iff the corpus or embedder version changes."""
        digest = hashlib.sha256()
        digest.update(self._embedder_fingerprint.encode())
        for chunk in self._chunks:
            digest.update(chunk.chunk_id.encode())
            digest.update(b"\x00")
            digest.update(chunk.text.encode())
            digest.update(b"\x01")
        return digest.hexdigest()

    def chunk(self, chunk_id: str) -> KnowledgeChunk:
        if chunk_id not in self._by_id:
            raise ValidationError(f"unknown chunk id {chunk_id!r}")
        return self._by_id[chunk_id]

    def retrieve(self, query_embedding: np.ndarray, k: int = 3) -> list[RetrievalHit]:
        """Top-k chunks by cosine similarity, descending.

        Ties break toward the lexically smaller chunk id so results are
        deterministic; asking for more hits than the index holds returns
        everything and warns.
        """
        if k < 1:
            raise ValidationError("k must be at least 1")
        query = np.asarray(query_embedding, dtype=np.float64).reshape(-1)
        if query.shape[0] != self._vectors.shape[1]:
            raise ValidationError(
                f"query dim {query.shape[0]} != index dim {self._vectors.shape[1]}"
            )
        if k > len(self):
            warnings.warn(
                f"k={k} exceeds index size {len(self)}; returning all chunks",
                stacklevel=2,
            )
            k = len(self)
        self._query_count += 1
        norm = max(float(np.linalg.norm(query)), _NORM_EPS)
        scores = self._vectors @ (query / norm)
        order = sorted(
            range(len(self)), key=lambda i: (-scores[i], self._chunks[i].chunk_id)
        )
        return [
            RetrievalHit(
                chunk_id=self._chunks[i].chunk_id,
                score=float(scores[i]),
                rank=rank,
            )
            for rank, i in enumerate(order[:k], start=1)
        ]

    def merge(self, other: "KnowledgeIndex") -> "KnowledgeIndex":
        if other.embedder_fingerprint != self._embedder_fingerprint:
            raise ConfigurationError(
                "cannot merge indexes built with different embedders: "
                f"{self._embedder_fingerprint!r} vs {other.embedder_fingerprint!r}"
            )
        return KnowledgeIndex(
            self._chunks + other._chunks,
            np.concatenate([self._vectors, other._vectors]),
            self._embedder_fingerprint,
        )

    def save(self, path: str | Path) -> None:
        meta = {
            "embedder_fingerprint": self._embedder_fingerprint,
            "chunks": [
                {"chunk_id": c.chunk_id, "source_doc": c.source_doc, "text": c.text}
                for c in self._chunks
            ],
        }
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savez_compressed(path, vectors=self._vectors, meta=json.dumps(meta))

    @classmethod
    def load(
        cls, path: str | Path, expected_fingerprint: str | None = None
    ) -> "KnowledgeIndex":
        with np.load(Path(path), allow_pickle=False) as payload:
            vectors = payload["vectors"]
            meta = json.loads(str(payload["meta"]))
        if (
            expected_fingerprint is not None
            and meta["embedder_fingerprint"] != expected_fingerprint
        ):
            raise ConfigurationError(
                f"index was built with embedder {meta['embedder_fingerprint']!r}, "
                f"expected {expected_fingerprint!r}"
            )
        chunks = [KnowledgeChunk(**entry) for entry in meta["chunks"]]
        return cls(chunks, vectors, meta["embedder_fingerprint"])


def build_index(chunks: Sequence[KnowledgeChunk], embedder: Embedder) -> KnowledgeIndex:
    """Embed every chunk and wrap the vectors in an exact index."""
    if not chunks:
        raise ValidationError("cannot build an index from an empty corpus")
    vectors = embedder.embed_batch(chunk.text for chunk in chunks).astype(np.float64)
    norms = np.linalg.norm(vectors, axis=1)
    if not (norms > 0).all():
        bad = chunks[int(np.argmin(norms))].chunk_id
        raise ValidationError(f"chunk {bad!r} has a zero-norm embedding")
    return KnowledgeIndex(chunks, vectors / norms[:, None], embedder.fingerprint)
