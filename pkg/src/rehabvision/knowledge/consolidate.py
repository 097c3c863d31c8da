"""Static per-action knowledge consolidation.

Retrieval is static: each action class's description is embedded once, the
top-k chunks are fetched once, and the concatenated result is cached keyed
on a version hash of (index contents, descriptions, parameters).  Inference
reads the cache only; a corpus or description change bumps the version and
forces re-consolidation.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from ..dataset.windows import NUM_CLASSES
from ..errors import ConfigurationError, ValidationError
from ..model.text import ClassDescription, descriptions_fingerprint
from .embedding import Embedder
from .index import KnowledgeIndex, RetrievalHit

DEFAULT_TOKEN_BUDGET = 256
CACHE_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ConsolidatedKnowledge:
    """Top-k retrieval result for one action class, frozen after build."""

    action_class_id: int
    hits: tuple[RetrievalHit, ...]
    concatenated_text: str


@dataclass(frozen=True)
class KnowledgeCache:
    version: str
    k: int
    entries: Mapping[int, ConsolidatedKnowledge]

    def entry(self, action_class_id: int) -> ConsolidatedKnowledge:
        if action_class_id not in self.entries:
            raise ValidationError(
                f"no consolidated knowledge for class {action_class_id}"
            )
        return self.entries[action_class_id]


def cache_version(
    index_fingerprint: str,
    descriptions: Sequence[ClassDescription],
    k: int,
    token_budget: int,
) -> str:
    digest = hashlib.sha256()
    digest.update(f"format={CACHE_FORMAT_VERSION}".encode())
    digest.update(index_fingerprint.encode())
    digest.update(descriptions_fingerprint(descriptions).encode())
    digest.update(f"k={k};budget={token_budget}".encode())
    return digest.hexdigest()


def _concatenate(index: KnowledgeIndex, hits: Sequence[RetrievalHit], budget: int) -> str:
    cited = [
        f"[{index.chunk(hit.chunk_id).source_doc}] {index.chunk(hit.chunk_id).text}"
        for hit in hits
    ]
    tokens = " ".join(cited).split()
    return " ".join(tokens[:budget])


def consolidate(
    descriptions: Sequence[ClassDescription],
    index: KnowledgeIndex,
    embedder: Embedder,
    k: int = 3,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
    num_classes: int = NUM_CLASSES,
) -> KnowledgeCache:
    """Retrieve and freeze top-k knowledge for every action class.

    The raw class description embedding is the query.  Every action class
    (all labels except "no action") must have a description.
    """
    if embedder.fingerprint != index.embedder_fingerprint:
        raise ConfigurationError(
            f"embedder {embedder.fingerprint!r} does not match index "
            f"{index.embedder_fingerprint!r}"
        )
    if k < 1:
        raise ValidationError("k must be at least 1")
    by_label = {d.label_id: d for d in descriptions}
    missing = [label for label in range(1, num_classes) if label not in by_label]
    if missing:
        raise ConfigurationError(f"missing descriptions for action classes {missing}")

    entries: dict[int, ConsolidatedKnowledge] = {}
    for label in range(1, num_classes):
        hits = tuple(index.retrieve(embedder.embed(by_label[label].description), k))
        entries[label] = ConsolidatedKnowledge(
            action_class_id=label,
            hits=hits,
            concatenated_text=_concatenate(index, hits, token_budget),
        )
    version = cache_version(index.fingerprint, descriptions, k, token_budget)
    return KnowledgeCache(version=version, k=k, entries=entries)


def save_cache(cache: KnowledgeCache, path: str | Path) -> None:
    payload = {
        "format_version": CACHE_FORMAT_VERSION,
        "version": cache.version,
        "k": cache.k,
        "entries": {
            str(label): {
                "action_class_id": entry.action_class_id,
                "hits": [
                    {"chunk_id": h.chunk_id, "score": h.score, "rank": h.rank}
                    for h in entry.hits
                ],
                "concatenated_text": entry.concatenated_text,
            }
            for label, entry in cache.entries.items()
        },
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True))


def load_cache(path: str | Path) -> KnowledgeCache:
    payload = json.loads(Path(path).read_text())
    if payload.get("format_version") != CACHE_FORMAT_VERSION:
        raise ConfigurationError(
            f"unsupported cache format {payload.get('format_version')!r}"
        )
    entries = {
        int(label): ConsolidatedKnowledge(
            action_class_id=entry["action_class_id"],
            hits=tuple(RetrievalHit(**hit) for hit in entry["hits"]),
            concatenated_text=entry["concatenated_text"],
        )
        for label, entry in payload["entries"].items()
    }
    return KnowledgeCache(version=payload["version"], k=payload["k"], entries=entries)


def load_or_consolidate(
    cache_path: str | Path,
    descriptions: Sequence[ClassDescription],
    index: KnowledgeIndex,
    embedder: Embedder,
    k: int = 3,
    token_budget: int = DEFAULT_TOKEN_BUDGET,
) -> KnowledgeCache:
    """Return the cached consolidation when current, else rebuild and save.

    A cache hit performs zero index queries.
    """
    cache_path = Path(cache_path)
    expected = cache_version(index.fingerprint, descriptions, k, token_budget)
    if cache_path.exists():
        cached = load_cache(cache_path)
        if cached.version == expected:
            return cached
    cache = consolidate(descriptions, index, embedder, k, token_budget)
    save_cache(cache, cache_path)
    return cache
